#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "textmine/detail/date.hpp"
#include "textmine/detail/utf8.hpp"
#include "textmine/errors.hpp"

namespace textmine {

/// One text message with optional metadata.
struct Document {
  std::string id;
  std::string text;
  std::optional<std::string> label;
  std::optional<std::int64_t> timestamp;  // UTC seconds since epoch
  std::optional<std::string> source;
  std::optional<std::string> lang;
};

/// An immutable, ordered collection of documents. Iteration order equals
/// file order; the label set is always derived from the documents.
struct Corpus {
  std::vector<Document> documents;

  std::set<std::string> label_set() const {
    std::set<std::string> labels;
    for (const auto& d : documents)
      if (d.label) labels.insert(*d.label);
    return labels;
  }
  std::size_t size() const { return documents.size(); }
  bool empty() const { return documents.empty(); }
};

/// Period counts at month ("YYYY-MM") or day ("YYYY-MM-DD") granularity.
/// Keys are strictly increasing and cover every period in range.
struct Timeline {
  std::vector<std::pair<std::string, long>> buckets;

  bool empty() const { return buckets.empty(); }
};

struct Spike {
  std::string day;
  long count = 0;
  double baseline = 0.0;
};

/// A column (CSV) or key (JSONL) reference: zero-based index or header name.
using ColumnRef = std::variant<std::size_t, std::string>;

struct ColumnMapping {
  ColumnRef text;
  std::optional<ColumnRef> id;
  std::optional<ColumnRef> label;
  std::optional<ColumnRef> timestamp;
  std::optional<ColumnRef> source;
  std::optional<ColumnRef> lang;
  /// Rows whose label starts with none of these prefixes are dropped.
  std::vector<std::string> label_prefixes;
  bool has_header = true;  // CSV only
  bool allow_empty = false;

  /// Canonical JSONL keys: id, text, label, timestamp, source, lang.
  static ColumnMapping jsonl_default() {
    ColumnMapping m;
    m.text = std::string("text");
    m.id = std::string("id");
    m.label = std::string("label");
    m.timestamp = std::string("timestamp");
    m.source = std::string("source");
    m.lang = std::string("lang");
    return m;
  }
};

enum class CorpusFormat { csv, jsonl };

namespace detail {

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // physical line where the record starts
};

// Comma separator, double-quote quoting, quote-doubling escape. Quoted
// fields may contain separators and newlines.
inline std::vector<CsvRecord> parse_csv(std::string_view content) {
  std::vector<CsvRecord> records;
  CsvRecord rec;
  rec.line = 1;
  std::string field;
  bool quoted = false;
  bool any = false;  // record has content beyond an empty first field
  std::size_t line = 1;

  auto end_field = [&] {
    rec.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(rec));
    rec = CsvRecord{};
    rec.line = line;
    any = false;
  };

  std::size_t i = 0;
  while (i < content.size()) {
    char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        continue;
      }
      if (c == '\n') ++line;
      field.push_back(c);
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        ++i;
        break;
      case ',':
        end_field();
        any = true;
        ++i;
        break;
      case '\r':
        if (i + 1 < content.size() && content[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        ++line;
        ++i;
        if (any || !field.empty() || !rec.fields.empty())
          end_record();
        else
          rec.line = line;  // skip blank line
        break;
      default:
        field.push_back(c);
        any = true;
        ++i;
        break;
    }
  }
  if (any || !field.empty() || !rec.fields.empty()) end_record();
  return records;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("cannot read file: " + path.string());
  std::string content = buf.str();
  std::size_t bad = 0;
  if (!validate_utf8(content, &bad))
    throw data_error(path.string() + ": invalid UTF-8 at byte " + std::to_string(bad));
  return content;
}

inline std::string describe_ref(const ColumnRef& ref) {
  if (std::holds_alternative<std::size_t>(ref))
    return "index " + std::to_string(std::get<std::size_t>(ref));
  return "'" + std::get<std::string>(ref) + "'";
}

}  // namespace detail

/// Parses "2" as a zero-based index and anything else as a header name.
inline ColumnRef make_column_ref(std::string_view s) {
  if (!s.empty()) {
    bool digits = true;
    for (char c : s)
      if (c < '0' || c > '9') {
        digits = false;
        break;
      }
    if (digits) return static_cast<std::size_t>(std::stoull(std::string(s)));
  }
  return std::string(s);
}

namespace detail {

class RowReader {
 public:
  RowReader(const ColumnMapping& mapping, const std::vector<std::string>* header)
      : mapping_(mapping), header_(header) {}

  std::optional<std::string> get(const std::vector<std::string>& row,
                                 const std::optional<ColumnRef>& ref,
                                 std::size_t line) const {
    if (!ref) return std::nullopt;
    std::size_t idx;
    if (std::holds_alternative<std::size_t>(*ref)) {
      idx = std::get<std::size_t>(*ref);
    } else {
      const std::string& name = std::get<std::string>(*ref);
      if (!header_)
        throw data_error("column " + describe_ref(*ref) +
                         " referenced by name but the CSV has no header");
      std::size_t found = header_->size();
      for (std::size_t i = 0; i < header_->size(); ++i)
        if ((*header_)[i] == name) {
          found = i;
          break;
        }
      if (found == header_->size())
        throw data_error("column '" + name + "' not found in header");
      idx = found;
    }
    if (idx >= row.size())
      throw data_error("line " + std::to_string(line) + ": column " +
                       describe_ref(*ref) + " out of range (row has " +
                       std::to_string(row.size()) + " columns)");
    return row[idx];
  }

 private:
  const ColumnMapping& mapping_;
  const std::vector<std::string>* header_;
};

inline void finish_document(Document&& doc, const ColumnMapping& mapping,
                            std::size_t line, std::size_t ordinal,
                            std::set<std::string>& seen_ids,
                            std::vector<Document>& out) {
  if (!mapping.label_prefixes.empty()) {
    if (!doc.label) return;
    bool keep = false;
    for (const auto& p : mapping.label_prefixes)
      if (doc.label->rfind(p, 0) == 0) {
        keep = true;
        break;
      }
    if (!keep) return;
  }
  if (doc.text.empty() && !mapping.allow_empty)
    throw data_error("line " + std::to_string(line) + ": empty text");
  if (doc.id.empty()) doc.id = std::to_string(ordinal);
  if (!seen_ids.insert(doc.id).second)
    throw data_error("line " + std::to_string(line) + ": duplicate id '" +
                     doc.id + "'");
  out.push_back(std::move(doc));
}

inline std::int64_t parse_timestamp_or_throw(const std::string& s, std::size_t line) {
  auto t = parse_timestamp(s);
  if (!t)
    throw data_error("line " + std::to_string(line) + ": bad timestamp '" + s +
                     "' (expected RFC 3339 or YYYY-MM-DD)");
  return *t;
}

inline Corpus load_csv(const std::filesystem::path& path, const ColumnMapping& mapping) {
  auto records = parse_csv(read_file(path));
  Corpus corpus;
  if (records.empty()) return corpus;

  std::size_t first_data = 0;
  const std::vector<std::string>* header = nullptr;
  if (mapping.has_header) {
    header = &records[0].fields;
    first_data = 1;
  }
  std::size_t ncols = records[0].fields.size();
  RowReader reader(mapping, header);
  std::set<std::string> seen_ids;
  std::size_t ordinal = 0;
  for (std::size_t r = first_data; r < records.size(); ++r) {
    const auto& rec = records[r];
    ++ordinal;
    if (rec.fields.size() != ncols)
      throw data_error("line " + std::to_string(rec.line) + ": expected " +
                       std::to_string(ncols) + " columns, got " +
                       std::to_string(rec.fields.size()));
    Document doc;
    doc.text = reader.get(rec.fields, mapping.text, rec.line).value_or("");
    if (auto v = reader.get(rec.fields, mapping.id, rec.line)) doc.id = *v;
    if (auto v = reader.get(rec.fields, mapping.label, rec.line)) {
      if (!v->empty()) doc.label = *v;
    }
    if (auto v = reader.get(rec.fields, mapping.timestamp, rec.line)) {
      if (!v->empty()) doc.timestamp = parse_timestamp_or_throw(*v, rec.line);
    }
    if (auto v = reader.get(rec.fields, mapping.source, rec.line)) {
      if (!v->empty()) doc.source = *v;
    }
    if (auto v = reader.get(rec.fields, mapping.lang, rec.line)) {
      if (!v->empty()) doc.lang = *v;
    }
    finish_document(std::move(doc), mapping, rec.line, ordinal, seen_ids,
                    corpus.documents);
  }
  return corpus;
}

inline std::optional<std::string> json_field(const nlohmann::json& obj,
                                             const std::optional<ColumnRef>& ref,
                                             std::size_t line) {
  if (!ref) return std::nullopt;
  if (!std::holds_alternative<std::string>(*ref))
    throw parameter_error("JSONL fields are referenced by key, not index");
  const std::string& key = std::get<std::string>(*ref);
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer())
    return std::to_string(it->get<std::int64_t>());
  throw data_error("line " + std::to_string(line) + ": key '" + key +
                   "' is not a string");
}

inline Corpus load_jsonl(const std::filesystem::path& path, const ColumnMapping& mapping) {
  std::string content = read_file(path);
  Corpus corpus;
  std::set<std::string> seen_ids;
  std::size_t line = 0, ordinal = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    std::string_view raw(content.data() + pos,
                         (nl == std::string::npos ? content.size() : nl) - pos);
    pos = nl == std::string::npos ? content.size() : nl + 1;
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    bool blank = true;
    for (char c : raw)
      if (!is_ascii_space(c)) {
        blank = false;
        break;
      }
    if (blank) continue;
    ++ordinal;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
      throw data_error("line " + std::to_string(line) + ": " + e.what());
    }
    if (!obj.is_object())
      throw data_error("line " + std::to_string(line) + ": expected a JSON object");
    Document doc;
    auto text = json_field(obj, std::optional<ColumnRef>(mapping.text), line);
    if (!text)
      throw data_error("line " + std::to_string(line) + ": missing text key " +
                       describe_ref(mapping.text));
    doc.text = *text;
    if (auto v = json_field(obj, mapping.id, line)) doc.id = *v;
    if (auto v = json_field(obj, mapping.label, line)) doc.label = *v;
    if (auto v = json_field(obj, mapping.timestamp, line))
      doc.timestamp = parse_timestamp_or_throw(*v, line);
    if (auto v = json_field(obj, mapping.source, line)) doc.source = *v;
    if (auto v = json_field(obj, mapping.lang, line)) doc.lang = *v;
    finish_document(std::move(doc), mapping, line, ordinal, seen_ids,
                    corpus.documents);
  }
  return corpus;
}

}  // namespace detail

/// Loads a labeled corpus from CSV or JSONL. Rows failing the mapping's
/// label-prefix filter are dropped; malformed rows raise data_error with
/// the offending line number.
inline Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                          const ColumnMapping& mapping) {
  return format == CorpusFormat::csv ? detail::load_csv(path, mapping)
                                     : detail::load_jsonl(path, mapping);
}

/// Canonical JSONL serialization: one object per document with keys in the
/// order id, text, label, timestamp, source, lang; absent fields omitted.
/// Timestamps are normalized to RFC 3339 UTC.
inline std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& d : corpus.documents) {
    nlohmann::ordered_json j;
    j["id"] = d.id;
    j["text"] = d.text;
    if (d.label) j["label"] = *d.label;
    if (d.timestamp) j["timestamp"] = detail::format_rfc3339(*d.timestamp);
    if (d.source) j["source"] = *d.source;
    if (d.lang) j["lang"] = *d.lang;
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace detail {

inline Timeline build_timeline(const Corpus& corpus, bool daily) {
  Timeline tl;
  std::map<std::string, long> counts;
  std::optional<std::int64_t> lo, hi;
  for (const auto& d : corpus.documents) {
    if (!d.timestamp) continue;
    ++counts[daily ? day_key(*d.timestamp) : month_key(*d.timestamp)];
    if (!lo || *d.timestamp < *lo) lo = *d.timestamp;
    if (!hi || *d.timestamp > *hi) hi = *d.timestamp;
  }
  if (!lo) return tl;
  if (daily) {
    std::int64_t day = *lo / 86400 - (*lo % 86400 < 0 ? 1 : 0);
    std::int64_t last = *hi / 86400 - (*hi % 86400 < 0 ? 1 : 0);
    for (; day <= last; ++day) {
      std::string key = day_key(day * 86400);
      tl.buckets.emplace_back(key, counts.count(key) ? counts[key] : 0);
    }
  } else {
    using namespace std::chrono;
    auto first = epoch_to_civil(*lo);
    auto last = epoch_to_civil(*hi);
    year_month ym{year{first.year}, month{first.month}};
    year_month end{year{last.year}, month{last.month}};
    for (; ym <= end; ym += months{1}) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d-%02u", int(ym.year()),
                    unsigned(ym.month()));
      tl.buckets.emplace_back(buf, counts.count(buf) ? counts[buf] : 0);
    }
  }
  return tl;
}

}  // namespace detail

/// One bucket per calendar month between the earliest and latest timestamp,
/// zero-count months included. Untimestamped documents are ignored.
inline Timeline monthly_timeline(const Corpus& corpus) {
  return detail::build_timeline(corpus, false);
}

/// Same as monthly_timeline at day granularity.
inline Timeline daily_timeline(const Corpus& corpus) {
  return detail::build_timeline(corpus, true);
}

/// Flags every day whose count reaches `factor` times the median count of
/// the other days in the same calendar month. A positive count over a zero
/// baseline is always flagged.
inline std::vector<Spike> detect_spikes(const Timeline& daily, double factor = 3.0) {
  if (factor <= 0.0) throw parameter_error("detect_spikes: factor must be positive");
  for (const auto& [key, count] : daily.buckets)
    if (key.size() != 10)
      throw parameter_error("detect_spikes: daily granularity required, got key '" +
                            key + "'");
  std::vector<Spike> spikes;
  if (daily.buckets.size() < 2) return spikes;

  std::map<std::string, std::vector<std::size_t>> by_month;
  for (std::size_t i = 0; i < daily.buckets.size(); ++i)
    by_month[daily.buckets[i].first.substr(0, 7)].push_back(i);

  auto median = [](std::vector<long> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? static_cast<double>(v[n / 2])
                 : (static_cast<double>(v[n / 2 - 1]) + v[n / 2]) / 2.0;
  };

  for (std::size_t i = 0; i < daily.buckets.size(); ++i) {
    const auto& [key, count] = daily.buckets[i];
    const auto& month_days = by_month[key.substr(0, 7)];
    std::vector<long> others;
    for (std::size_t j : month_days)
      if (j != i) others.push_back(daily.buckets[j].second);
    if (others.empty()) continue;
    double baseline = median(others);
    bool flag = baseline == 0.0 ? count > 0
                                : static_cast<double>(count) >= factor * baseline;
    if (flag) spikes.push_back({key, count, baseline});
  }
  return spikes;
}

inline nlohmann::ordered_json to_json(const Timeline& tl) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& [key, count] : tl.buckets)
    arr.push_back({{"period", key}, {"count", count}});
  return arr;
}

}  // namespace textmine
