// textmine: corpus analytics from the command line.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "textmine/textmine.hpp"

using namespace textmine;

namespace {

// ---- shared option bundles --------------------------------------------------

struct CorpusOpts {
  std::string path;
  std::string format = "auto";
  std::string text_col, id_col, label_col, ts_col, src_col, lang_col;
  std::vector<std::string> label_prefixes;
  bool no_header = false;
  bool allow_empty = false;
};

CLI::Option* add_corpus_options(CLI::App* cmd, CorpusOpts& o,
                                const std::string& prefix = "",
                                bool required = true) {
  auto name = [&](const char* base) { return "--" + prefix + base; };
  // long name plus a short-form alias, e.g. --text-column,--text-col
  auto col = [&](const char* base) {
    std::string full = "--" + prefix + base + "-column";
    return full + ",--" + prefix + base + "-col";
  };
  const char* what = prefix.empty() ? "input corpus (CSV or JSONL)"
                                    : "reference corpus (CSV or JSONL)";
  // accepted as a positional path or via the flag
  std::string positional = prefix.empty() ? "input" : "ref_input";
  auto* in = cmd->add_option(positional + "," + name("input"), o.path, what);
  if (required) in->required();
  cmd->add_option(name("format"), o.format, "input format: auto, csv, jsonl")
      ->check(CLI::IsMember({"auto", "csv", "jsonl"}));
  cmd->add_option(col("text"), o.text_col,
                  "text column: header name, zero-based index, or JSON key");
  cmd->add_option(col("id"), o.id_col, "id column");
  cmd->add_option(col("label"), o.label_col, "label column");
  cmd->add_option(col("timestamp"), o.ts_col, "timestamp column");
  cmd->add_option(col("source"), o.src_col, "source column");
  cmd->add_option(col("lang"), o.lang_col, "language column");
  cmd->add_option(name("label-prefix") + "," + name("label-prefixes"),
                  o.label_prefixes,
                  "keep only documents whose label starts with this (repeatable)")
      ->delimiter(',');
  cmd->add_flag(name("no-header"), o.no_header, "CSV file has no header row");
  cmd->add_flag(name("allow-empty"), o.allow_empty, "keep documents with empty text");
  return in;
}

Corpus load(const CorpusOpts& o) {
  CorpusFormat format;
  if (o.format == "csv") {
    format = CorpusFormat::csv;
  } else if (o.format == "jsonl") {
    format = CorpusFormat::jsonl;
  } else {
    std::string ext = std::filesystem::path(o.path).extension().string();
    format = ext == ".csv" ? CorpusFormat::csv : CorpusFormat::jsonl;
  }
  ColumnMapping m;
  if (format == CorpusFormat::jsonl) {
    m = ColumnMapping::jsonl_default();
    if (!o.text_col.empty()) m.text = make_column_ref(o.text_col);
    if (!o.id_col.empty()) m.id = make_column_ref(o.id_col);
    if (!o.label_col.empty()) m.label = make_column_ref(o.label_col);
    if (!o.ts_col.empty()) m.timestamp = make_column_ref(o.ts_col);
    if (!o.src_col.empty()) m.source = make_column_ref(o.src_col);
    if (!o.lang_col.empty()) m.lang = make_column_ref(o.lang_col);
  } else {
    if (o.text_col.empty())
      throw parameter_error("CSV input needs --text-column");
    m.text = make_column_ref(o.text_col);
    if (!o.id_col.empty()) m.id = make_column_ref(o.id_col);
    if (!o.label_col.empty()) m.label = make_column_ref(o.label_col);
    if (!o.ts_col.empty()) m.timestamp = make_column_ref(o.ts_col);
    if (!o.src_col.empty()) m.source = make_column_ref(o.src_col);
    if (!o.lang_col.empty()) m.lang = make_column_ref(o.lang_col);
  }
  m.label_prefixes = o.label_prefixes;
  m.has_header = !o.no_header;
  m.allow_empty = o.allow_empty;
  return load_corpus(o.path, format, m);
}

struct FeatureOpts {
  std::vector<int> chars{1, 2, 3};
  std::vector<int> words{1, 2};
  bool binary = false;
};

void add_feature_options(CLI::App* cmd, FeatureOpts& o) {
  cmd->add_option("--char-ngrams", o.chars,
                  "character n-gram sizes, subset of 1,2,3 (0 disables)")
      ->delimiter(',');
  cmd->add_option("--word-ngrams", o.words,
                  "word n-gram sizes, subset of 1,2 (0 disables)")
      ->delimiter(',');
  cmd->add_flag("--binary", o.binary, "binary feature weights instead of counts");
}

FeatureConfig make_feature_config(const FeatureOpts& o) {
  FeatureConfig c;
  c.char_ngrams = std::set<int>(o.chars.begin(), o.chars.end());
  c.word_ngrams = std::set<int>(o.words.begin(), o.words.end());
  if (o.chars.size() == 1 && o.chars[0] == 0) c.char_ngrams.clear();
  if (o.words.size() == 1 && o.words[0] == 0) c.word_ngrams.clear();
  c.weighting = o.binary ? Weighting::binary : Weighting::count;
  if (!c.valid()) throw parameter_error("invalid feature configuration");
  return c;
}

std::vector<LabeledVector> labeled_vectors(const Corpus& corpus,
                                           const FeatureConfig& config) {
  std::vector<LabeledVector> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus.documents) {
    if (!doc.label)
      throw dataset_error("document '" + doc.id + "' has no label");
    out.push_back({vectorize(doc.text, config), *doc.label});
  }
  return out;
}

void write_output(const std::string& content, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw io_error("cannot write file: " + path);
}

std::vector<std::string> read_word_list(const std::string& path) {
  std::string content = detail::read_file(path);
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string line = content.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = eol + 1;
    if (line.empty() || line.front() == '#') continue;
    words.push_back(std::move(line));
  }
  return words;
}

EmbeddingTable subset_embeddings(const EmbeddingTable& table,
                                 const std::vector<std::string>& words) {
  if (words.empty()) return table;
  EmbeddingTable sub;
  sub.dimension = table.dimension;
  for (const auto& w : words) sub.vectors[w] = table.at(w);
  return sub;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// ---- command registration ----------------------------------------------------

void register_ingest(CLI::App& app) {
  auto* cmd = app.add_subcommand("ingest", "normalize a corpus to JSONL");
  auto in = std::make_shared<CorpusOpts>();
  auto out = std::make_shared<std::string>();
  add_corpus_options(cmd, *in);
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([in, out] { write_output(to_jsonl(load(*in)), *out); });
}

void register_timeline(CLI::App& app) {
  auto* cmd = app.add_subcommand("timeline", "document counts over time");
  auto in = std::make_shared<CorpusOpts>();
  auto gran = std::make_shared<std::string>("month");
  auto spikes = std::make_shared<bool>(false);
  auto factor = std::make_shared<double>(3.0);
  auto pretty = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>();
  add_corpus_options(cmd, *in);
  cmd->add_option("--granularity", *gran, "month or day")
      ->check(CLI::IsMember({"month", "day"}));
  cmd->add_flag("--spikes", *spikes, "flag spiking days (day granularity only)");
  cmd->add_option("--factor", *factor, "spike threshold over the monthly median");
  cmd->add_flag("--pretty", *pretty, "aligned text instead of JSON");
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([=] {
    if (*spikes && *gran != "day")
      throw parameter_error("--spikes needs --granularity day");
    Corpus corpus = load(*in);
    Timeline tl = *gran == "day" ? daily_timeline(corpus) : monthly_timeline(corpus);
    std::vector<Spike> found;
    if (*spikes) found = detect_spikes(tl, *factor);
    if (*pretty) {
      std::string text;
      for (const auto& [period, count] : tl.buckets)
        text += period + "  " + std::to_string(count) + "\n";
      if (*spikes) {
        text += "spikes:\n";
        for (const auto& s : found)
          text += "  " + s.day + "  count=" + std::to_string(s.count) +
                  "  baseline=" + format_double(s.baseline) + "\n";
      }
      write_output(text, *out);
      return;
    }
    nlohmann::ordered_json j;
    j["granularity"] = *gran;
    j["timeline"] = to_json(tl);
    if (*spikes) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& s : found)
        arr.push_back({{"day", s.day}, {"count", s.count}, {"baseline", s.baseline}});
      j["spikes"] = arr;
    }
    write_output(j.dump(2) + "\n", *out);
  });
}

struct TrainOpts {
  CorpusOpts in;
  FeatureOpts features;
  std::string kind;
  std::string output;
  int epochs = 10;
  double lambda = 1e-4;
  long min_leaf = 100;
  unsigned seed = 0;
};

void add_train_options(CLI::App* cmd, TrainOpts& o, bool with_output) {
  add_corpus_options(cmd, o.in);
  add_feature_options(cmd, o.features);
  cmd->add_option("--model", o.kind, "perceptron, svm, or tree")
      ->required()
      ->check(CLI::IsMember({"perceptron", "svm", "tree"}));
  cmd->add_option("--epochs", o.epochs, "training epochs (perceptron, svm)");
  cmd->add_option("--lambda", o.lambda, "svm regularization strength");
  cmd->add_option("--min-leaf", o.min_leaf, "minimum tree leaf size");
  cmd->add_option("--seed", o.seed, "random seed");
  if (with_output)
    cmd->add_option("--output", o.output, "model file to write")->required();
}

Model train_by_kind(const TrainOpts& o, const std::vector<LabeledVector>& data,
                    const FeatureConfig& config) {
  if (o.kind == "perceptron")
    return train_perceptron(data, o.epochs, o.seed, config);
  if (o.kind == "svm") return train_svm(data, o.lambda, o.epochs, o.seed, config);
  return train_tree(data, o.min_leaf, config);
}

void register_train(CLI::App& app) {
  auto* cmd = app.add_subcommand("train", "fit a classifier and save it");
  auto o = std::make_shared<TrainOpts>();
  add_train_options(cmd, *o, true);
  cmd->callback([o] {
    FeatureConfig config = make_feature_config(o->features);
    Corpus corpus = load(o->in);
    auto data = labeled_vectors(corpus, config);
    Model model = train_by_kind(*o, data, config);
    save_model(model, o->output);
    std::size_t params = std::visit(
        [](const auto& m) -> std::size_t {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, DecisionTreeModel>)
            return m.nodes.size();
          else
            return m.weights.size();
        },
        model);
    std::cout << "trained " << o->kind << " on " << data.size()
              << " documents (" << params
              << (o->kind == "tree" ? " nodes)" : " features)") << "\n";
  });
}

void register_crossval(CLI::App& app) {
  auto* cmd = app.add_subcommand("crossval", "k-fold cross-validation");
  auto o = std::make_shared<TrainOpts>();
  auto folds = std::make_shared<int>(5);
  auto json_out = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>();
  add_train_options(cmd, *o, false);
  cmd->add_option("--folds,--k,-k", *folds, "number of folds");
  cmd->add_flag("--json", *json_out, "JSON metrics instead of a table");
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([o, folds, json_out, out] {
    FeatureConfig config = make_feature_config(o->features);
    Corpus corpus = load(o->in);
    auto data = labeled_vectors(corpus, config);
    Trainer trainer = [&](const std::vector<LabeledVector>& fold_data) {
      return train_by_kind(*o, fold_data, config);
    };
    Metrics m = kfoldcv(trainer, data, *folds, o->seed);
    if (*json_out)
      write_output(to_json(m).dump(2) + "\n", *out);
    else
      write_output(metrics_table(m, o->kind), *out);
  });
}

void register_predict(CLI::App& app) {
  auto* cmd = app.add_subcommand("predict", "label documents with a saved model");
  auto in = std::make_shared<CorpusOpts>();
  auto model_path = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  add_corpus_options(cmd, *in);
  cmd->add_option("--model", *model_path, "model file from `train`")->required();
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([in, model_path, out] {
    Model model = load_model(*model_path);
    const FeatureConfig& config = std::visit(
        [](const auto& m) -> const FeatureConfig& { return m.config; }, model);
    Corpus corpus = load(*in);
    std::string lines;
    for (const auto& doc : corpus.documents) {
      Prediction p = predict(model, vectorize(doc.text, config));
      nlohmann::ordered_json j;
      j["id"] = doc.id;
      j["label"] = p.label;
      j["score"] = p.score;
      lines += j.dump() + "\n";
    }
    write_output(lines, *out);
  });
}

void register_keywords(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "keywords", "chi-square keywords of a corpus against a reference");
  auto in = std::make_shared<CorpusOpts>();
  auto ref = std::make_shared<CorpusOpts>();
  auto opts = std::make_shared<KeywordOptions>();
  auto mode = std::make_shared<std::string>("document");
  auto top = std::make_shared<long>(0);
  auto pretty = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>();
  add_corpus_options(cmd, *in);
  add_corpus_options(cmd, *ref, "ref-");
  cmd->add_option("--min-count", opts->min_count, "combined count floor");
  cmd->add_option("--alpha", opts->alpha, "significance level: 0.05, 0.01, 0.001");
  cmd->add_option("--mode", *mode, "count documents or occurrences")
      ->check(CLI::IsMember({"document", "occurrence"}));
  cmd->add_option("--top", *top, "keep only the strongest N keywords (0 = all)");
  cmd->add_flag("--pretty", *pretty, "aligned text instead of CSV");
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([=] {
    opts->mode = *mode == "occurrence" ? CountMode::occurrence : CountMode::document;
    auto stats = extract_keywords(load(*in), load(*ref), *opts);
    if (*top > 0 && static_cast<long>(stats.size()) > *top) stats.resize(*top);
    if (*pretty) {
      std::string text;
      char buf[256];
      std::snprintf(buf, sizeof buf, "%-24s %8s %8s %10s %5s %10s %s\n", "WORD",
                    "COUNT_A", "COUNT_B", "CHI2", "SIG", "POSTERIOR", "DIR");
      text += buf;
      for (const auto& s : stats) {
        std::snprintf(buf, sizeof buf, "%-24s %8ld %8ld %10.3f %5s %10.4f %s\n",
                      s.word.c_str(), s.count_a, s.count_b, s.chi2,
                      s.significant ? "*" : "", s.posterior, s.direction.c_str());
        text += buf;
      }
      write_output(text, *out);
    } else {
      write_output(keywords_csv(stats), *out);
    }
  });
}

void register_collocations(CLI::App& app) {
  auto* cmd = app.add_subcommand("collocations", "adjacent word pairs ranked by PMI");
  auto in = std::make_shared<CorpusOpts>();
  auto min_count = std::make_shared<long>(5);
  auto top = std::make_shared<long>(0);
  auto pretty = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>();
  add_corpus_options(cmd, *in);
  cmd->add_option("--min-count", *min_count, "minimum pair frequency");
  cmd->add_option("--top", *top, "keep only the strongest N pairs (0 = all)");
  cmd->add_flag("--pretty", *pretty, "aligned text instead of CSV");
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([=] {
    auto pairs = collocations(load(*in), *min_count);
    if (*top > 0 && static_cast<long>(pairs.size()) > *top) pairs.resize(*top);
    std::string text;
    if (*pretty) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%-20s %-20s %8s %10s\n", "LEFT", "RIGHT",
                    "COUNT", "PMI");
      text += buf;
      for (const auto& c : pairs) {
        std::snprintf(buf, sizeof buf, "%-20s %-20s %8ld %10.3f\n", c.left.c_str(),
                      c.right.c_str(), c.count, c.pmi);
        text += buf;
      }
    } else {
      text = "left,right,count,pmi\n";
      for (const auto& c : pairs)
        text += c.left + "," + c.right + "," + std::to_string(c.count) + "," +
                format_double(c.pmi) + "\n";
    }
    write_output(text, *out);
  });
}

void register_expand(CLI::App& app) {
  auto* cmd = app.add_subcommand("expand", "grow a word list via embedding neighbours");
  auto emb = std::make_shared<std::string>();
  auto seeds = std::make_shared<std::vector<std::string>>();
  auto seed_file = std::make_shared<std::string>();
  auto k = std::make_shared<int>(10);
  auto threshold = std::make_shared<double>(0.5);
  auto plain = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>();
  cmd->add_option("--embeddings", *emb, "embeddings file (word2vec text format)")
      ->required();
  cmd->add_option("--seeds", *seeds, "seed words, comma separated")->delimiter(',');
  cmd->add_option("--seed-file", *seed_file, "file with one seed word per line");
  cmd->add_option("--neighbours,-k", *k, "neighbours per seed");
  cmd->add_option("--threshold", *threshold, "minimum cosine similarity, in (0, 1]");
  cmd->add_flag("--plain", *plain, "one word per line instead of JSON");
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([=] {
    std::vector<std::string> all_seeds = *seeds;
    if (!seed_file->empty())
      for (auto& w : read_word_list(*seed_file)) all_seeds.push_back(std::move(w));
    if (all_seeds.empty())
      throw parameter_error("expand: provide seed words via --seeds or --seed-file");
    ExpansionResult r = expand_dictionary(load_embeddings(*emb), all_seeds, *k,
                                          *threshold);
    if (*plain) {
      std::string text;
      for (const auto& w : r.words) text += w + "\n";
      write_output(text, *out);
      for (const auto& w : r.skipped)
        std::cerr << "warning: seed '" << w << "' not in the embeddings\n";
    } else {
      nlohmann::ordered_json j;
      j["words"] = r.words;
      j["skipped"] = r.skipped;
      write_output(j.dump(2) + "\n", *out);
    }
  });
}

void register_cluster(CLI::App& app) {
  auto* cmd = app.add_subcommand("cluster", "spherical k-means over embeddings");
  auto emb = std::make_shared<std::string>();
  auto words = std::make_shared<std::vector<std::string>>();
  auto word_file = std::make_shared<std::string>();
  auto k = std::make_shared<int>(0);
  auto max_iters = std::make_shared<int>(50);
  auto seed = std::make_shared<unsigned>(0);
  auto pretty = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>();
  cmd->add_option("--embeddings", *emb, "embeddings file")->required();
  cmd->add_option("--words", *words, "restrict to these words, comma separated")
      ->delimiter(',');
  cmd->add_option("--word-file", *word_file, "restrict to words from this file");
  cmd->add_option("-k,--clusters", *k, "number of clusters")->required();
  cmd->add_option("--max-iters", *max_iters, "iteration cap");
  cmd->add_option("--seed", *seed, "random seed");
  cmd->add_flag("--pretty", *pretty, "one line per cluster instead of JSON");
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([=] {
    std::vector<std::string> subset = *words;
    if (!word_file->empty())
      for (auto& w : read_word_list(*word_file)) subset.push_back(std::move(w));
    EmbeddingTable table = subset_embeddings(load_embeddings(*emb), subset);
    KmeansResult r = spherical_kmeans(table, *k, *seed, *max_iters);
    std::vector<std::vector<std::string>> members(*k);
    for (std::size_t i = 0; i < r.words.size(); ++i)
      members[r.assignment[i]].push_back(r.words[i]);
    if (*pretty) {
      std::string text;
      for (int c = 0; c < *k; ++c) {
        text += "cluster " + std::to_string(c) + " (" +
                std::to_string(members[c].size()) + "):";
        for (const auto& w : members[c]) text += " " + w;
        text += "\n";
      }
      write_output(text, *out);
      return;
    }
    nlohmann::ordered_json j;
    j["k"] = *k;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["objective"] = r.objective_history;
    nlohmann::ordered_json clusters = nlohmann::ordered_json::array();
    for (int c = 0; c < *k; ++c)
      clusters.push_back({{"id", c},
                          {"size", members[c].size()},
                          {"words", members[c]}});
    j["clusters"] = clusters;
    write_output(j.dump(2) + "\n", *out);
  });
}

void register_project(CLI::App& app) {
  auto* cmd = app.add_subcommand("project", "project embeddings to 2D (PCA)");
  auto emb = std::make_shared<std::string>();
  auto words = std::make_shared<std::vector<std::string>>();
  auto word_file = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("--embeddings", *emb, "embeddings file")->required();
  cmd->add_option("--words", *words, "restrict to these words, comma separated")
      ->delimiter(',');
  cmd->add_option("--word-file", *word_file, "restrict to words from this file");
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([=] {
    std::vector<std::string> subset = *words;
    if (!word_file->empty())
      for (auto& w : read_word_list(*word_file)) subset.push_back(std::move(w));
    EmbeddingTable table = subset_embeddings(load_embeddings(*emb), subset);
    std::vector<std::string> order;
    std::vector<std::vector<double>> vecs;
    for (const auto& [w, v] : table.vectors) {
      order.push_back(w);
      vecs.push_back(v);
    }
    ProjectionResult r = project_2d(vecs);
    if (r.degenerate)
      std::cerr << "warning: projection is degenerate (not enough variance)\n";
    std::string text = "word,x,y\n";
    for (std::size_t i = 0; i < order.size(); ++i)
      text += order[i] + "," + format_double(r.points[i][0]) + "," +
              format_double(r.points[i][1]) + "\n";
    write_output(text, *out);
  });
}

void register_sentiment(CLI::App& app) {
  auto* cmd = app.add_subcommand("sentiment", "lexicon polarity scores");
  auto in = std::make_shared<CorpusOpts>();
  auto text = std::make_shared<std::string>();
  auto lex_path = std::make_shared<std::string>();
  auto show_matches = std::make_shared<bool>(false);
  auto pretty = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>();
  add_corpus_options(cmd, *in, "", false);
  cmd->add_option("--text", *text, "score one text instead of a corpus");
  cmd->add_option("--lexicon", *lex_path, "sentiment lexicon TSV")->required();
  cmd->add_flag("--matches", *show_matches, "include matched tokens");
  cmd->add_flag("--pretty", *pretty, "aligned text instead of JSON");
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([=] {
    SentimentLexicon lexicon = SentimentLexicon::from_tsv(*lex_path);
    auto to_entry = [&](const PolarityResult& r) {
      nlohmann::ordered_json j;
      j["score"] = r.score;
      if (*show_matches) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& [token, score] : r.matches)
          arr.push_back({{"token", token}, {"score", score}});
        j["matches"] = arr;
      }
      return j;
    };
    if (!text->empty()) {
      PolarityResult r = polarity(*text, lexicon);
      if (*pretty)
        write_output(format_double(r.score) + "\n", *out);
      else
        write_output(to_entry(r).dump(2) + "\n", *out);
      return;
    }
    if (in->path.empty()) throw parameter_error("provide --input or --text");
    Corpus corpus = load(*in);
    std::string lines;
    for (const auto& doc : corpus.documents) {
      PolarityResult r = polarity(doc.text, lexicon);
      if (*pretty) {
        lines += doc.id + "  " + format_double(r.score) + "\n";
      } else {
        nlohmann::ordered_json j = to_entry(r);
        nlohmann::ordered_json row;
        row["id"] = doc.id;
        for (auto& [key, value] : j.items()) row[key] = value;
        lines += row.dump() + "\n";
      }
    }
    write_output(lines, *out);
  });
}

void register_profile(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "profile", "category, style, and negativity profile per document");
  auto in = std::make_shared<CorpusOpts>();
  auto text = std::make_shared<std::string>();
  auto cat_path = std::make_shared<std::string>();
  auto emoji_path = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  add_corpus_options(cmd, *in, "", false);
  cmd->add_option("--text", *text, "profile one text instead of a corpus");
  cmd->add_option("--categories", *cat_path, "category lexicon TSV");
  cmd->add_option("--emoji-file", *emoji_path, "angry emoji list, one per line");
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([=] {
    std::optional<CategoryLexicon> categories;
    if (!cat_path->empty()) categories = CategoryLexicon::from_tsv(*cat_path);
    NegativityConfig negativity;
    if (!emoji_path->empty()) negativity = NegativityConfig::from_file(*emoji_path);
    auto to_entry = [&](const std::string& doc_text) {
      nlohmann::ordered_json j;
      if (categories) {
        nlohmann::ordered_json cats = nlohmann::ordered_json::object();
        for (const auto& [cat, rate] : category_profile(doc_text, *categories))
          cats[cat] = rate;
        j["categories"] = cats;
      }
      StyleProfile style = style_profile(doc_text);
      j["style"] = {{"pronoun_rate", style.pronoun_rate},
                    {"determiner_rate", style.determiner_rate},
                    {"quantifier_rate", style.quantifier_rate},
                    {"token_count", style.token_count}};
      NegativityMarkers neg = negativity_markers(doc_text, negativity);
      j["negativity"] = {{"allcaps_ratio", neg.allcaps_ratio},
                         {"exclamation_density", neg.exclamation_density},
                         {"angry_emoji_count", neg.angry_emoji_count}};
      return j;
    };
    if (!text->empty()) {
      write_output(to_entry(*text).dump(2) + "\n", *out);
      return;
    }
    if (in->path.empty()) throw parameter_error("provide --input or --text");
    Corpus corpus = load(*in);
    std::string lines;
    for (const auto& doc : corpus.documents) {
      nlohmann::ordered_json j = to_entry(doc.text);
      nlohmann::ordered_json row;
      row["id"] = doc.id;
      for (auto& [key, value] : j.items()) row[key] = value;
      lines += row.dump() + "\n";
    }
    write_output(lines, *out);
  });
}

void print_word_tree(const WordTreeNode& node, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += node.token + " (" + std::to_string(node.count) + ")\n";
  for (const auto& child : node.children) print_word_tree(child, depth + 1, out);
}

void register_wordtree(CLI::App& app) {
  auto* cmd = app.add_subcommand("wordtree", "contexts following (or preceding) a keyword");
  auto in = std::make_shared<CorpusOpts>();
  auto keyword = std::make_shared<std::string>();
  auto direction = std::make_shared<std::string>("right");
  auto max_depth = std::make_shared<std::size_t>(3);
  auto min_count = std::make_shared<long>(1);
  auto pretty = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>();
  add_corpus_options(cmd, *in);
  cmd->add_option("--keyword", *keyword, "root word")->required();
  cmd->add_option("--direction", *direction, "right or left")
      ->check(CLI::IsMember({"right", "left"}));
  cmd->add_option("--max-depth", *max_depth, "context length");
  cmd->add_option("--min-count", *min_count, "prune branches below this count");
  cmd->add_flag("--pretty", *pretty, "indented text instead of JSON");
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([=] {
    WordTreeNode tree = word_tree(
        load(*in), *keyword,
        *direction == "left" ? TreeDirection::left : TreeDirection::right,
        *max_depth, *min_count);
    if (*pretty) {
      std::string text;
      print_word_tree(tree, 0, text);
      write_output(text, *out);
    } else {
      write_output(word_tree_json(tree).dump(2) + "\n", *out);
    }
  });
}

void register_export_tree(CLI::App& app) {
  auto* cmd = app.add_subcommand("export-tree", "render a tree model as DOT or JSON");
  auto model_path = std::make_shared<std::string>();
  auto format = std::make_shared<std::string>("dot");
  auto out = std::make_shared<std::string>();
  cmd->add_option("--model", *model_path, "model file from `train`")->required();
  cmd->add_option("--format", *format, "dot or json")
      ->check(CLI::IsMember({"dot", "json"}));
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([=] {
    Model model = load_model(*model_path);
    std::string text = export_tree(
        model, *format == "json" ? ExportFormat::json : ExportFormat::dot);
    if (*format == "json") text += "\n";
    write_output(text, *out);
  });
}

void register_highlight(CLI::App& app) {
  auto* cmd = app.add_subcommand("highlight", "mark lexicon matches in text");
  auto in = std::make_shared<CorpusOpts>();
  auto text = std::make_shared<std::string>();
  auto cat_path = std::make_shared<std::string>();
  auto pretty = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>();
  add_corpus_options(cmd, *in, "", false);
  cmd->add_option("--text", *text, "highlight one text instead of a corpus");
  cmd->add_option("--categories", *cat_path, "category lexicon TSV")->required();
  cmd->add_flag("--pretty", *pretty, "one match per line instead of JSON");
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([=] {
    CategoryLexicon lexicon = CategoryLexicon::from_tsv(*cat_path);
    auto spans_json = [](const std::vector<HighlightSpan>& spans) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& s : spans)
        arr.push_back({{"start", s.start},
                       {"end", s.end},
                       {"entry", s.matched_entry},
                       {"category", s.category}});
      return arr;
    };
    auto spans_text = [](const std::vector<HighlightSpan>& spans,
                         const std::string& id) {
      std::string text;
      for (const auto& s : spans) {
        if (!id.empty()) text += id + "\t";
        text += std::to_string(s.start) + "\t" + std::to_string(s.end) + "\t" +
                s.matched_entry + "\t" + s.category + "\n";
      }
      return text;
    };
    if (!text->empty()) {
      auto spans = highlight(*text, lexicon);
      if (*pretty)
        write_output(spans_text(spans, ""), *out);
      else
        write_output(spans_json(spans).dump(2) + "\n", *out);
      return;
    }
    if (in->path.empty()) throw parameter_error("provide --input or --text");
    Corpus corpus = load(*in);
    std::string lines;
    for (const auto& doc : corpus.documents) {
      auto spans = highlight(doc.text, lexicon);
      if (*pretty) {
        lines += spans_text(spans, doc.id);
      } else {
        nlohmann::ordered_json row;
        row["id"] = doc.id;
        row["spans"] = spans_json(spans);
        lines += row.dump() + "\n";
      }
    }
    write_output(lines, *out);
  });
}

void register_report(CLI::App& app) {
  auto* cmd = app.add_subcommand("report", "one-shot corpus summary");
  auto in = std::make_shared<CorpusOpts>();
  auto ref = std::make_shared<CorpusOpts>();
  auto lex_path = std::make_shared<std::string>();
  auto emoji_path = std::make_shared<std::string>();
  auto opts = std::make_shared<KeywordOptions>();
  auto mode = std::make_shared<std::string>("document");
  auto top = std::make_shared<int>(20);
  auto out = std::make_shared<std::string>();
  add_corpus_options(cmd, *in);
  add_corpus_options(cmd, *ref, "ref-", false);
  cmd->add_option("--sentiment-lexicon", *lex_path, "sentiment lexicon TSV");
  cmd->add_option("--emoji-file", *emoji_path, "angry emoji list");
  cmd->add_option("--min-count", opts->min_count, "keyword count floor");
  cmd->add_option("--alpha", opts->alpha, "keyword significance level");
  cmd->add_option("--mode", *mode, "keyword counting mode")
      ->check(CLI::IsMember({"document", "occurrence"}));
  cmd->add_option("--top-keywords", *top, "keywords to include");
  cmd->add_option("--output", *out, "output path (default stdout)");
  cmd->callback([=] {
    Corpus corpus = load(*in);
    std::optional<Corpus> reference;
    if (!ref->path.empty()) reference = load(*ref);
    std::optional<SentimentLexicon> lexicon;
    if (!lex_path->empty()) lexicon = SentimentLexicon::from_tsv(*lex_path);
    ReportOptions options;
    if (reference) options.reference = &*reference;
    if (lexicon) options.sentiment = &*lexicon;
    if (!emoji_path->empty())
      options.negativity = NegativityConfig::from_file(*emoji_path);
    opts->mode = *mode == "occurrence" ? CountMode::occurrence : CountMode::document;
    options.keywords = *opts;
    options.top_keywords = *top;
    write_output(summary_report(corpus, options).dump(2) + "\n", *out);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"textmine: corpus analytics for labeled text collections"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read defaults from a TOML/INI file")
      ->envname("TEXTMINE_CONFIG");

  register_ingest(app);
  register_timeline(app);
  register_train(app);
  register_crossval(app);
  register_predict(app);
  register_keywords(app);
  register_collocations(app);
  register_expand(app);
  register_cluster(app);
  register_project(app);
  register_sentiment(app);
  register_profile(app);
  register_wordtree(app);
  register_export_tree(app);
  register_highlight(app);
  register_report(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const parameter_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
