#pragma once

#include <stdexcept>
#include <string>

namespace textmine {

/// Base class for all errors raised by this library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be opened or read.
struct io_error : error {
  using error::error;
};

/// Input content is malformed (bad row, bad timestamp, bad value).
struct data_error : error {
  using error::error;
};

/// A structured input file violates its format (embeddings, lexicons).
struct format_error : error {
  using error::error;
};

/// An argument is outside its documented domain.
struct parameter_error : error {
  using error::error;
};

/// A dataset violates a training precondition (label count, class size).
struct dataset_error : error {
  using error::error;
};

/// A saved model cannot be restored.
struct persistence_error : error {
  using error::error;
};

/// A requested key (word, entry) is not present.
struct lookup_error : error {
  using error::error;
};

}  // namespace textmine
