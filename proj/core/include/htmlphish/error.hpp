#pragma once

#include <stdexcept>
#include <string>

namespace htmlphish {

// Base for every error raised by the library. Callers that only need a
// message can catch this; the subclasses carry structured detail.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CorpusError : public Error {
 public:
  using Error::Error;
};

class TokenizerError : public Error {
 public:
  using Error::Error;
};

// Raised by tensor and layer code when operand shapes disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid architecture, mismatched document lengths or a stale cache.
class ModelError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class MetricsError : public Error {
 public:
  using Error::Error;
};

}  // namespace htmlphish
