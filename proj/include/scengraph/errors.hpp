#pragma once

#include <stdexcept>
#include <string>

namespace scengraph {

// Root of all scengraph error types.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Corpus bundle directory or manifest is malformed (missing manifest,
// bad syntax, unreadable raster).
class CorpusFormatError : public Error {
 public:
  using Error::Error;
};

// A report violates shape invariants (step index gap, empty sentence).
class ReportShapeError : public Error {
 public:
  using Error::Error;
};

// A sentence has no recognizable operation verb or violates operation
// arity; the step is skipped with a warning upstream.
class UnparsableStep : public Error {
 public:
  using Error::Error;
};

// Entity construction violates a kind rule (tags on non-CNT, OPT label
// outside the operation vocabulary).
class EntityKindError : public Error {
 public:
  using Error::Error;
};

// Relationship endpoints do not match the relationship kind.
class RelationKindError : public Error {
 public:
  using Error::Error;
};

// App model file is malformed or violates model invariants.
class AppModelError : public Error {
 public:
  using Error::Error;
};

// An event was sent to a widget/operation pair the widget does not support.
class IllegalEventError : public Error {
 public:
  using Error::Error;
};

// An event was sent to a session that has already crashed.
class CrashedSessionError : public Error {
 public:
  using Error::Error;
};

// Replaying a recorded prefix no longer reproduces a live state.
class ReplayDivergedError : public Error {
 public:
  using Error::Error;
};

// An input operation was selected but the seed table has no value for
// the matched entity label.
class SeedMissingError : public Error {
 public:
  using Error::Error;
};

// The exploration hit the hard step cap; carries a partial result upstream.
class RunAbortedError : public Error {
 public:
  using Error::Error;
};

// Metric inputs violate a precondition (covered set not a subset).
class MetricInputError : public Error {
 public:
  using Error::Error;
};

// Bad CLI usage or unknown format selector.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace scengraph
