#pragma once

#include <stdexcept>
#include <string>

namespace asd {

enum class Errc {
  // validation
  Parse,
  UnknownSymptom,
  UnknownDisease,
  DuplicateSymptom,
  OverlappingSets,
  EmptyImplicitSet,
  EmptyCorpus,
  InfeasibleMeans,
  SelfComplication,
  AsymmetricGraph,
  OutOfRange,
  InfeasibleTargets,
  ShapeMismatch,
  InvalidArgument,
  TurnOverflow,
  AllMasked,
  // session
  UnknownSession,
  SessionTerminal,
  NoPendingQuestion,
  // io
  Io,
  // numeric
  ZeroProbability,
  NonFinite,
};

const char* errc_name(Errc code);

/// Process exit code class: 1 validation, 2 I/O, 3 numeric.
int exit_code_for(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace asd
