#include "asd/error.hpp"

namespace asd {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::Parse: return "ParseError";
    case Errc::UnknownSymptom: return "UnknownSymptom";
    case Errc::UnknownDisease: return "UnknownDisease";
    case Errc::DuplicateSymptom: return "DuplicateSymptom";
    case Errc::OverlappingSets: return "OverlappingSets";
    case Errc::EmptyImplicitSet: return "EmptyImplicitSet";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::InfeasibleMeans: return "InfeasibleMeans";
    case Errc::SelfComplication: return "SelfComplication";
    case Errc::AsymmetricGraph: return "AsymmetricGraph";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::InfeasibleTargets: return "InfeasibleTargets";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::TurnOverflow: return "TurnOverflow";
    case Errc::AllMasked: return "AllMasked";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::SessionTerminal: return "SessionTerminal";
    case Errc::NoPendingQuestion: return "NoPendingQuestion";
    case Errc::Io: return "IoError";
    case Errc::ZeroProbability: return "ZeroProbability";
    case Errc::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::Io: return 2;
    case Errc::ZeroProbability:
    case Errc::NonFinite: return 3;
    default: return 1;
  }
}

}  // namespace asd
