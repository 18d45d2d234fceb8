#include "pbntune/error.hpp"

namespace pbntune {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroEntry: return "ZeroEntry";
    case ErrorKind::UnsupportedMultiEntryRow: return "UnsupportedMultiEntryRow";
    case ErrorKind::NotWellFormed: return "NotWellFormed";
    case ErrorKind::UnboundParameter: return "UnboundParameter";
    case ErrorKind::UnsupportedDegree: return "UnsupportedDegree";
    case ErrorKind::UnsupportedStructure: return "UnsupportedStructure";
    case ErrorKind::BadOrder: return "BadOrder";
    case ErrorKind::EvidenceImpossible: return "EvidenceImpossible";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::BadRegion: return "BadRegion";
    case ErrorKind::UnsupportedForCD: return "UnsupportedForCD";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::CoverageUnreachable: return "CoverageUnreachable";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::RowSum: return "RowSumError";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::UnknownValue: return "UnknownValue";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

}  // namespace pbntune
