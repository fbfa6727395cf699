#include "llmbi/error.hpp"

namespace llmbi {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoJsonObject: return "NoJsonObject";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::UnknownDistribution: return "UnknownDistribution";
    case ErrorCode::UnknownParam: return "UnknownParam";
    case ErrorCode::MissingParam: return "MissingParam";
    case ErrorCode::InvalidParamValue: return "InvalidParamValue";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::InvalidIdentifier: return "InvalidIdentifier";
    case ErrorCode::UnsupportedLikelihood: return "UnsupportedLikelihood";
    case ErrorCode::FormulaSyntax: return "FormulaSyntax";
    case ErrorCode::UnresolvedVariable: return "UnresolvedVariable";
    case ErrorCode::NoiseNotPositiveSupport: return "NoiseNotPositiveSupport";
    case ErrorCode::ShadowedColumn: return "ShadowedColumn";
    case ErrorCode::IllegalCharacter: return "IllegalCharacter";
    case ErrorCode::UnexpectedToken: return "UnexpectedToken";
    case ErrorCode::UnexpectedEnd: return "UnexpectedEnd";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::NonFiniteResult: return "NonFiniteResult";
    case ErrorCode::OutsideSupport: return "OutsideSupport";
    case ErrorCode::MissingResponseColumn: return "MissingResponseColumn";
    case ErrorCode::NonFiniteDensity: return "NonFiniteDensity";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidDataset: return "InvalidDataset";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::AllDivergent: return "AllDivergent";
    case ErrorCode::MalformedTrace: return "MalformedTrace";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::HttpError: return "HttpError";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::MissingApiKey: return "MissingApiKey";
    case ErrorCode::FixtureMiss: return "FixtureMiss";
    case ErrorCode::ElicitationFailed: return "ElicitationFailed";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> position)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      position_(position),
      detail_(message) {}

}  // namespace llmbi
