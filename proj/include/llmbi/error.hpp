#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace llmbi {

enum class ErrorCode {
  // spec_schema
  NoJsonObject,
  MalformedJson,
  UnknownDistribution,
  UnknownParam,
  MissingParam,
  InvalidParamValue,
  MissingKey,
  InvalidIdentifier,
  UnsupportedLikelihood,
  FormulaSyntax,
  UnresolvedVariable,
  NoiseNotPositiveSupport,
  ShadowedColumn,
  // formula
  IllegalCharacter,
  UnexpectedToken,
  UnexpectedEnd,
  UnboundVariable,
  NonFiniteResult,
  // distributions
  OutsideSupport,
  // posterior
  MissingResponseColumn,
  NonFiniteDensity,
  DimensionMismatch,
  InvalidDataset,
  // sampler
  InvalidConfig,
  NonFiniteGradient,
  AllDivergent,
  MalformedTrace,
  // diagnostics
  InsufficientSamples,
  ZeroVariance,
  // elicitation
  EmptyInput,
  HttpError,
  Timeout,
  MissingApiKey,
  FixtureMiss,
  ElicitationFailed,
  // data_io
  MalformedCsv,
  NonNumericCell,
  RaggedRow,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the whole library. The code identifies the
/// failure; `position()` is a 0-based character offset for formula errors
/// and a 1-based line number for CSV errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> position = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> position() const noexcept { return position_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> position_;
  std::string detail_;
};

}  // namespace llmbi
