#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sentinel {

enum class ErrorKind {
  Io,
  Parse,
  Schema,
  Duplicate,
  Conflict,
  DegenerateSnippet,
  DegenerateVector,
  Dimension,
  NumericOverflow,
  EmptyBatch,
  TrainingDiverged,
  MissingEmbedding,
  UnknownSnippet,
  Contract,
  UndefinedMetric,
  Usage,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library error carrying a machine-readable kind. The CLI prints
/// `error: <kind>: <message>` on a single line.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace sentinel
