#include "skel_sentinel/error.hpp"

namespace sentinel {

std::string_view to_string(ErrorKind kind) noexcept
{
  switch (kind) {
  case ErrorKind::Io: return "io";
  case ErrorKind::Parse: return "parse";
  case ErrorKind::Schema: return "schema";
  case ErrorKind::Duplicate: return "duplicate";
  case ErrorKind::Conflict: return "conflict";
  case ErrorKind::DegenerateSnippet: return "degenerate-snippet";
  case ErrorKind::DegenerateVector: return "degenerate-vector";
  case ErrorKind::Dimension: return "dimension";
  case ErrorKind::NumericOverflow: return "numeric-overflow";
  case ErrorKind::EmptyBatch: return "empty-batch";
  case ErrorKind::TrainingDiverged: return "training-diverged";
  case ErrorKind::MissingEmbedding: return "missing-embedding";
  case ErrorKind::UnknownSnippet: return "unknown-snippet";
  case ErrorKind::Contract: return "contract";
  case ErrorKind::UndefinedMetric: return "undefined-metric";
  case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

} // namespace sentinel
