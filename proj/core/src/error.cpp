#include "semwm/error.hpp"

namespace semwm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateEmbedding: return "degenerate-embedding";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kDegenerateCorpus: return "degenerate-corpus";
    case ErrorCode::kDegenerateGenerator: return "degenerate-generator";
    case ErrorCode::kInsufficientText: return "insufficient-text";
    case ErrorCode::kUndefinedStatistic: return "undefined-statistic";
    case ErrorCode::kUndefinedMetric: return "undefined-metric";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kContract: return "contract";
  }
  return "unknown";
}

}  // namespace semwm
