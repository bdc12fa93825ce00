#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace semwm {

enum class ErrorCode {
  kDegenerateEmbedding,
  kDimensionMismatch,
  kInsufficientData,
  kDegenerateCorpus,
  kDegenerateGenerator,
  kInsufficientText,
  kUndefinedStatistic,
  kUndefinedMetric,
  kConfig,
  kFormat,
  kIo,
  // External endpoint failures.
  kTransport,
  kTimeout,
  kProtocol,
  kContract,
};

std::string_view to_string(ErrorCode code);

/// Every failure the library reports is an Error carrying a code, so callers
/// (notably the CLI) can map failures to exit statuses without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace semwm
