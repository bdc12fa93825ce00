#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "semwm/embedding.hpp"
#include "semwm/generation.hpp"

namespace semwm::cli {

// Endpoint descriptors:
//   toy                     built-in model
//   exec:<program> <args>   spawned process speaking the line protocol on stdio
//   http://host:port/path   line protocol in HTTP POST bodies

struct Endpoint {
  enum class Kind { kToy, kExec, kHttp } kind = Kind::kToy;
  std::vector<std::string> argv;  // kExec
  std::string host;               // kHttp
  int port = 80;
  std::string path = "/";
};

/// Throws kConfig on a malformed descriptor.
Endpoint parse_endpoint(const std::string& descriptor);

std::shared_ptr<const Embedder> make_embedder(const std::string& descriptor, std::size_t dim,
                                              std::uint64_t toy_seed,
                                              std::chrono::milliseconds timeout);

std::shared_ptr<SentenceGenerator> make_generator(const std::string& descriptor,
                                                  const ToyLmOptions& toy_options,
                                                  std::chrono::milliseconds timeout);

}  // namespace semwm::cli
