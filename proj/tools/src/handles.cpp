#include "semwm_cli/handles.hpp"

#include <charconv>
#include <sstream>

#include "semwm/error.hpp"
#include "semwm/external.hpp"

namespace semwm::cli {

Endpoint parse_endpoint(const std::string& descriptor) {
  Endpoint e;
  if (descriptor.empty() || descriptor == "toy") return e;
  if (descriptor.rfind("exec:", 0) == 0) {
    e.kind = Endpoint::Kind::kExec;
    std::istringstream words(descriptor.substr(5));
    for (std::string w; words >> w;) e.argv.push_back(w);
    if (e.argv.empty()) fail(ErrorCode::kConfig, "exec endpoint names no program");
    return e;
  }
  if (descriptor.rfind("http://", 0) == 0) {
    e.kind = Endpoint::Kind::kHttp;
    std::string rest = descriptor.substr(7);
    const auto slash = rest.find('/');
    if (slash != std::string::npos) {
      e.path = rest.substr(slash);
      rest.resize(slash);
    }
    const auto colon = rest.rfind(':');
    if (colon != std::string::npos) {
      const std::string port = rest.substr(colon + 1);
      const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), e.port);
      if (ec != std::errc{} || ptr != port.data() + port.size() || e.port <= 0 ||
          e.port > 65535) {
        fail(ErrorCode::kConfig, "bad port in endpoint '" + descriptor + "'");
      }
      rest.resize(colon);
    }
    if (rest.empty()) fail(ErrorCode::kConfig, "endpoint '" + descriptor + "' has no host");
    e.host = rest;
    return e;
  }
  fail(ErrorCode::kConfig, "unknown endpoint '" + descriptor +
                               "' (expected toy, exec:<command> or http://host:port/path)");
}

namespace {

std::shared_ptr<RpcChannel> open_channel(const Endpoint& e, std::chrono::milliseconds timeout) {
  std::unique_ptr<LineTransport> transport;
  if (e.kind == Endpoint::Kind::kExec) {
    transport = std::make_unique<ProcessTransport>(e.argv);
  } else {
    transport = std::make_unique<HttpTransport>(e.host, e.port, e.path);
  }
  return std::make_shared<RpcChannel>(std::move(transport), timeout);
}

}  // namespace

std::shared_ptr<const Embedder> make_embedder(const std::string& descriptor, std::size_t dim,
                                              std::uint64_t toy_seed,
                                              std::chrono::milliseconds timeout) {
  const Endpoint e = parse_endpoint(descriptor);
  if (e.kind == Endpoint::Kind::kToy) return std::make_shared<ToyEmbedder>(dim, toy_seed);
  return std::make_shared<ExternalEmbedder>(open_channel(e, timeout), dim);
}

std::shared_ptr<SentenceGenerator> make_generator(const std::string& descriptor,
                                                  const ToyLmOptions& toy_options,
                                                  std::chrono::milliseconds timeout) {
  const Endpoint e = parse_endpoint(descriptor);
  if (e.kind == Endpoint::Kind::kToy) return std::make_shared<ToyLanguageModel>(toy_options);
  return std::make_shared<ExternalGenerator>(open_channel(e, timeout));
}

}  // namespace semwm::cli
