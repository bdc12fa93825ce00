#pragma once

// Clients for embedders and sentence generators living in another process.
//
// Wire format: newline-delimited JSON, one object per line.
//   embed request   {"id": <int>, "op": "embed", "texts": [<string>, ...]}
//   embed response  {"id": <int>, "dim": <int>, "embeddings": [[<num>...], ...]}
//   continue req.   {"id": <int>, "op": "continue", "context": [...], "try": <int>}
//   continue resp.  {"id": <int>, "sentence": <string>}
//   error           {"id": <int>, "error": <string>}
// Responses may arrive out of order; the id echo pairs them with requests.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "semwm/embedding.hpp"
#include "semwm/generation.hpp"

namespace semwm {

/// A bidirectional byte stream carrying one message per line.
class LineTransport {
 public:
  virtual ~LineTransport() = default;

  /// Writes one line (the newline is appended). Throws kTransport.
  virtual void write_line(const std::string& line) = 0;

  /// Next complete line, or nullopt if none arrived before the deadline.
  /// Throws kTransport when the peer has gone away.
  virtual std::optional<std::string> read_line(
      std::chrono::steady_clock::time_point deadline) = 0;
};

/// Spawns argv[0] with the given arguments and talks over its stdin/stdout.
class ProcessTransport final : public LineTransport {
 public:
  explicit ProcessTransport(std::vector<std::string> argv);
  ~ProcessTransport() override;

  ProcessTransport(const ProcessTransport&) = delete;
  ProcessTransport& operator=(const ProcessTransport&) = delete;

  void write_line(const std::string& line) override;
  std::optional<std::string> read_line(
      std::chrono::steady_clock::time_point deadline) override;

 private:
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

/// POSTs each written line to host:port/path; the response body's lines are
/// queued for read_line.
class HttpTransport final : public LineTransport {
 public:
  HttpTransport(std::string host, int port, std::string path = "/");

  void write_line(const std::string& line) override;
  std::optional<std::string> read_line(
      std::chrono::steady_clock::time_point deadline) override;

 private:
  std::string host_;
  int port_;
  std::string path_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> inbox_;
};

/// Request/response multiplexer over a LineTransport. Safe for concurrent
/// callers: each call gets its own id and waits only for the matching reply.
class RpcChannel {
 public:
  explicit RpcChannel(std::unique_ptr<LineTransport> transport,
                      std::chrono::milliseconds timeout = std::chrono::seconds(30));

  std::uint64_t next_id();

  /// Sends `request_line` (which must carry `id`) and returns the parsed
  /// reply's raw line. Throws kTimeout, kTransport or kProtocol.
  std::string call(std::uint64_t id, const std::string& request_line);

 private:
  std::unique_ptr<LineTransport> transport_;
  std::chrono::milliseconds timeout_;
  std::mutex write_mu_;
  std::mutex state_mu_;
  std::condition_variable cv_;
  bool reader_active_ = false;
  std::map<std::uint64_t, std::string> stash_;
  std::uint64_t next_id_ = 1;
};

/// Embedder behind the embed wire protocol. Vectors are re-normalized locally.
class ExternalEmbedder final : public Embedder {
 public:
  ExternalEmbedder(std::shared_ptr<RpcChannel> channel, std::size_t dim);

  std::size_t dim() const override { return dim_; }
  std::string name() const override;
  std::vector<Embedding> embed_batch(
      std::span<const std::string> texts) const override;

 private:
  std::shared_ptr<RpcChannel> channel_;
  std::size_t dim_;
};

/// Sentence generator behind the continue wire protocol.
class ExternalGenerator final : public SentenceGenerator {
 public:
  explicit ExternalGenerator(std::shared_ptr<RpcChannel> channel);

  std::string next_sentence(std::span<const std::string> context,
                            int try_index) override;

 private:
  std::shared_ptr<RpcChannel> channel_;
};

}  // namespace semwm
