#include "semwm/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "semwm/error.hpp"

namespace semwm {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------------------
// ProcessTransport

ProcessTransport::ProcessTransport(std::vector<std::string> argv) {
  if (argv.empty()) fail(ErrorCode::kConfig, "external command is empty");
  // A dead peer must surface as EPIPE, not kill the process.
  ::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) fail(ErrorCode::kTransport, "pipe() failed");
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    fail(ErrorCode::kTransport, "pipe() failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) fail(ErrorCode::kTransport, "fork() failed");
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    std::vector<char*> args;
    for (auto& a : argv) args.push_back(a.data());
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  ::fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  ::fcntl(from_child_, F_SETFD, FD_CLOEXEC);
}

ProcessTransport::~ProcessTransport() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    for (int i = 0; i < 100; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }
}

void ProcessTransport::write_line(const std::string& line) {
  std::string data = line;
  data.push_back('\n');
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::kTransport, std::string("write to external process failed: ") +
                                      std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> ProcessTransport::read_line(Clock::time_point deadline) {
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (remaining <= 0) return std::nullopt;
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining));
    if (ready < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::kTransport, "poll() on external process failed");
    }
    if (ready == 0) return std::nullopt;
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::kTransport, "read from external process failed");
    }
    if (n == 0) fail(ErrorCode::kTransport, "external process closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

// ---------------------------------------------------------------------------
// HttpTransport

HttpTransport::HttpTransport(std::string host, int port, std::string path)
    : host_(std::move(host)), port_(port), path_(std::move(path)) {}

void HttpTransport::write_line(const std::string& line) {
  httplib::Client client(host_, port_);
  client.set_connection_timeout(5);
  auto res = client.Post(path_, line + "\n", "application/x-ndjson");
  if (!res) {
    fail(ErrorCode::kTransport, "HTTP request to " + host_ + ":" + std::to_string(port_) +
                                    " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    fail(ErrorCode::kTransport, "HTTP status " + std::to_string(res->status));
  }
  std::lock_guard lock(mu_);
  std::size_t start = 0;
  const auto& body = res->body;
  while (start < body.size()) {
    auto nl = body.find('\n', start);
    if (nl == std::string::npos) nl = body.size();
    if (nl > start) inbox_.emplace_back(body.substr(start, nl - start));
    start = nl + 1;
  }
  cv_.notify_all();
}

std::optional<std::string> HttpTransport::read_line(Clock::time_point deadline) {
  std::unique_lock lock(mu_);
  if (!cv_.wait_until(lock, deadline, [&] { return !inbox_.empty(); })) return std::nullopt;
  std::string line = std::move(inbox_.front());
  inbox_.pop_front();
  return line;
}

// ---------------------------------------------------------------------------
// RpcChannel

RpcChannel::RpcChannel(std::unique_ptr<LineTransport> transport,
                       std::chrono::milliseconds timeout)
    : transport_(std::move(transport)), timeout_(timeout) {
  if (!transport_) fail(ErrorCode::kConfig, "RPC channel needs a transport");
}

std::uint64_t RpcChannel::next_id() {
  std::lock_guard lock(state_mu_);
  return next_id_++;
}

std::string RpcChannel::call(std::uint64_t id, const std::string& request_line) {
  {
    std::lock_guard lock(write_mu_);
    transport_->write_line(request_line);
  }
  const auto deadline = Clock::now() + timeout_;
  std::unique_lock lock(state_mu_);
  for (;;) {
    if (auto it = stash_.find(id); it != stash_.end()) {
      std::string line = std::move(it->second);
      stash_.erase(it);
      return line;
    }
    const auto now = Clock::now();
    if (now >= deadline) {
      fail(ErrorCode::kTimeout, "no response for request " + std::to_string(id));
    }
    if (reader_active_) {
      cv_.wait_until(lock, deadline);
      continue;
    }
    // Become the reader for a short slice; whatever arrives is stashed by id.
    reader_active_ = true;
    lock.unlock();
    std::optional<std::string> line;
    try {
      line = transport_->read_line(std::min(deadline, now + std::chrono::milliseconds(100)));
    } catch (...) {
      lock.lock();
      reader_active_ = false;
      cv_.notify_all();
      throw;
    }
    lock.lock();
    reader_active_ = false;
    if (line) {
      std::uint64_t reply_id = 0;
      try {
        reply_id = json::parse(*line).at("id").get<std::uint64_t>();
      } catch (const json::exception&) {
        cv_.notify_all();
        fail(ErrorCode::kProtocol, "response without a valid id: " + line->substr(0, 200));
      }
      stash_[reply_id] = std::move(*line);
    }
    cv_.notify_all();
  }
}

// ---------------------------------------------------------------------------
// Clients

namespace {

json parse_reply(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    fail(ErrorCode::kProtocol, "malformed response line");
  }
  if (!j.is_object()) fail(ErrorCode::kProtocol, "response is not an object");
  if (j.contains("error")) {
    const auto msg = j["error"].is_string() ? j["error"].get<std::string>() : j["error"].dump();
    fail(ErrorCode::kProtocol, "external endpoint reported: " + msg);
  }
  return j;
}

}  // namespace

ExternalEmbedder::ExternalEmbedder(std::shared_ptr<RpcChannel> channel, std::size_t dim)
    : channel_(std::move(channel)), dim_(dim) {
  if (!channel_) fail(ErrorCode::kConfig, "external embedder needs a channel");
  if (dim_ < 2) fail(ErrorCode::kConfig, "embedding dimension must be at least 2");
}

std::string ExternalEmbedder::name() const {
  return "external(dim=" + std::to_string(dim_) + ")";
}

std::vector<Embedding> ExternalEmbedder::embed_batch(std::span<const std::string> texts) const {
  if (texts.empty()) return {};
  const auto id = channel_->next_id();
  const json request{{"id", id},
                     {"op", "embed"},
                     {"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  const json reply = parse_reply(channel_->call(id, request.dump()));

  if (!reply.contains("embeddings") || !reply["embeddings"].is_array()) {
    fail(ErrorCode::kProtocol, "embed response lacks an 'embeddings' array");
  }
  if (reply.contains("dim") && (!reply["dim"].is_number_integer() ||
                                reply["dim"].get<std::size_t>() != dim_)) {
    fail(ErrorCode::kContract, "endpoint advertises dim " + reply["dim"].dump() +
                                   ", expected " + std::to_string(dim_));
  }
  const auto& rows = reply["embeddings"];
  if (rows.size() != texts.size()) {
    fail(ErrorCode::kContract, "endpoint returned " + std::to_string(rows.size()) +
                                   " embeddings for " + std::to_string(texts.size()) + " texts");
  }
  std::vector<Embedding> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (!row.is_array()) fail(ErrorCode::kProtocol, "embedding is not an array");
    if (row.size() != dim_) {
      fail(ErrorCode::kContract, "embedding has " + std::to_string(row.size()) +
                                     " components, expected " + std::to_string(dim_));
    }
    std::vector<double> values;
    values.reserve(dim_);
    for (const auto& x : row) {
      if (!x.is_number()) fail(ErrorCode::kProtocol, "embedding component is not a number");
      values.push_back(x.get<double>());
    }
    try {
      out.push_back(Embedding::normalize(values));
    } catch (const Error&) {
      fail(ErrorCode::kContract, "endpoint returned a zero or non-finite embedding");
    }
  }
  return out;
}

ExternalGenerator::ExternalGenerator(std::shared_ptr<RpcChannel> channel)
    : channel_(std::move(channel)) {
  if (!channel_) fail(ErrorCode::kConfig, "external generator needs a channel");
}

std::string ExternalGenerator::next_sentence(std::span<const std::string> context,
                                             int try_index) {
  const auto id = channel_->next_id();
  const json request{{"id", id},
                     {"op", "continue"},
                     {"context", std::vector<std::string>(context.begin(), context.end())},
                     {"try", try_index}};
  const json reply = parse_reply(channel_->call(id, request.dump()));
  if (!reply.contains("sentence") || !reply["sentence"].is_string()) {
    fail(ErrorCode::kProtocol, "continue response lacks a 'sentence' string");
  }
  return reply["sentence"].get<std::string>();
}

}  // namespace semwm
