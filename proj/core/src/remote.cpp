#include "stancelab/remote.hpp"

#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <thread>

#include "json_util.hpp"
#include "stancelab/errors.hpp"

namespace stancelab {

using detail::Json;

namespace {

// ---------------------------------------------------------------------------
// Wire format helpers

Json prompt_to_json(const PromptSpec& p) {
  Json j;
  j["system"] = p.system;
  j["question_id"] = p.question_id;
  j["question"] = p.question;
  Json labels = Json::array();
  for (Stance s : p.space.stances()) labels.push_back(stance_label(s));
  j["labels"] = labels;
  return j;
}

PromptSpec prompt_from_json(const Json& j) {
  PromptSpec p;
  p.system = detail::require(j, "system", "prompt").get<std::string>();
  p.question_id = detail::require(j, "question_id", "prompt").get<std::string>();
  p.question = detail::require(j, "question", "prompt").get<std::string>();
  const Json& labels = detail::require(j, "labels", "prompt");
  p.space = labels.size() == 2 ? LabelSpace::binary() : LabelSpace::ternary();
  return p;
}

Json completion_to_json(const Completion& c) {
  Json j;
  j["text"] = c.text;
  j["token_ids"] = c.token_ids;
  j["token_logprobs"] = c.token_logprobs;
  return j;
}

Completion completion_from_json(const Json& j) {
  Completion c;
  c.text = detail::require(j, "text", "completion").get<std::string>();
  c.token_ids =
      detail::require(j, "token_ids", "completion").get<std::vector<std::int64_t>>();
  c.token_logprobs =
      detail::require(j, "token_logprobs", "completion").get<std::vector<double>>();
  return c;
}

// ---------------------------------------------------------------------------
// Socket plumbing

void send_line(int fd, const std::string& payload) {
  std::string line = payload;
  line.push_back('\n');
  std::size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t n = ::send(fd, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw RemoteError("socket send failed: " + std::string(std::strerror(errno)));
    }
    sent += static_cast<std::size_t>(n);
  }
}

// Reads one newline-terminated line; empty optional-style return via bool.
bool recv_line(int fd, std::string& buffer, std::string& line) {
  for (;;) {
    const auto pos = buffer.find('\n');
    if (pos != std::string::npos) {
      line = buffer.substr(0, pos);
      buffer.erase(0, pos + 1);
      return true;
    }
    char chunk[4096];
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw RemoteError("socket recv failed: " + std::string(std::strerror(errno)));
    }
    if (n == 0) return false;  // peer closed
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

sockaddr_un make_address(const std::string& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof addr.sun_path) {
    throw ConfigError("socket path too long: " + path);
  }
  std::strncpy(addr.sun_path, path.c_str(), sizeof addr.sun_path - 1);
  return addr;
}

[[noreturn]] void rethrow_remote_error(const Json& response) {
  const std::string kind = response.value("kind", "remote");
  const std::string message = response.value("error", "unknown remote failure");
  if (kind == "config") throw ConfigError(message);
  if (kind == "data") throw DataError(message);
  if (kind == "metric") throw MetricError(message);
  if (kind == "training") throw TrainingError(message);
  throw RemoteError(message);
}

Json error_response(const std::string& kind, const std::string& message) {
  Json j;
  j["ok"] = false;
  j["kind"] = kind;
  j["error"] = message;
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// PolicyServer

struct PolicyServer::Impl {
  Policy& policy;
  std::string path;
  int listen_fd = -1;
  std::thread worker;
  std::atomic<bool> running{false};

  Impl(Policy& p, std::string socket_path) : policy(p), path(std::move(socket_path)) {}

  Json dispatch(const Json& request) {
    const std::string op = detail::require(request, "op", "request").get<std::string>();
    Json out;
    out["ok"] = true;
    if (op == "sample") {
      const PromptSpec prompt = prompt_from_json(detail::require(request, "prompt", op));
      const auto completions = policy.sample(
          prompt, detail::require(request, "n", op).get<int>(),
          detail::require(request, "temperature", op).get<double>(),
          detail::require(request, "seed", op).get<std::uint64_t>());
      Json arr = Json::array();
      for (const auto& c : completions) arr.push_back(completion_to_json(c));
      out["completions"] = arr;
    } else if (op == "logprob") {
      out["logprob"] = policy.logprob(
          prompt_from_json(detail::require(request, "prompt", op)),
          completion_from_json(detail::require(request, "completion", op)),
          detail::require(request, "temperature", op).get<double>(),
          detail::require(request, "reference", op).get<bool>());
    } else if (op == "sft") {
      std::vector<SftExample> batch;
      for (const auto& item : detail::require(request, "batch", op)) {
        batch.push_back({prompt_from_json(detail::require(item, "prompt", op)),
                         detail::require(item, "target", op).get<std::string>()});
      }
      out["loss"] = policy.sft_update(batch, detail::require(request, "lr", op).get<double>());
    } else if (op == "rl") {
      std::vector<RlExample> batch;
      for (const auto& item : detail::require(request, "batch", op)) {
        batch.push_back({prompt_from_json(detail::require(item, "prompt", op)),
                         completion_from_json(detail::require(item, "completion", op)),
                         detail::require(item, "advantage", op).get<double>()});
      }
      const Json& cj = detail::require(request, "config", op);
      RlUpdateConfig config;
      config.lr = detail::require(cj, "lr", op).get<double>();
      config.clip_range = detail::require(cj, "clip_range", op).get<double>();
      config.kl_coefficient = detail::require(cj, "kl_coefficient", op).get<double>();
      config.temperature = detail::require(cj, "temperature", op).get<double>();
      config.max_grad_norm = detail::require(cj, "max_grad_norm", op).get<double>();
      const RlMetrics m = policy.rl_update(batch, config);
      out["metrics"] = {{"loss", m.loss},
                        {"mean_ratio", m.mean_ratio},
                        {"clip_fraction", m.clip_fraction},
                        {"kl", m.kl}};
    } else if (op == "snapshot") {
      policy.snapshot_reference();
    } else if (op == "count_tokens") {
      out["count"] = policy.count_tokens(detail::require(request, "text", op).get<std::string>());
    } else if (op == "get_checkpoint") {
      out["checkpoint"] = policy.checkpoint_json();
    } else if (op == "set_checkpoint") {
      policy.load_checkpoint_json(detail::require(request, "checkpoint", op).get<std::string>());
    } else {
      return error_response("remote", "unknown op '" + op + "'");
    }
    return out;
  }

  Json handle(const std::string& line) {
    try {
      return dispatch(detail::parse_json(line, "request"));
    } catch (const ConfigError& e) {
      return error_response("config", e.what());
    } catch (const DataError& e) {
      return error_response("data", e.what());
    } catch (const MetricError& e) {
      return error_response("metric", e.what());
    } catch (const TrainingError& e) {
      return error_response("training", e.what());
    } catch (const std::exception& e) {
      return error_response("remote", e.what());
    }
  }

  void serve() {
    while (running.load()) {
      const int client = ::accept(listen_fd, nullptr, nullptr);
      if (client < 0) {
        if (errno == EINTR) continue;
        break;  // listening socket closed by stop()
      }
      std::string buffer;
      std::string line;
      try {
        while (recv_line(client, buffer, line)) {
          send_line(client, handle(line).dump());
        }
      } catch (const RemoteError&) {
        // connection-level failure: drop this client, keep serving
      }
      ::close(client);
    }
  }
};

PolicyServer::PolicyServer(Policy& policy, std::string socket_path)
    : impl_(std::make_unique<Impl>(policy, std::move(socket_path))) {}

PolicyServer::~PolicyServer() { stop(); }

void PolicyServer::start() {
  if (impl_->running.load()) throw ConfigError("PolicyServer already running");
  const sockaddr_un addr = make_address(impl_->path);
  ::unlink(impl_->path.c_str());
  impl_->listen_fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (impl_->listen_fd < 0) throw RemoteError("cannot create server socket");
  if (::bind(impl_->listen_fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(impl_->listen_fd, 8) != 0) {
    ::close(impl_->listen_fd);
    impl_->listen_fd = -1;
    throw RemoteError("cannot bind server socket at '" + impl_->path + "'");
  }
  impl_->running.store(true);
  impl_->worker = std::thread([this] { impl_->serve(); });
}

void PolicyServer::stop() {
  if (!impl_->running.exchange(false)) return;
  ::shutdown(impl_->listen_fd, SHUT_RDWR);
  ::close(impl_->listen_fd);
  impl_->listen_fd = -1;
  if (impl_->worker.joinable()) impl_->worker.join();
  ::unlink(impl_->path.c_str());
}

const std::string& PolicyServer::socket_path() const { return impl_->path; }

// ---------------------------------------------------------------------------
// RemotePolicy

struct RemotePolicy::Impl {
  std::string path;
  int fd = -1;
  std::string buffer;

  explicit Impl(std::string socket_path) : path(std::move(socket_path)) {}

  ~Impl() {
    if (fd >= 0) ::close(fd);
  }

  void connect() {
    if (fd >= 0) return;
    const sockaddr_un addr = make_address(path);
    fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (fd < 0) throw RemoteError("cannot create client socket");
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
      ::close(fd);
      fd = -1;
      throw RemoteError("cannot connect to policy server at '" + path + "'");
    }
  }

  Json call(Json request) {
    connect();
    send_line(fd, request.dump());
    std::string line;
    if (!recv_line(fd, buffer, line)) {
      ::close(fd);
      fd = -1;
      throw RemoteError("policy server closed the connection");
    }
    Json response = detail::parse_json(line, "response");
    if (!response.value("ok", false)) rethrow_remote_error(response);
    return response;
  }
};

RemotePolicy::RemotePolicy(std::string socket_path)
    : impl_(std::make_unique<Impl>(std::move(socket_path))) {}

RemotePolicy::~RemotePolicy() = default;

std::vector<Completion> RemotePolicy::sample(const PromptSpec& prompt, int n,
                                             double temperature, std::uint64_t seed) {
  Json req;
  req["op"] = "sample";
  req["prompt"] = prompt_to_json(prompt);
  req["n"] = n;
  req["temperature"] = temperature;
  req["seed"] = seed;
  const Json res = impl_->call(std::move(req));
  std::vector<Completion> out;
  for (const auto& c : detail::require(res, "completions", "sample")) {
    out.push_back(completion_from_json(c));
  }
  return out;
}

double RemotePolicy::logprob(const PromptSpec& prompt, const Completion& completion,
                             double temperature, bool reference) {
  Json req;
  req["op"] = "logprob";
  req["prompt"] = prompt_to_json(prompt);
  req["completion"] = completion_to_json(completion);
  req["temperature"] = temperature;
  req["reference"] = reference;
  return detail::require(impl_->call(std::move(req)), "logprob", "logprob").get<double>();
}

double RemotePolicy::sft_update(const std::vector<SftExample>& batch, double lr) {
  Json req;
  req["op"] = "sft";
  Json arr = Json::array();
  for (const auto& ex : batch) {
    arr.push_back({{"prompt", prompt_to_json(ex.prompt)}, {"target", ex.target}});
  }
  req["batch"] = arr;
  req["lr"] = lr;
  return detail::require(impl_->call(std::move(req)), "loss", "sft").get<double>();
}

RlMetrics RemotePolicy::rl_update(const std::vector<RlExample>& batch,
                                  const RlUpdateConfig& config) {
  Json req;
  req["op"] = "rl";
  Json arr = Json::array();
  for (const auto& ex : batch) {
    arr.push_back({{"prompt", prompt_to_json(ex.prompt)},
                   {"completion", completion_to_json(ex.completion)},
                   {"advantage", ex.advantage}});
  }
  req["batch"] = arr;
  req["config"] = {{"lr", config.lr},
                   {"clip_range", config.clip_range},
                   {"kl_coefficient", config.kl_coefficient},
                   {"temperature", config.temperature},
                   {"max_grad_norm", config.max_grad_norm}};
  const Json res = impl_->call(std::move(req));
  const Json& mj = detail::require(res, "metrics", "rl");
  RlMetrics m;
  m.loss = detail::require(mj, "loss", "rl").get<double>();
  m.mean_ratio = detail::require(mj, "mean_ratio", "rl").get<double>();
  m.clip_fraction = detail::require(mj, "clip_fraction", "rl").get<double>();
  m.kl = detail::require(mj, "kl", "rl").get<double>();
  return m;
}

void RemotePolicy::snapshot_reference() {
  Json req;
  req["op"] = "snapshot";
  impl_->call(std::move(req));
}

int RemotePolicy::count_tokens(const std::string& text) const {
  Json req;
  req["op"] = "count_tokens";
  req["text"] = text;
  return detail::require(impl_->call(std::move(req)), "count", "count_tokens").get<int>();
}

std::string RemotePolicy::checkpoint_json() const {
  Json req;
  req["op"] = "get_checkpoint";
  return detail::require(impl_->call(std::move(req)), "checkpoint", "get_checkpoint")
      .get<std::string>();
}

void RemotePolicy::load_checkpoint_json(const std::string& text) {
  Json req;
  req["op"] = "set_checkpoint";
  req["checkpoint"] = text;
  impl_->call(std::move(req));
}

}  // namespace stancelab
