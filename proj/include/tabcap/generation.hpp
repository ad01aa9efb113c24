#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "tabcap/error.hpp"
#include "tabcap/prompt.hpp"

namespace tabcap::gen {

struct Greedy {
  bool operator==(const Greedy&) const = default;
};
struct Sampled {
  std::uint64_t seed = 0;
  bool operator==(const Sampled&) const = default;
};
using Decode = std::variant<Greedy, Sampled>;

struct GenRequest {
  prompt::Style style = prompt::Style::Separator;
  std::string prompt;
  int max_new_tokens = 128;
  Decode decode = Greedy{};

  void validate() const;
  bool operator==(const GenRequest&) const = default;
};

/// `continuation` never includes the prompt text.
struct GenResponse {
  std::string continuation;
  std::string backend_id;
  double latency_ms = 0.0;
};

// Wire format of POST /generate.
nlohmann::json to_wire(const GenRequest& request);
GenRequest request_from_wire(const nlohmann::json& body);
nlohmann::json to_wire(const GenResponse& response);
GenResponse response_from_wire(const nlohmann::json& body);

/// Timeout or connection failure; safe to retry.
class RetryableError : public Error {
 public:
  using Error::Error;
};

/// The backend answered with something that is not a valid response body.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// The backend answered with a non-success status.
class BackendError : public Error {
 public:
  BackendError(int status, std::string excerpt);
  int status() const noexcept { return status_; }
  const std::string& excerpt() const noexcept { return excerpt_; }
  bool transient() const noexcept { return status_ == 502 || status_ == 503 || status_ == 504; }

 private:
  int status_;
  std::string excerpt_;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual GenResponse generate(const GenRequest& request, std::chrono::milliseconds deadline) = 0;
  virtual std::string id() const = 0;
};

/// Offline backend. The continuation is the first 20 prompt tokens in
/// reverse order, capped at max_new_tokens.
class StubBackend : public Backend {
 public:
  struct Options {
    std::chrono::milliseconds delay{0};
    /// Prompts for which this returns true fail with a BackendError(500).
    std::function<bool(const GenRequest&)> fail_if;
  };

  StubBackend() = default;
  explicit StubBackend(Options options) : options_(std::move(options)) {}

  GenResponse generate(const GenRequest& request, std::chrono::milliseconds deadline) override;
  std::string id() const override { return "stub-reverse-20"; }

  std::size_t max_in_flight() const { return max_in_flight_.load(); }
  std::size_t calls() const { return calls_.load(); }

  static std::string continuation_for(std::string_view prompt, int max_new_tokens);

 private:
  Options options_;
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> max_in_flight_{0};
  std::atomic<std::size_t> calls_{0};
};

/// Speaks the JSON wire protocol to a service at `endpoint`
/// (e.g. "http://127.0.0.1:8000").
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(std::string endpoint);

  GenResponse generate(const GenRequest& request, std::chrono::milliseconds deadline) override;
  std::string id() const override { return "http:" + endpoint_; }

 private:
  std::string endpoint_;
  std::string host_;  // scheme://host:port
  std::string base_path_;
};

/// Endpoint URL from TABCAP_ENDPOINT, or `fallback` when unset.
std::string endpoint_from_env(std::string fallback = "http://127.0.0.1:8000");

struct ClientConfig {
  std::chrono::milliseconds timeout{30000};
  int retries = 2;
  std::chrono::milliseconds backoff{200};
  std::size_t parallelism = 4;
};

enum class ErrorKind { None, Retryable, Protocol, Backend, Other };

struct GenOutcome {
  std::optional<GenResponse> response;
  ErrorKind kind = ErrorKind::None;
  std::string error;

  bool ok() const { return response.has_value(); }
};

class GenerationClient {
 public:
  GenerationClient(std::shared_ptr<Backend> backend, ClientConfig config = {});

  /// Retries retryable failures up to config.retries times with
  /// exponential backoff, then rethrows the last error.
  GenResponse generate(const GenRequest& request) const;

  /// One outcome per request, index-aligned. At most config.parallelism
  /// requests are in flight at once.
  std::vector<GenOutcome> generate_batch(std::span<const GenRequest> requests) const;

  const ClientConfig& config() const { return config_; }
  std::string backend_id() const { return backend_->id(); }

 private:
  std::shared_ptr<Backend> backend_;
  ClientConfig config_;
};

}  // namespace tabcap::gen
