#include "tabcap/generation.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "tabcap/text.hpp"

namespace tabcap::gen {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string excerpt_of(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

void GenRequest::validate() const {
  if (prompt.empty()) throw Error("generation prompt is empty");
  if (max_new_tokens < 1) throw Error("max_new_tokens must be >= 1");
}

nlohmann::json to_wire(const GenRequest& request) {
  nlohmann::json decode;
  if (const auto* sampled = std::get_if<Sampled>(&request.decode))
    decode = {{"sampled", {{"seed", sampled->seed}}}};
  else
    decode = "greedy";
  return {{"style", prompt::to_string(request.style)},
          {"prompt", request.prompt},
          {"max_new_tokens", request.max_new_tokens},
          {"decode", decode}};
}

GenRequest request_from_wire(const nlohmann::json& body) {
  try {
    GenRequest r;
    r.style = prompt::parse_style(body.at("style").get<std::string>());
    r.prompt = body.at("prompt").get<std::string>();
    r.max_new_tokens = body.at("max_new_tokens").get<int>();
    const auto& decode = body.at("decode");
    if (decode.is_string() && decode.get<std::string>() == "greedy")
      r.decode = Greedy{};
    else if (decode.is_object() && decode.contains("sampled"))
      r.decode = Sampled{decode.at("sampled").at("seed").get<std::uint64_t>()};
    else
      throw ProtocolError("unsupported decode mode " + decode.dump());
    r.validate();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed generation request: ") + e.what());
  } catch (const ProtocolError&) {
    throw;
  } catch (const Error& e) {
    throw ProtocolError(std::string("invalid generation request: ") + e.what());
  }
}

nlohmann::json to_wire(const GenResponse& response) {
  return {{"continuation", response.continuation}, {"backend_id", response.backend_id}};
}

GenResponse response_from_wire(const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("continuation") || !body["continuation"].is_string() ||
      !body.contains("backend_id") || !body["backend_id"].is_string())
    throw ProtocolError("malformed generation response: " + excerpt_of(body.dump()));
  GenResponse r;
  r.continuation = body["continuation"].get<std::string>();
  r.backend_id = body["backend_id"].get<std::string>();
  return r;
}

BackendError::BackendError(int status, std::string excerpt)
    : Error("backend returned status " + std::to_string(status) + ": " + excerpt),
      status_(status),
      excerpt_(std::move(excerpt)) {}

std::string StubBackend::continuation_for(std::string_view prompt, int max_new_tokens) {
  auto words = text::split_whitespace(prompt);
  const std::size_t keep = std::min<std::size_t>({words.size(), 20, static_cast<std::size_t>(std::max(0, max_new_tokens))});
  words.resize(keep);
  std::reverse(words.begin(), words.end());
  return text::join(words, " ");
}

GenResponse StubBackend::generate(const GenRequest& request, std::chrono::milliseconds) {
  const auto start = Clock::now();
  const std::size_t now = ++in_flight_;
  std::size_t seen = max_in_flight_.load();
  while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
  }
  ++calls_;
  struct Leave {
    std::atomic<std::size_t>& counter;
    ~Leave() { --counter; }
  } leave{in_flight_};

  if (options_.delay.count() > 0) std::this_thread::sleep_for(options_.delay);
  if (options_.fail_if && options_.fail_if(request))
    throw BackendError(500, R"({"error": "injected failure"})");

  request.validate();
  GenResponse r;
  r.continuation = continuation_for(request.prompt, request.max_new_tokens);
  r.backend_id = id();
  r.latency_ms = elapsed_ms(start);
  return r;
}

HttpBackend::HttpBackend(std::string endpoint) : endpoint_(std::move(endpoint)) {
  std::string_view url = endpoint_;
  const auto scheme = url.find("://");
  if (scheme == std::string_view::npos || url.substr(0, scheme) != "http")
    throw Error("unsupported endpoint '" + endpoint_ + "' (expected http://host:port)");
  const auto path = url.find('/', scheme + 3);
  host_ = std::string(url.substr(0, path));
  if (path != std::string_view::npos) base_path_ = std::string(url.substr(path));
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
}

GenResponse HttpBackend::generate(const GenRequest& request, std::chrono::milliseconds deadline) {
  request.validate();
  const auto start = Clock::now();
  httplib::Client client(host_);
  client.set_connection_timeout(deadline);
  client.set_read_timeout(deadline);
  client.set_write_timeout(deadline);

  auto res = client.Post(base_path_ + "/generate", to_wire(request).dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                           err == httplib::Error::Write;
    throw RetryableError(std::string(timed_out ? "request timed out: " : "connection failed: ") +
                         httplib::to_string(err) + " (" + endpoint_ + ")");
  }
  if (res->status != 200) throw BackendError(res->status, excerpt_of(res->body));

  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("response is not JSON: " + excerpt_of(res->body));
  }
  auto response = response_from_wire(body);
  response.latency_ms = elapsed_ms(start);
  return response;
}

std::string endpoint_from_env(std::string fallback) {
  if (const char* env = std::getenv("TABCAP_ENDPOINT"); env && *env) return env;
  return fallback;
}

GenerationClient::GenerationClient(std::shared_ptr<Backend> backend, ClientConfig config)
    : backend_(std::move(backend)), config_(config) {
  if (!backend_) throw Error("generation client needs a backend");
  if (config_.parallelism < 1) throw Error("parallelism must be >= 1");
  if (config_.retries < 0) throw Error("retries must be >= 0");
}

GenResponse GenerationClient::generate(const GenRequest& request) const {
  request.validate();
  for (int attempt = 0;; ++attempt) {
    try {
      return backend_->generate(request, config_.timeout);
    } catch (const RetryableError&) {
      if (attempt >= config_.retries) throw;
    } catch (const BackendError& e) {
      if (!e.transient() || attempt >= config_.retries) throw;
    }
    std::this_thread::sleep_for(config_.backoff * (1 << std::min(attempt, 10)));
  }
}

std::vector<GenOutcome> GenerationClient::generate_batch(std::span<const GenRequest> requests) const {
  std::vector<GenOutcome> outcomes(requests.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < requests.size(); i = next++) {
      auto& out = outcomes[i];
      try {
        out.response = generate(requests[i]);
      } catch (const RetryableError& e) {
        out.kind = ErrorKind::Retryable;
        out.error = e.what();
      } catch (const ProtocolError& e) {
        out.kind = ErrorKind::Protocol;
        out.error = e.what();
      } catch (const BackendError& e) {
        out.kind = ErrorKind::Backend;
        out.error = e.what();
      } catch (const std::exception& e) {
        out.kind = ErrorKind::Other;
        out.error = e.what();
      }
    }
  };

  const std::size_t workers = std::min(config_.parallelism, requests.size());
  if (workers <= 1) {
    worker();
    return outcomes;
  }
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return outcomes;
}

}  // namespace tabcap::gen
