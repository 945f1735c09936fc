#include "fnreuse/gateway.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <semaphore>
#include <thread>

#include "fnreuse/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace fnreuse {

using nlohmann::json;

void ProviderConfig::validate() const {
  if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (max_inflight < 1) throw ConfigError("max_inflight must be >= 1");
  if (embed_batch_size < 1) throw ConfigError("embed_batch_size must be >= 1");
  if (!(timeout_s > 0.0)) throw ConfigError("timeout_s must be > 0");
  if (api_key_env.empty()) throw ConfigError("api_key_env must name an environment variable");
  if (base_url.rfind("http://", 0) != 0 && base_url.rfind("https://", 0) != 0)
    throw ConfigError("base_url must start with http:// or https://: '" + base_url + "'");
}

struct ModelGateway::Impl {
  explicit Impl(int max_inflight) : slots(max_inflight) {}

  std::counting_semaphore<> slots;
  std::atomic<std::size_t> inflight{0};
  std::string origin;       // scheme://host[:port]
  std::string path_prefix;  // e.g. "/v1"

  mutable std::mutex mu;
  GatewayTelemetry telemetry;
};

ModelGateway::ModelGateway(ProviderConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const char* key = std::getenv(cfg_.api_key_env.c_str());
  if (key == nullptr || *key == '\0')
    throw ConfigError("environment variable " + cfg_.api_key_env + " is not set");
  api_key_ = key;

  impl_ = std::make_unique<Impl>(cfg_.max_inflight);
  auto scheme_end = cfg_.base_url.find("://") + 3;
  auto path_start = cfg_.base_url.find('/', scheme_end);
  if (path_start == std::string::npos) {
    impl_->origin = cfg_.base_url;
  } else {
    impl_->origin = cfg_.base_url.substr(0, path_start);
    impl_->path_prefix = cfg_.base_url.substr(path_start);
    while (!impl_->path_prefix.empty() && impl_->path_prefix.back() == '/')
      impl_->path_prefix.pop_back();
  }
}

ModelGateway::~ModelGateway() = default;

GatewayTelemetry ModelGateway::telemetry() const {
  std::lock_guard lock(impl_->mu);
  return impl_->telemetry;
}

std::string ModelGateway::post_json(const std::string& path, const std::string& body) {
  const std::string url_path = impl_->path_prefix + path;
  int last_status = 0;
  std::string last_error;

  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double delay = std::min(cfg_.backoff_initial_s * std::pow(2.0, attempt - 1), cfg_.backoff_max_s);
      {
        std::lock_guard lock(impl_->mu);
        impl_->telemetry.retries++;
        impl_->telemetry.backoff_delays_s.push_back(delay);
      }
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }

    httplib::Result res;
    {
      struct SlotGuard {
        Impl& impl;
        explicit SlotGuard(Impl& i) : impl(i) { impl.slots.acquire(); }
        ~SlotGuard() {
          --impl.inflight;
          impl.slots.release();
        }
      } guard(*impl_);
      const auto now = ++impl_->inflight;
      {
        std::lock_guard lock(impl_->mu);
        impl_->telemetry.requests++;
        impl_->telemetry.max_observed_inflight = std::max(impl_->telemetry.max_observed_inflight, now);
      }
      httplib::Client client(impl_->origin);
      const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
          std::chrono::duration<double>(cfg_.timeout_s));
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      client.set_bearer_token_auth(api_key_);
      res = client.Post(url_path, body, "application/json");
    }

    if (!res) {
      last_status = 0;
      last_error = httplib::to_string(res.error());
      continue;  // connection failures and timeouts are retryable
    }
    const int status = res->status;
    if (status >= 200 && status < 300) return res->body;
    last_status = status;
    last_error = "HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200);
    if (status == 429 || status >= 500) continue;
    throw TransportError("POST " + url_path + " rejected: " + last_error, false, status);
  }
  throw RetriesExhaustedError("POST " + url_path + " failed after " +
                                  std::to_string(cfg_.max_retries) + " retries: " + last_error,
                              last_status);
}

std::string ModelGateway::chat_complete(const std::string& prompt) {
  json req = {{"model", cfg_.model_name},
              {"temperature", cfg_.temperature},
              {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
  const auto body = post_json("/chat/completions", req.dump());
  try {
    auto doc = json::parse(body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("unexpected chat completion response: ") + e.what());
  }
}

std::vector<Vector> ModelGateway::embed_remote(const std::vector<std::string>& texts) {
  if (texts.empty()) throw ValidationError("embed_remote: no input texts");
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += cfg_.embed_batch_size) {
    const auto end = std::min(texts.size(), start + cfg_.embed_batch_size);
    json input = json::array();
    for (std::size_t i = start; i < end; ++i) input.push_back(texts[i]);
    json req = {{"model", cfg_.model_name}, {"input", input}};
    const auto body = post_json("/embeddings", req.dump());

    std::vector<Vector> batch(end - start);
    try {
      auto doc = json::parse(body);
      const auto& data = doc.at("data");
      if (data.size() != batch.size())
        throw IntegrityError("embeddings response has " + std::to_string(data.size()) +
                             " vectors for " + std::to_string(batch.size()) + " inputs");
      for (std::size_t i = 0; i < data.size(); ++i) {
        const std::size_t slot = data[i].contains("index") ? data[i]["index"].get<std::size_t>() : i;
        if (slot >= batch.size() || !batch[slot].empty())
          throw IntegrityError("embeddings response has a bad index");
        batch[slot] = data[i].at("embedding").get<Vector>();
      }
    } catch (const json::exception& e) {
      throw ParseError(std::string("unexpected embeddings response: ") + e.what());
    }
    for (auto& v : batch) out.push_back(std::move(v));
  }
  for (const auto& v : out)
    if (v.size() != out.front().size())
      throw IntegrityError("embedding dimensions differ within one request");
  return out;
}

std::string RemoteExtractor::complete(const std::string&, const std::string& prompt) {
  return gateway_->chat_complete(prompt);
}

std::vector<Vector> RemoteEmbedder::embed(const std::vector<std::string>& texts) {
  return gateway_->embed_remote(texts);
}

}  // namespace fnreuse
