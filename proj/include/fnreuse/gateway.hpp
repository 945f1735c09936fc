#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "fnreuse/extraction.hpp"

namespace fnreuse {

// Connection settings for an OpenAI-compatible endpoint. The API key is only
// ever read from the environment variable named by api_key_env.
struct ProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string model_name = "gpt-4o";
  double temperature = 0.0;
  double timeout_s = 60.0;
  int max_retries = 3;
  int max_inflight = 4;
  double backoff_initial_s = 0.5;
  double backoff_max_s = 8.0;
  std::size_t embed_batch_size = 64;

  // Throws ConfigError on a negative temperature or retry count, or a
  // non-positive max_inflight / batch size.
  void validate() const;
};

struct GatewayTelemetry {
  std::size_t requests = 0;   // HTTP attempts sent
  std::size_t retries = 0;    // attempts beyond the first, over all calls
  std::size_t max_observed_inflight = 0;
  std::vector<double> backoff_delays_s;  // in the order they were slept
};

// Thread-safe client for POST {base}/chat/completions and {base}/embeddings.
// 429, 5xx, timeouts and connection failures are retried with exponential
// backoff; other 4xx responses fail immediately. At most max_inflight HTTP
// requests are outstanding at once.
class ModelGateway {
 public:
  // Throws ConfigError when the key variable is unset, before any network I/O.
  explicit ModelGateway(ProviderConfig cfg);
  ~ModelGateway();
  ModelGateway(const ModelGateway&) = delete;
  ModelGateway& operator=(const ModelGateway&) = delete;

  // Single-turn request; returns choices[0].message.content verbatim.
  std::string chat_complete(const std::string& prompt);
  // One vector per input, in input order, batched by embed_batch_size.
  std::vector<Vector> embed_remote(const std::vector<std::string>& texts);

  const ProviderConfig& config() const { return cfg_; }
  GatewayTelemetry telemetry() const;

 private:
  struct Impl;
  std::string post_json(const std::string& path, const std::string& body);

  ProviderConfig cfg_;
  std::string api_key_;
  std::unique_ptr<Impl> impl_;
};

class RemoteExtractor : public ExtractionProvider {
 public:
  explicit RemoteExtractor(std::shared_ptr<ModelGateway> gateway) : gateway_(std::move(gateway)) {}

  std::string complete(const std::string& subject_id, const std::string& prompt) override;
  std::string name() const override { return "remote"; }
  std::string model() const override { return gateway_->config().model_name; }
  double temperature() const override { return gateway_->config().temperature; }

 private:
  std::shared_ptr<ModelGateway> gateway_;
};

class RemoteEmbedder : public Embedder {
 public:
  RemoteEmbedder(std::shared_ptr<ModelGateway> gateway, std::size_t dimension = kDefaultEmbeddingDim)
      : gateway_(std::move(gateway)), dimension_(dimension) {}

  std::size_t dimension() const override { return dimension_; }
  std::vector<Vector> embed(const std::vector<std::string>& texts) override;
  std::string name() const override { return "remote"; }

 private:
  std::shared_ptr<ModelGateway> gateway_;
  std::size_t dimension_;
};

}  // namespace fnreuse
