#include <cstdlib>
#include <thread>

#include "convseg/embedding.hpp"
#include "convseg/error.hpp"
#include "httplib.h"
#include "json_util.hpp"

namespace convseg {

using detail::json;

namespace {

struct SplitUrl {
  std::string scheme_host_port;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ValidationError("embedding endpoint '" + url + "' has no scheme");
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http") {
    throw ValidationError("embedding endpoint scheme '" + scheme + "' is not supported (http only)");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.scheme_host_port = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? std::string{} : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  if (out.scheme_host_port.size() <= scheme_end + 3) {
    throw ValidationError("embedding endpoint '" + url + "' has no host");
  }
  return out;
}

bool is_transient(int status) { return status == 429 || status >= 500; }

}  // namespace

void ServiceConfig::validate() const {
  if (endpoint.empty()) throw ValidationError("embedding service endpoint is not set (CONVSEG_EMBED_URL)");
  if (batch_size < 1) throw ValidationError("embedding service batch size must be >= 1");
  if (timeout.count() <= 0) throw ValidationError("embedding service timeout must be positive");
  if (retries < 0) throw ValidationError("embedding service retry count must be >= 0");
}

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig cfg;
  if (const char* url = std::getenv("CONVSEG_EMBED_URL")) cfg.endpoint = url;
  if (const char* token = std::getenv("CONVSEG_EMBED_TOKEN")) cfg.token = token;
  return cfg;
}

ServiceEmbeddingProvider::ServiceEmbeddingProvider(ServiceConfig config) : config_(std::move(config)) {
  config_.validate();
  SplitUrl parts = split_url(config_.endpoint);
  scheme_host_port_ = std::move(parts.scheme_host_port);
  path_prefix_ = std::move(parts.path);
}

std::vector<Embedding> ServiceEmbeddingProvider::embed(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (std::size_t pos = 0; pos < texts.size(); pos += config_.batch_size) {
    const std::size_t n = std::min(config_.batch_size, texts.size() - pos);
    std::vector<Embedding> batch = embed_batch(texts.subspan(pos, n));
    for (Embedding& e : batch) out.push_back(std::move(e));
  }
  return out;
}

std::vector<Embedding> ServiceEmbeddingProvider::embed_batch(std::span<const std::string> texts) const {
  const std::string body = json{{"texts", std::vector<std::string>(texts.begin(), texts.end())}}.dump();
  const std::string path = path_prefix_ + "/embed";

  httplib::Client client(scheme_host_port_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  if (!config_.token.empty()) client.set_bearer_token_auth(config_.token);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.retry_backoff * attempt);
    auto res = client.Post(path, body, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP status " + std::to_string(res->status);
      if (is_transient(res->status)) continue;
      throw ServiceError("embedding service at " + config_.endpoint + " rejected the request: " + last_error);
    }

    json doc;
    try {
      doc = json::parse(res->body);
    } catch (const json::parse_error& e) {
      throw ServiceError(std::string("malformed embedding service response: ") + e.what());
    }
    try {
      const auto dim = detail::require_as<std::size_t>(doc, "dim", "service response");
      const json& vecs = detail::require(doc, "vectors", "service response");
      if (!vecs.is_array() || vecs.size() != texts.size()) {
        throw ValidationError("service response has " + std::to_string(vecs.is_array() ? vecs.size() : 0) +
                              " vectors for " + std::to_string(texts.size()) + " texts");
      }
      if (config_.expected_dim != 0 && dim != config_.expected_dim) {
        throw ValidationError("service dimension " + std::to_string(dim) + " does not match configured " +
                              std::to_string(config_.expected_dim));
      }
      std::vector<Embedding> out;
      out.reserve(texts.size());
      for (const json& v : vecs) {
        std::vector<double> values = detail::to_vector(v, "service vector");
        if (values.size() != dim) throw ValidationError("service vector length differs from reported dim");
        out.push_back(Embedding::unit(values));
      }
      return out;
    } catch (const ValidationError& e) {
      throw ServiceError(std::string("malformed embedding service response: ") + e.what());
    }
  }
  throw ServiceError("embedding service at " + config_.endpoint + " unreachable after " +
                     std::to_string(config_.retries + 1) + " attempts (" + last_error + ")");
}

}  // namespace convseg
