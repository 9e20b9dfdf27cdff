#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "convseg/types.hpp"

namespace convseg {

/// On-disk text -> vector store:
///   {"dim": int, "entries": [{"text": str, "vector": [float]}]}
struct EmbeddingFile {
  struct Entry {
    std::string text;
    std::vector<double> vector;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  std::size_t dim = 0;
  std::vector<Entry> entries;

  /// Every vector has length dim, keys unique after trimming trailing whitespace.
  void validate() const;

  friend bool operator==(const EmbeddingFile&, const EmbeddingFile&) = default;
};

EmbeddingFile parse_embedding_file(std::string_view json);
std::string embedding_file_to_json(const EmbeddingFile& file);
EmbeddingFile load_embedding_file(const std::filesystem::path& path);
void save_embedding_file(const EmbeddingFile& file, const std::filesystem::path& path);

/// Lookup key used by file stores: the text with trailing whitespace removed.
std::string_view embedding_key(std::string_view text);

/// Source of sentence embeddings. Implementations return one unit-normalized
/// vector per input text, in input order.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::vector<Embedding> embed(std::span<const std::string> texts) const = 0;

  /// Expected output dimension, or 0 when not known in advance.
  virtual std::size_t dim() const noexcept = 0;
};

class FileEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit FileEmbeddingProvider(EmbeddingFile store);

  /// Throws ValidationError naming the first text missing from the store.
  std::vector<Embedding> embed(std::span<const std::string> texts) const override;
  std::size_t dim() const noexcept override { return dim_; }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, Embedding> index_;
};

struct ServiceConfig {
  /// Base URL, e.g. "http://localhost:8080" or "http://host/api"; requests go to {endpoint}/embed.
  std::string endpoint;
  std::string token;
  std::size_t batch_size = 64;
  std::chrono::milliseconds timeout{10000};
  /// Extra attempts after the first one for transient failures.
  int retries = 2;
  std::chrono::milliseconds retry_backoff{100};
  /// 0 accepts whatever dimension the service reports.
  std::size_t expected_dim = 0;

  void validate() const;

  /// Reads CONVSEG_EMBED_URL and CONVSEG_EMBED_TOKEN; unset variables leave fields empty.
  static ServiceConfig from_env();
};

/// Client for the embedding service:
///   POST {endpoint}/embed  {"texts": [str]}  ->  {"dim": int, "vectors": [[float]]}
/// with "Authorization: Bearer <token>" when a token is configured.
/// Connection failures, 5xx and 429 responses are retried; anything else fails fast.
/// Stateless between calls, so one instance may be shared across threads.
class ServiceEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit ServiceEmbeddingProvider(ServiceConfig config);

  std::vector<Embedding> embed(std::span<const std::string> texts) const override;
  std::size_t dim() const noexcept override { return config_.expected_dim; }

  const ServiceConfig& config() const noexcept { return config_; }

 private:
  std::vector<Embedding> embed_batch(std::span<const std::string> texts) const;

  ServiceConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

/// Embeds a non-empty list of texts through `provider`, checking count and
/// dimension consistency of the result.
std::vector<Embedding> embed_texts(std::span<const std::string> texts, const EmbeddingProvider& provider);

}  // namespace convseg
