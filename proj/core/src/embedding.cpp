#include "convseg/embedding.hpp"

#include <set>

#include "convseg/error.hpp"
#include "convseg/json_io.hpp"
#include "json_util.hpp"

namespace convseg {

using detail::json;

std::string_view embedding_key(std::string_view text) {
  const auto end = text.find_last_not_of(" \t\r\n\f\v");
  return end == std::string_view::npos ? std::string_view{} : text.substr(0, end + 1);
}

void EmbeddingFile::validate() const {
  if (dim == 0) throw ValidationError("embedding file has dim 0");
  std::set<std::string_view> keys;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].vector.size() != dim) {
      throw ValidationError("embedding file entry " + std::to_string(i) + " has length " +
                            std::to_string(entries[i].vector.size()) + " but dim is " + std::to_string(dim) +
                            " (inconsistent dimension)");
    }
    if (!keys.insert(embedding_key(entries[i].text)).second) {
      throw ValidationError("embedding file has duplicate key '" + entries[i].text + "'");
    }
  }
}

EmbeddingFile parse_embedding_file(std::string_view text) {
  const json doc = detail::parse_json(text, "embedding file");
  EmbeddingFile file;
  file.dim = detail::require_as<std::size_t>(doc, "dim", "embedding file");
  const json& entries = detail::require(doc, "entries", "embedding file");
  if (!entries.is_array()) throw ValidationError("embedding file.entries is not an array");
  for (const json& e : entries) {
    file.entries.push_back({detail::require_as<std::string>(e, "text", "embedding entry"),
                            detail::to_vector(detail::require(e, "vector", "embedding entry"), "embedding vector")});
  }
  file.validate();
  return file;
}

std::string embedding_file_to_json(const EmbeddingFile& file) {
  json entries = json::array();
  for (const auto& e : file.entries) entries.push_back({{"text", e.text}, {"vector", e.vector}});
  return json{{"dim", file.dim}, {"entries", std::move(entries)}}.dump();
}

EmbeddingFile load_embedding_file(const std::filesystem::path& path) {
  return parse_embedding_file(read_text_file(path));
}

void save_embedding_file(const EmbeddingFile& file, const std::filesystem::path& path) {
  file.validate();
  write_text_file(path, embedding_file_to_json(file));
}

FileEmbeddingProvider::FileEmbeddingProvider(EmbeddingFile store) : dim_(store.dim) {
  store.validate();
  index_.reserve(store.entries.size());
  for (auto& e : store.entries) {
    index_.emplace(std::string(embedding_key(e.text)), Embedding::unit(e.vector));
  }
}

std::vector<Embedding> FileEmbeddingProvider::embed(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) {
    auto it = index_.find(std::string(embedding_key(t)));
    if (it == index_.end()) throw ValidationError("text missing from embedding store: '" + t + "'");
    out.push_back(it->second);
  }
  return out;
}

std::vector<Embedding> embed_texts(std::span<const std::string> texts, const EmbeddingProvider& provider) {
  if (texts.empty()) throw ValidationError("embed_texts called with no texts");
  std::vector<Embedding> out = provider.embed(texts);
  if (out.size() != texts.size()) {
    throw ServiceError("provider returned " + std::to_string(out.size()) + " embeddings for " +
                       std::to_string(texts.size()) + " texts");
  }
  const std::size_t dim = provider.dim() != 0 ? provider.dim() : out.front().dim();
  require_dim(out, dim, "embedding");
  return out;
}

}  // namespace convseg
