#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace semwm::cli {

struct Document {
  std::string doc_id;
  std::string text;
};

/// One JSON object per non-blank line. Throws kIo / kFormat.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);

/// Rows {"doc_id":..,"text":..}; a missing doc_id becomes the line index.
std::vector<Document> read_documents(const std::filesystem::path& path);
void write_documents(const std::filesystem::path& path, const std::vector<Document>& docs);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace semwm::cli
