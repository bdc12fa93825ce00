#include "semwm_cli/corpus.hpp"

#include <fstream>
#include <sstream>

#include "semwm/error.hpp"

namespace semwm::cli {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorCode::kIo, "cannot read " + path.string());
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  std::vector<json> rows;
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::parse_error&) {
      fail(ErrorCode::kFormat, path.string() + ":" + std::to_string(lineno) + ": not JSON");
    }
    if (!rows.back().is_object()) {
      fail(ErrorCode::kFormat, path.string() + ":" + std::to_string(lineno) + ": not an object");
    }
  }
  return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows) {
  std::string content;
  for (const auto& row : rows) {
    content += row.dump();
    content += '\n';
  }
  write_file(path, content);
}

std::vector<Document> read_documents(const std::filesystem::path& path) {
  std::vector<Document> docs;
  const auto rows = read_jsonl(path);
  docs.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (!row.contains("text") || !row["text"].is_string()) {
      fail(ErrorCode::kFormat, path.string() + ": row " + std::to_string(i + 1) +
                                   " lacks a \"text\" string");
    }
    Document d;
    d.text = row["text"].get<std::string>();
    if (row.contains("doc_id")) {
      d.doc_id = row["doc_id"].is_string() ? row["doc_id"].get<std::string>()
                                           : row["doc_id"].dump();
    } else {
      d.doc_id = std::to_string(i);
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

void write_documents(const std::filesystem::path& path, const std::vector<Document>& docs) {
  std::vector<json> rows;
  rows.reserve(docs.size());
  for (const auto& d : docs) rows.push_back(json{{"doc_id", d.doc_id}, {"text", d.text}});
  write_jsonl(path, rows);
}

}  // namespace semwm::cli
