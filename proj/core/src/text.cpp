#include "semwm/text.hpp"

namespace semwm {

namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(char c) {
  return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}';
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (is_word_char(c)) {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string_view trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return text.substr(b, e - b);
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto emit = [&](std::size_t end) {
    auto seg = trim(text.substr(start, end - start));
    if (!seg.empty()) out.emplace_back(seg);
    start = end;
  };
  while (i < n) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && is_terminal(text[j])) ++j;
    while (j < n && is_closer(text[j])) ++j;
    if (j == n || is_space(text[j])) emit(j);
    i = j;
  }
  if (start < n) emit(n);
  return out;
}

std::string join_sentences(const std::vector<std::string>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out.push_back(' ');
    out.append(s);
  }
  return out;
}

}  // namespace semwm
