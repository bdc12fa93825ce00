#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace semwm {

/// Lowercased runs of ASCII letters and digits; everything else separates.
/// Shared by the toy embedder, the toy generator, Ent-3 and the attacks.
std::vector<std::string> tokenize(std::string_view text);

/// Rule-based sentence segmentation used by both generation and detection.
///
/// A boundary follows a run of '.', '!' or '?' (plus any closing quotes or
/// brackets attached to it) when the next character is whitespace or the end
/// of the text. Segments are trimmed and never empty. Text without a
/// boundary comes back as a single segment. Abbreviations are not special.
std::vector<std::string> split_sentences(std::string_view text);

/// Joins sentences with single spaces; split_sentences(join_sentences(s)) == s
/// for segments produced by split_sentences.
std::string join_sentences(const std::vector<std::string>& sentences);

std::string_view trim(std::string_view text);

}  // namespace semwm
