#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semwm {

/// One topical word pool of the toy domain. All content words are at least
/// four letters long and no four-letter stem is shared between topics.
struct ToyTopic {
  std::string name;
  std::vector<std::string> nouns;
  std::vector<std::string> verbs;  // past tense
  std::vector<std::string> adjectives;
  std::vector<std::string> places;
};

const std::vector<ToyTopic>& toy_topics();

/// Topic owning the most content words of `sentence`; ties go to the lowest
/// topic index. nullopt if no content word is recognized.
std::optional<std::size_t> toy_topic_of(std::string_view sentence);

using SynonymTable = std::map<std::string, std::vector<std::string>>;

/// Same-stem alternatives for every toy content word (plural or inflected
/// forms), so each substitution keeps the stem bucket of the toy embedder.
const SynonymTable& default_synonym_table();

}  // namespace semwm
