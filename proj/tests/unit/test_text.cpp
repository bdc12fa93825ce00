#include <doctest.h>

#include "semwm/text.hpp"

using namespace semwm;
using V = std::vector<std::string>;

TEST_CASE("split_sentences examples") {
  CHECK(split_sentences("A b. C d!") == V{"A b.", "C d!"});
  CHECK(split_sentences("He said \"go.\" Then left.") == V{"He said \"go.\"", "Then left."});
  CHECK(split_sentences("no terminal") == V{"no terminal"});
}

TEST_CASE("split_sentences edge cases") {
  CHECK(split_sentences("").empty());
  CHECK(split_sentences("   ").empty());
  CHECK(split_sentences("Wait... what?!  Really.") == V{"Wait...", "what?!", "Really."});
  CHECK(split_sentences("3.14 is pi. Yes.") == V{"3.14 is pi.", "Yes."});
  CHECK(split_sentences("(Quoted.) Next one?") == V{"(Quoted.)", "Next one?"});
  CHECK(split_sentences("A.\nB.\tC.") == V{"A.", "B.", "C."});
  CHECK(split_sentences("trailing words. and more") == V{"trailing words.", "and more"});
}

TEST_CASE("join and split round trip") {
  const V sentences{"The king crowned the tower.", "Who steered the anchor?", "Go now!"};
  CHECK(split_sentences(join_sentences(sentences)) == sentences);
}

TEST_CASE("segments reproduce the input up to whitespace") {
  const std::string text = "  One two.  Three \"four.\"  Five!?  six ";
  std::string joined;
  for (const auto& s : split_sentences(text)) joined += s;
  std::string squeezed;
  for (char c : text) {
    if (c != ' ') squeezed.push_back(c);
  }
  std::string joined_squeezed;
  for (char c : joined) {
    if (c != ' ') joined_squeezed.push_back(c);
  }
  CHECK(joined_squeezed == squeezed);
}

TEST_CASE("tokenize") {
  CHECK(tokenize("Hello, World! x2") == V{"hello", "world", "x2"});
  CHECK(tokenize("...").empty());
  CHECK(tokenize("don't") == V{"don", "t"});
}

TEST_CASE("trim") {
  CHECK(trim("  a b \n") == "a b");
  CHECK(trim("").empty());
}
