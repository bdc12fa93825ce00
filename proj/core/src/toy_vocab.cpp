#include "semwm/toy_vocab.hpp"

#include <unordered_map>

#include "semwm/text.hpp"

namespace semwm {

namespace {

// Each entry is "word/alternative/alternative"; the alternatives become the
// synonym table and contribute to topic lookup.
struct RawTopic {
  const char* name;
  std::vector<const char*> nouns, verbs, adjectives, places;
};

const std::vector<RawTopic>& raw_topics() {
  static const std::vector<RawTopic> topics = {
      {"sea",
       {"sailor/sailors", "captain/captains", "anchor/anchors"},
       {"steered/steers/steering", "drifted/drifts/drifting", "navigated/navigates/navigating"},
       {"salty/saltier", "stormy/stormier", "windy/windier"},
       {"harbor/harbors", "lagoon/lagoons", "shoreline/shorelines"}},
      {"space",
       {"astronaut/astronauts", "rocket/rockets", "comet/comets"},
       {"launched/launches/launching", "orbited/orbits/orbiting", "landed/lands/landing"},
       {"cosmic/cosmically", "radiant/radiantly", "silent/silently"},
       {"crater/craters", "nebula/nebulae", "spaceport/spaceports"}},
      {"forest",
       {"ranger/rangers", "hunter/hunters", "badger/badgers"},
       {"tracked/tracks/tracking", "hiked/hikes", "gathered/gathers/gathering"},
       {"mossy/mossier", "shady/shadier", "leafy/leafier"},
       {"clearing/clearings", "thicket/thickets", "woodland/woodlands"}},
      {"kitchen",
       {"chef/chefs", "baker/bakers", "butcher/butchers"},
       {"simmered/simmers/simmering", "baked/bakes", "roasted/roasts/roasting"},
       {"spicy/spicier", "crispy/crispier", "sweet/sweeter"},
       {"kitchen/kitchens", "bakery/bakeries", "pantry/pantries"}},
      {"music",
       {"violinist/violinists", "drummer/drummers", "singer/singers"},
       {"played/plays/playing", "tuned/tunes", "strummed/strums/strumming"},
       {"loud/louder", "mellow/mellower", "lively/livelier"},
       {"concert/concerts", "studio/studios", "theater/theaters"}},
      {"city",
       {"mayor/mayors", "banker/bankers", "lawyer/lawyers"},
       {"negotiated/negotiates/negotiating", "hurried/hurries", "traded/trades/trading"},
       {"hectic/hectically", "noisy/noisier", "dusty/dustier"},
       {"subway/subways", "avenue/avenues", "plaza/plazas"}},
      {"farm",
       {"farmer/farmers", "plow/plows", "goat/goats"},
       {"harvested/harvests/harvesting", "milked/milks/milking", "plowed/plows/plowing"},
       {"muddy/muddier", "sunny/sunnier", "rustic/rustically"},
       {"barn/barns", "pasture/pastures", "orchard/orchards"}},
      {"castle",
       {"knight/knights", "king/kings", "queen/queens"},
       {"guarded/guards/guarding", "besieged/besieges", "crowned/crowns/crowning"},
       {"royal/royally", "noble/nobler", "ancient/anciently"},
       {"castle/castles", "dungeon/dungeons", "tower/towers"}},
  };
  return topics;
}

std::vector<std::string> split_entry(std::string_view entry) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= entry.size()) {
    const auto slash = entry.find('/', start);
    const auto end = slash == std::string_view::npos ? entry.size() : slash;
    parts.emplace_back(entry.substr(start, end - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return parts;
}

struct Built {
  std::vector<ToyTopic> topics;
  SynonymTable synonyms;
  std::unordered_map<std::string, std::size_t> owner;
};

const Built& built() {
  static const Built b = [] {
    Built out;
    for (std::size_t t = 0; t < raw_topics().size(); ++t) {
      const auto& raw = raw_topics()[t];
      ToyTopic topic;
      topic.name = raw.name;
      auto load = [&](const std::vector<const char*>& entries, std::vector<std::string>& pool) {
        for (const char* e : entries) {
          auto parts = split_entry(e);
          pool.push_back(parts.front());
          for (const auto& p : parts) out.owner.emplace(p, t);
          if (parts.size() > 1) {
            out.synonyms[parts.front()] =
                std::vector<std::string>(parts.begin() + 1, parts.end());
          }
        }
      };
      load(raw.nouns, topic.nouns);
      load(raw.verbs, topic.verbs);
      load(raw.adjectives, topic.adjectives);
      load(raw.places, topic.places);
      out.topics.push_back(std::move(topic));
    }
    return out;
  }();
  return b;
}

}  // namespace

const std::vector<ToyTopic>& toy_topics() { return built().topics; }

const SynonymTable& default_synonym_table() { return built().synonyms; }

std::optional<std::size_t> toy_topic_of(std::string_view sentence) {
  const auto& owner = built().owner;
  std::vector<int> votes(toy_topics().size(), 0);
  bool any = false;
  for (const auto& token : tokenize(sentence)) {
    const auto it = owner.find(token);
    if (it == owner.end()) continue;
    ++votes[it->second];
    any = true;
  }
  if (!any) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t t = 1; t < votes.size(); ++t) {
    if (votes[t] > votes[best]) best = t;
  }
  return best;
}

}  // namespace semwm
