#include <sstream>

#include <json.hpp>

#include "semwm/error.hpp"
#include "semwm/generation.hpp"

namespace semwm {

using nlohmann::json;

namespace {

json config_to_json(const WatermarkConfig& c) {
  return json{{"gamma", c.gamma},
              {"margin", c.margin},
              {"prime", c.prime},
              {"n_max", c.n_max},
              {"mode", std::string(to_string(c.mode))}};
}

WatermarkConfig config_from_json(const json& j) {
  WatermarkConfig c;
  c.gamma = j.at("gamma").get<double>();
  c.margin = j.at("margin").get<double>();
  c.prime = j.at("prime").get<std::uint64_t>();
  c.n_max = j.at("n_max").get<int>();
  c.mode = parse_partition_mode(j.at("mode").get<std::string>());
  return c;
}

}  // namespace

std::string trace_to_jsonl(const GenerationTrace& trace, const std::string& doc_id) {
  std::string out;
  out += json{{"kind", "header"},
              {"doc_id", doc_id},
              {"prompt", trace.prompt},
              {"config", config_to_json(trace.config)}}
             .dump();
  out.push_back('\n');
  std::size_t r = 0;
  for (std::size_t i = 0; i < trace.sentences.size(); ++i) {
    const auto& s = trace.sentences[i];
    const int step = static_cast<int>(i) + 1;
    json rejections = json::array();
    while (r < trace.rejections.size() && trace.rejections[r].step == step) {
      rejections.push_back(json{{"try", trace.rejections[r].try_index},
                                {"reason", std::string(to_string(trace.rejections[r].reason))}});
      ++r;
    }
    out += json{{"kind", "step"},
                {"doc_id", doc_id},
                {"step", step},
                {"text", s.text},
                {"region", s.region.value},
                {"accepted_on_try", s.accepted_on_try},
                {"fallback", s.fallback},
                {"rejections", std::move(rejections)}}
               .dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<GenerationTrace> traces_from_jsonl(std::string_view text) {
  std::vector<GenerationTrace> traces;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      const auto kind = j.at("kind").get<std::string>();
      if (kind == "header") {
        GenerationTrace t;
        t.prompt = j.at("prompt").get<std::string>();
        t.config = config_from_json(j.at("config"));
        traces.push_back(std::move(t));
      } else if (kind == "step") {
        if (traces.empty()) fail(ErrorCode::kFormat, "step line before any header");
        auto& t = traces.back();
        const int step = j.at("step").get<int>();
        t.sentences.push_back(TraceSentence{j.at("text").get<std::string>(),
                                            RegionIndex{j.at("region").get<std::uint32_t>()},
                                            j.at("accepted_on_try").get<int>(),
                                            j.at("fallback").get<bool>()});
        for (const auto& r : j.at("rejections")) {
          t.rejections.push_back(Rejection{step, r.at("try").get<int>(),
                                           parse_rejection_reason(r.at("reason").get<std::string>())});
        }
      } else {
        fail(ErrorCode::kFormat, "unknown trace line kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      fail(ErrorCode::kFormat, "trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return traces;
}

}  // namespace semwm
