#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "criteria.hpp"
#include "semwm_cli/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "semwm");
  std::ostringstream out, err;
  const int code = semwm::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("semwm-cli-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::vector<json> rows(const std::string& path) {
  std::vector<json> out;
  std::istringstream in(slurp(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

// A small corpus and partition shared by several cases.
struct Fitted {
  TempDir dir;
  Fitted() {
    REQUIRE(cli({"--seed", "9", "generate", "--no-watermark", "--id-prefix", "corpus", "--count", "60",
                 "--out", dir / "corpus.jsonl"})
                .code == 0);
    REQUIRE(cli({"--seed", "9", "fit", "--corpus", dir / "corpus.jsonl", "--out", dir / "km.json",
                 "--restarts", "2"})
                .code == 0);
  }
};

}  // namespace

TEST_CASE("help on every command") {
  const auto top = cli({"--help"});
  CHECK(top.code == 0);
  for (const char* cmd : {"fit", "generate", "attack", "detect", "evaluate", "selftest"}) {
    CHECK(top.out.find(cmd) != std::string::npos);
    const auto r = cli({cmd, "--help"});
    CHECK_MESSAGE(r.code == 0, cmd);
    CHECK_MESSAGE(r.out.find("Usage") != std::string::npos, cmd);
  }
}

TEST_CASE("parse and configuration errors exit 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"fit", "--bogus"}).code == 2);
  CHECK(cli({"fit", "--out", "x.json", "--mode", "grid"}).code == 2);
  CHECK(cli({"fit", "--mode", "kmeans"}).code == 2);  // --out is required
  TempDir dir;
  CHECK(cli({"fit", "--out", dir / "p.json"}).code == 2);  // k-means needs a corpus
  CHECK(cli({"fit", "--mode", "lsh", "--d", "25", "--out", dir / "p.json"}).code == 2);
  CHECK(cli({"--config", dir / "missing.ini", "fit", "--out", dir / "p.json"}).code == 2);
  const auto r = cli({"generate", "--out", dir / "d.jsonl", "--gamma", "1.5",
                      "--partition", dir / "nothing.json"});
  CHECK(r.code != 0);
}

TEST_CASE("file errors exit 3") {
  TempDir dir;
  const auto missing = cli({"fit", "--corpus", dir / "missing.jsonl", "--out", dir / "p.json"});
  CHECK(missing.code == 3);
  CHECK_FALSE(missing.err.empty());
  spit(dir / "bad.jsonl", "{\"text\": \"ok.\"}\nnot json\n");
  const auto bad = cli({"fit", "--corpus", dir / "bad.jsonl", "--out", dir / "p.json"});
  CHECK(bad.code == 3);
  CHECK(bad.err.find(":2") != std::string::npos);
  spit(dir / "notext.jsonl", "{\"body\": \"ok.\"}\n");
  CHECK(cli({"fit", "--corpus", dir / "notext.jsonl", "--out", dir / "p.json"}).code == 3);
  spit(dir / "part.json", "{\"version\": 1");
  spit(dir / "docs.jsonl", "{\"doc_id\":\"a\",\"text\":\"One. Two.\"}\n");
  CHECK(cli({"detect", "--partition", dir / "part.json", "--in", dir / "docs.jsonl", "--out",
             dir / "o.jsonl"})
            .code == 3);
}

TEST_CASE("empty corpus and too few sentences fail") {
  TempDir dir;
  spit(dir / "empty.jsonl", "");
  const auto empty = cli({"fit", "--corpus", dir / "empty.jsonl", "--out", dir / "p.json"});
  CHECK(empty.code != 0);
  CHECK(empty.err.find("no sentences") != std::string::npos);
  spit(dir / "tiny.jsonl", "{\"text\":\"Knights guarded the tower. Chefs baked the bread.\"}\n");
  const auto tiny = cli({"fit", "--corpus", dir / "tiny.jsonl", "--out", dir / "p.json", "--k", "8"});
  CHECK(tiny.code != 0);
  CHECK_FALSE(fs::exists(dir / "p.json"));
}

TEST_CASE("dimension mismatch exits 4") {
  Fitted f;
  REQUIRE(cli({"generate", "--no-watermark", "--count", "3", "--out", f.dir / "docs.jsonl"}).code == 0);
  const auto r = cli({"--dim", "32", "detect", "--partition", f.dir / "km.json", "--in",
                      f.dir / "docs.jsonl", "--out", f.dir / "o.jsonl"});
  CHECK(r.code == 4);
  CHECK(r.err.find("dimension") != std::string::npos);
}

TEST_CASE("fit writes a loadable partition and a summary") {
  Fitted f;
  const auto p = json::parse(slurp(f.dir / "km.json"));
  CHECK(p["type"] == "kmeans");
  CHECK(p["k"] == 8);
  CHECK(p["dim"] == 64);
  const auto lsh = cli({"fit", "--mode", "lsh", "--d", "3", "--out", f.dir / "lsh.json"});
  REQUIRE(lsh.code == 0);
  const auto summary = json::parse(lsh.out);
  CHECK(summary["regions"] == 8);
  CHECK(json::parse(slurp(f.dir / "lsh.json"))["d"] == 3);
}

TEST_CASE("config file, environment and flags") {
  TempDir dir;
  auto seed_of = [&](std::vector<std::string> args) {
    args.insert(args.end(), {"fit", "--mode", "lsh", "--out", dir / "p.json"});
    const auto r = cli(args);
    REQUIRE(r.code == 0);
    return json::parse(r.out)["fit_seed"].get<std::uint64_t>();
  };
  const auto s1 = seed_of({"--seed", "1"});
  const auto s2 = seed_of({"--seed", "2"});
  const auto s3 = seed_of({"--seed", "3"});
  REQUIRE(s1 != s2);

  spit(dir / "run.ini", "seed=2\n");
  CHECK(seed_of({"--config", dir / "run.ini"}) == s2);
  CHECK(seed_of({"--config", dir / "run.ini", "--seed", "1"}) == s1);

  ::setenv("SEMWM_SEED", "3", 1);
  CHECK(seed_of({}) == s3);
  CHECK(seed_of({"--config", dir / "run.ini"}) == s3);
  CHECK(seed_of({"--seed", "1"}) == s1);
  ::unsetenv("SEMWM_SEED");

  spit(dir / "sub.ini", "[fit]\nd=4\n");
  const auto r = cli({"--config", dir / "sub.ini", "fit", "--mode", "lsh", "--out", dir / "p.json"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["regions"] == 16);
}

TEST_CASE("generate, detect and trace outputs") {
  Fitted f;
  REQUIRE(cli({"--seed", "9", "generate", "--partition", f.dir / "km.json", "--count", "4",
               "--sentences", "6", "--out", f.dir / "wm.jsonl", "--trace", f.dir / "trace.jsonl"})
              .code == 0);
  const auto docs = rows(f.dir / "wm.jsonl");
  REQUIRE(docs.size() == 4);
  CHECK(docs[0]["doc_id"] == "doc-0");
  const auto trace = rows(f.dir / "trace.jsonl");
  CHECK(trace.size() == 4 * 7);
  REQUIRE(cli({"detect", "--partition", f.dir / "km.json", "--in", f.dir / "wm.jsonl", "--out",
               f.dir / "det.jsonl"})
              .code == 0);
  for (const auto& row : rows(f.dir / "det.jsonl")) {
    CHECK(row["s_t"] == 6);
    CHECK(row["s_v"] == 6);
    CHECK(row["z"].get<double>() == doctest::Approx(std::sqrt(18.0)));
    CHECK(row["valid_flags"].size() == 6);
  }
}

TEST_CASE("user prompts file") {
  Fitted f;
  spit(f.dir / "prompts.jsonl",
       "{\"doc_id\":\"p1\",\"text\":\"The salty sailor steered the harbor.\"}\n"
       "{\"doc_id\":\"p2\",\"text\":\"Knights guarded the royal tower.\"}\n");
  REQUIRE(cli({"generate", "--partition", f.dir / "km.json", "--prompts", f.dir / "prompts.jsonl",
               "--sentences", "3", "--out", f.dir / "wm.jsonl"})
              .code == 0);
  const auto docs = rows(f.dir / "wm.jsonl");
  REQUIRE(docs.size() == 2);
  CHECK(docs[0]["text"].get<std::string>().starts_with("The salty sailor steered the harbor."));
}

TEST_CASE("full pipeline smoke") {
  TempDir dir;
  const auto files = semwm::acceptance::run_pipeline(dir.path, 77, 2);
  for (const char* name : {"corpus.jsonl", "partition.json", "watermarked.jsonl", "trace.jsonl",
                           "human.jsonl", "attacked.jsonl", "similarities.jsonl",
                           "detect_watermarked.jsonl", "detect_attacked.jsonl", "detect_human.jsonl",
                           "roc.csv", "report.json"}) {
    CHECK_MESSAGE(files.contains(name), name);
  }
  const auto report = json::parse(files.at("report.json"));
  CHECK(report["n_pos"] == 50);
  CHECK(report["n_neg"] == 50);
  CHECK(report["auc"].get<double>() >= 0.9);
  CHECK(report["tp@1%"].is_number());
  CHECK(report["ent3"].get<double>() > 0.0);
  CHECK(report["sem_ent"]["bits"].is_number());
  CHECK(report["efficiency"]["candidates_per_sentence"].get<double>() >= 1.0);
  CHECK(report["attack_similarity"].get<double>() > 0.5);
  CHECK(files.at("roc.csv").starts_with("threshold,fpr,tpr\n"));
}

TEST_CASE("identical runs produce identical bytes") {
  TempDir a, b;
  const auto first = semwm::acceptance::run_pipeline(a.path, 5, 3);
  const auto second = semwm::acceptance::run_pipeline(b.path, 5, 3);
  CHECK(first == second);
}

TEST_CASE("external embedder through exec handle") {
  Fitted f;
  const std::string handle = std::string("exec:") + FAKE_ENDPOINT;
  REQUIRE(cli({"generate", "--no-watermark", "--count", "3", "--out", f.dir / "docs.jsonl"}).code == 0);
  REQUIRE(cli({"detect", "--partition", f.dir / "km.json", "--in", f.dir / "docs.jsonl", "--out",
               f.dir / "local.jsonl"})
              .code == 0);
  const auto r = cli({"--embedder", handle, "detect", "--partition", f.dir / "km.json", "--in",
                      f.dir / "docs.jsonl", "--out", f.dir / "remote.jsonl"});
  REQUIRE(r.code == 0);
  CHECK(slurp(f.dir / "local.jsonl") == slurp(f.dir / "remote.jsonl"));

  const auto bad = cli({"--embedder", handle + " --mode wrong-count", "detect", "--partition",
                        f.dir / "km.json", "--in", f.dir / "docs.jsonl", "--out", f.dir / "x.jsonl"});
  CHECK(bad.code == 4);
  const auto hang = cli({"--embedder", handle + " --mode hang", "--timeout-ms", "200", "detect",
                         "--partition", f.dir / "km.json", "--in", f.dir / "docs.jsonl", "--out",
                         f.dir / "x.jsonl"});
  CHECK(hang.code == 4);
  CHECK(cli({"--embedder", "ftp://nowhere", "detect", "--partition", f.dir / "km.json", "--in",
             f.dir / "docs.jsonl", "--out", f.dir / "x.jsonl"})
            .code == 2);
}

TEST_CASE("external generator through exec handle") {
  Fitted f;
  const std::string handle = std::string("exec:") + FAKE_ENDPOINT;
  REQUIRE(cli({"generate", "--partition", f.dir / "km.json", "--count", "2", "--sentences", "4",
               "--generator", handle, "--out", f.dir / "wm.jsonl"})
              .code == 0);
  REQUIRE(cli({"detect", "--partition", f.dir / "km.json", "--in", f.dir / "wm.jsonl", "--out",
               f.dir / "det.jsonl"})
              .code == 0);
  for (const auto& row : rows(f.dir / "det.jsonl")) CHECK(row["s_v"] == row["s_t"]);
}

TEST_CASE("installed binary") {
  TempDir dir;
  auto status = [](const std::string& cmd) {
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  const std::string tool = SEMWM_TOOL;
  CHECK(status(tool + " --help > /dev/null") == 0);
  CHECK(status(tool + " > /dev/null 2>&1") == 2);
  CHECK(status(tool + " fit --corpus " + (dir / "missing.jsonl") + " --out " + (dir / "p.json") +
               " 2> /dev/null") == 3);
  CHECK(status(tool + " fit --mode lsh --out " + (dir / "p.json") + " > /dev/null") == 0);
  CHECK(fs::exists(dir / "p.json"));
}
