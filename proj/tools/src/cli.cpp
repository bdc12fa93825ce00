#include "semwm_cli/cli.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "semwm/attacks.hpp"
#include "semwm/detection.hpp"
#include "semwm/error.hpp"
#include "semwm/evaluation.hpp"
#include "semwm/generation.hpp"
#include "semwm/partition.hpp"
#include "semwm/rng.hpp"
#include "semwm/text.hpp"
#include "semwm_cli/corpus.hpp"
#include "semwm_cli/handles.hpp"
#include "semwm_cli/parallel.hpp"

namespace semwm::cli {

using nlohmann::json;

namespace {

SelftestRunner& selftest_runner() {
  static SelftestRunner runner;
  return runner;
}

struct Globals {
  std::uint64_t seed = 0;
  std::string embedder = "toy";
  std::size_t dim = kDefaultToyDim;
  std::uint64_t embed_seed = 0;
  unsigned threads = 0;
  int timeout_ms = 30000;

  std::shared_ptr<const Embedder> open_embedder() const {
    return make_embedder(embedder, dim, embed_seed, std::chrono::milliseconds(timeout_ms));
  }
};

struct FitOptions {
  std::string corpus;
  std::string out;
  std::string mode = "kmeans";
  std::size_t k = 8;
  std::size_t d = 3;
  int max_iters = 100;
  double tol = 1e-6;
  int restarts = 1;
  std::size_t limit = 0;
};

struct WatermarkOptions {
  double gamma = 0.25;
  double margin = 0.035;
  std::uint64_t prime = kDefaultPrime;
  int n_max = 100;

  WatermarkConfig config(const Partition& p) const {
    WatermarkConfig c;
    c.gamma = gamma;
    c.margin = margin;
    c.prime = prime;
    c.n_max = n_max;
    c.mode = mode_of(p);
    c.validate(region_count(p));
    return c;
  }
};

struct GenerateOptions {
  std::string partition;
  std::string out;
  std::string trace;
  std::string prompts;
  std::string generator = "toy";
  std::string id_prefix = "doc";
  std::size_t count = 50;
  int sentences = 20;
  double spread = 1.0;
  bool no_watermark = false;
};

struct AttackOptions {
  std::string in;
  std::string out;
  std::string similarities;
  std::string method = "lexical";
  double strength = 0.2;
  double target_similarity = 0.8;
};

struct DetectOptions {
  std::string partition;
  std::string in;
  std::string out;
};

struct EvaluateOptions {
  std::string positive;
  std::string negative;
  std::string out;
  std::string roc;
  std::string docs;
  std::string traces;
  std::string similarities;
  std::vector<double> fprs{0.01, 0.05};
  std::size_t sem_ent_k = kDefaultSemEntClusters;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
      return kExitConfig;
    case ErrorCode::kIo:
    case ErrorCode::kFormat:
      return kExitIo;
    case ErrorCode::kContract:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kProtocol:
    case ErrorCode::kTransport:
    case ErrorCode::kTimeout:
      return kExitContract;
    default:
      return kExitFailure;
  }
}

std::string env_name(const std::string& flag) {
  std::string name = "SEMWM_";
  for (char c : flag.substr(flag.find_first_not_of('-'))) {
    name.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return name;
}

// CLI11 applies the config file before the environment; dropping config
// entries whose variable is set lets the environment override the file.
class EnvFirstConfig : public CLI::ConfigINI {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    std::erase_if(items, [](const CLI::ConfigItem& item) {
      // Section markers have non-alphanumeric names.
      if (item.name.empty() || !std::isalnum(static_cast<unsigned char>(item.name.front()))) {
        return false;
      }
      return std::getenv(env_name(item.name).c_str()) != nullptr;
    });
    return items;
  }
};

template <class T>
CLI::Option* option(CLI::App* app, const std::string& flag, T& value, const std::string& help) {
  return app->add_option(flag, value, help)->envname(env_name(flag))->capture_default_str();
}

std::string percent_label(double fpr) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", fpr * 100.0);
  return std::string("tp@") + buf + "%";
}

std::vector<Embedding> embed_all(const Embedder& embedder, const std::vector<std::string>& texts,
                                 unsigned threads) {
  constexpr std::size_t kBatch = 256;
  const std::size_t batches = (texts.size() + kBatch - 1) / kBatch;
  std::vector<std::vector<Embedding>> parts(batches);
  parallel_for(batches, threads, [&](std::size_t b) {
    const std::size_t lo = b * kBatch;
    const std::size_t hi = std::min(texts.size(), lo + kBatch);
    parts[b] = embedder.embed_batch(std::span<const std::string>(texts.data() + lo, hi - lo));
  });
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (auto& p : parts) {
    for (auto& e : p) out.push_back(std::move(e));
  }
  return out;
}

void check_dims(const Partition& p, const Embedder& embedder) {
  if (dim_of(p) != embedder.dim()) {
    fail(ErrorCode::kDimensionMismatch,
         "partition has dimension " + std::to_string(dim_of(p)) + " but the embedder produces " +
             std::to_string(embedder.dim()));
  }
}

// ---------------------------------------------------------------------------

void cmd_fit(const Globals& g, const FitOptions& o, std::ostream& out) {
  const PartitionMode mode = parse_partition_mode(o.mode);
  const auto embedder = g.open_embedder();
  const std::uint64_t fit_seed = derive_seed(g.seed, "fit");
  json summary;
  if (mode == PartitionMode::kLsh) {
    if (o.d < 1 || o.d > LSHPartition::kMaxHyperplanes) {
      fail(ErrorCode::kConfig, "--d must lie in [1, " +
                                   std::to_string(LSHPartition::kMaxHyperplanes) + "]");
    }
    const Partition p = fit_lsh(o.d, embedder->dim(), fit_seed);
    save_partition(p, o.out);
    summary = {{"mode", "lsh"}, {"d", o.d}, {"regions", region_count(p)},
               {"dim", embedder->dim()}, {"fit_seed", fit_seed}};
  } else {
    if (o.corpus.empty()) fail(ErrorCode::kConfig, "k-means fitting needs --corpus");
    std::vector<std::string> sentences;
    for (const auto& doc : read_documents(o.corpus)) {
      for (auto& s : split_sentences(doc.text)) sentences.push_back(std::move(s));
    }
    if (o.limit > 0 && sentences.size() > o.limit) sentences.resize(o.limit);
    if (sentences.empty()) fail(ErrorCode::kInsufficientData, "corpus contains no sentences");
    const auto points = embed_all(*embedder, sentences, g.threads);
    KMeansOptions ko;
    ko.k = o.k;
    ko.seed = fit_seed;
    ko.max_iters = o.max_iters;
    ko.tol = o.tol;
    ko.restarts = o.restarts;
    const KMeansFit fit = fit_kmeans(points, ko);
    save_partition(Partition{fit.partition}, o.out);
    summary = {{"mode", "kmeans"},
               {"k", o.k},
               {"regions", o.k},
               {"dim", embedder->dim()},
               {"sentences", sentences.size()},
               {"inertia", fit.partition.inertia()},
               {"iterations", fit.iterations},
               {"converged", fit.converged},
               {"fit_seed", fit_seed}};
  }
  out << summary.dump() << '\n';
}

void cmd_generate(const Globals& g, const WatermarkOptions& w, const GenerateOptions& o,
                  std::ostream& out) {
  if (o.sentences < 1) fail(ErrorCode::kConfig, "--sentences must be at least 1");
  std::optional<Partition> partition;
  std::optional<WatermarkConfig> config;
  std::shared_ptr<const Embedder> embedder;
  if (!o.no_watermark) {
    if (o.partition.empty()) fail(ErrorCode::kConfig, "watermarked generation needs --partition");
    partition = load_partition(o.partition);
    config = w.config(*partition);
    embedder = g.open_embedder();
    check_dims(*partition, *embedder);
  }

  std::vector<std::string> prompts;
  if (!o.prompts.empty()) {
    for (auto& d : read_documents(o.prompts)) prompts.push_back(std::move(d.text));
  } else {
    const ToyLanguageModel prompt_source(
        {derive_seed(derive_seed(g.seed, "prompts"), o.id_prefix), 1.0});
    for (std::size_t i = 0; i < o.count; ++i) prompts.push_back(prompt_source.prompt(i));
  }

  ToyLmOptions lm_options;
  // Streams are keyed by the id prefix so one master seed can produce a fit
  // corpus, human documents and watermarked documents that all differ.
  lm_options.seed =
      derive_seed(derive_seed(g.seed, o.no_watermark ? "human" : "generator"), o.id_prefix);
  lm_options.spread = o.spread;
  const auto lm = make_generator(o.generator, lm_options, std::chrono::milliseconds(g.timeout_ms));

  std::vector<Document> docs(prompts.size());
  std::vector<GenerationTrace> traces(o.no_watermark ? 0 : prompts.size());
  parallel_for(prompts.size(), g.threads, [&](std::size_t i) {
    Document& d = docs[i];
    d.doc_id = o.id_prefix + "-" + std::to_string(i);
    if (o.no_watermark) {
      std::vector<std::string> all{std::string(trim(prompts[i]))};
      for (auto& s : generate_plain(*lm, prompts[i], o.sentences)) all.push_back(std::move(s));
      d.text = join_sentences(all);
    } else {
      traces[i] = generate_watermarked(*lm, *embedder, *partition, *config, prompts[i],
                                       o.sentences);
      d.text = traces[i].document();
    }
  });
  write_documents(o.out, docs);

  json summary{{"documents", docs.size()}, {"watermarked", !o.no_watermark}};
  if (!o.no_watermark) {
    if (!o.trace.empty()) {
      std::string content;
      for (std::size_t i = 0; i < traces.size(); ++i) {
        content += trace_to_jsonl(traces[i], docs[i].doc_id);
      }
      write_file(o.trace, content);
    }
    const EfficiencyReport e = efficiency_stats(traces);
    summary["sentences"] = e.sentences;
    summary["candidates"] = e.candidates;
    summary["fallbacks"] = e.fallbacks;
  }
  out << summary.dump() << '\n';
}

void cmd_attack(const Globals& g, const AttackOptions& o, std::ostream& out) {
  AttackConfig base;
  base.method = parse_attack_method(o.method);
  base.strength = o.strength;
  base.target_similarity = o.target_similarity;
  if (!(o.strength >= 0.0 && o.strength <= 1.0)) {
    fail(ErrorCode::kConfig, "--strength must lie in [0, 1]");
  }
  if (!(o.target_similarity > 0.0 && o.target_similarity <= 1.0)) {
    fail(ErrorCode::kConfig, "--target-similarity must lie in (0, 1]");
  }
  const auto embedder = g.open_embedder();
  const auto docs = read_documents(o.in);
  const std::uint64_t attack_seed = derive_seed(g.seed, "attack");

  std::vector<Document> attacked(docs.size());
  std::vector<AttackedDocument> results(docs.size());
  parallel_for(docs.size(), g.threads, [&](std::size_t i) {
    AttackConfig c = base;
    c.seed = derive_seed(attack_seed, docs[i].doc_id);
    results[i] = attack_document(docs[i].text, c, *embedder);
    attacked[i] = Document{docs[i].doc_id, results[i].text};
  });
  write_documents(o.out, attacked);

  double total = 0.0;
  std::size_t n = 0;
  std::vector<json> sidecar;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& sims = results[i].similarities;
    double doc_total = 0.0;
    for (double s : sims) doc_total += s;
    total += doc_total;
    n += sims.size();
    sidecar.push_back(json{{"doc_id", docs[i].doc_id},
                           {"similarities", sims},
                           {"mean", sims.empty() ? 1.0 : doc_total / sims.size()}});
  }
  if (!o.similarities.empty()) write_jsonl(o.similarities, sidecar);
  out << json{{"documents", docs.size()},
              {"method", std::string(to_string(base.method))},
              {"strength", o.strength},
              {"mean_similarity", n == 0 ? 1.0 : total / n}}
             .dump()
      << '\n';
}

void cmd_detect(const Globals& g, const WatermarkOptions& w, const DetectOptions& o,
                std::ostream& out) {
  const Partition partition = load_partition(o.partition);
  const WatermarkConfig config = w.config(partition);
  const auto embedder = g.open_embedder();
  check_dims(partition, *embedder);
  const auto docs = read_documents(o.in);

  std::vector<DetectionResult> results(docs.size());
  parallel_for(docs.size(), g.threads, [&](std::size_t i) {
    results[i] = detect(docs[i].text, *embedder, partition, config);
  });

  std::vector<json> rows;
  double total = 0.0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& r = results[i];
    total += r.z;
    rows.push_back(json{{"doc_id", docs[i].doc_id},
                        {"s_t", r.sentence_count},
                        {"s_v", r.valid_count},
                        {"z", r.z},
                        {"valid_flags", r.valid_flags()}});
  }
  write_jsonl(o.out, rows);
  out << json{{"documents", docs.size()},
              {"mean_z", docs.empty() ? 0.0 : total / docs.size()},
              {"null_rate", results.empty() ? 0.0 : results.front().null_rate}}
             .dump()
      << '\n';
}

std::vector<double> read_scores(const std::string& path) {
  std::vector<double> z;
  for (const auto& row : read_jsonl(path)) {
    if (!row.contains("z") || !row["z"].is_number()) {
      fail(ErrorCode::kFormat, path + ": detection row lacks a numeric \"z\"");
    }
    z.push_back(row["z"].get<double>());
  }
  return z;
}

void cmd_evaluate(const Globals& g, const EvaluateOptions& o, std::ostream& out) {
  for (double f : o.fprs) {
    if (!(f > 0.0 && f < 1.0)) fail(ErrorCode::kConfig, "--fpr values must lie in (0, 1)");
  }
  const auto pos = read_scores(o.positive);
  const auto neg = read_scores(o.negative);
  const RocReport roc = roc_report(pos, neg, o.fprs);

  json report;
  report["n_pos"] = roc.n_pos;
  report["n_neg"] = roc.n_neg;
  report["auc"] = roc.auc;
  for (const auto& [fpr, tpr] : roc.tp_at) report[percent_label(fpr)] = tpr;

  json thresholds = json::array();
  for (const auto& t : calibrate_thresholds(neg, o.fprs).entries) {
    thresholds.push_back(json{{"target_fpr", t.target_fpr},
                              {"threshold", t.threshold},
                              {"achieved_fpr", t.achieved_fpr},
                              {"saturated", t.saturated}});
  }
  report["thresholds"] = thresholds;

  report["ent3"] = nullptr;
  report["sem_ent"] = nullptr;
  if (!o.docs.empty()) {
    std::vector<std::string> texts;
    for (auto& d : read_documents(o.docs)) texts.push_back(std::move(d.text));
    report["ent3"] = ent3(texts);
    const auto embedder = g.open_embedder();
    const SemEntResult se = sem_ent(texts, *embedder, o.sem_ent_k, derive_seed(g.seed, "sem-ent"));
    report["sem_ent"] = json{{"bits", se.bits},
                             {"k", o.sem_ent_k},
                             {"degenerate", se.degenerate},
                             {"embedder", se.embedder_note}};
  }

  report["efficiency"] = nullptr;
  if (!o.traces.empty()) {
    const auto traces = traces_from_jsonl(read_file(o.traces));
    const EfficiencyReport e = efficiency_stats(traces);
    report["efficiency"] = json{{"sentences", e.sentences},
                                {"candidates", e.candidates},
                                {"rejections", e.rejections},
                                {"fallbacks", e.fallbacks},
                                {"candidates_per_sentence", e.candidates_per_sentence},
                                {"blocked_share", e.blocked_share},
                                {"margin_share", e.margin_share},
                                {"degenerate_share", e.degenerate_share},
                                {"fallback_rate", e.fallback_rate}};
  }

  report["attack_similarity"] = nullptr;
  if (!o.similarities.empty()) {
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& row : read_jsonl(o.similarities)) {
      for (const auto& s : row.at("similarities")) {
        total += s.get<double>();
        ++n;
      }
    }
    report["attack_similarity"] = n == 0 ? json(nullptr) : json(total / n);
  }

  // Need external scorers.
  report["ppl"] = nullptr;
  report["bertscore"] = nullptr;

  if (!o.roc.empty()) {
    std::string csv = "threshold,fpr,tpr\n";
    char line[128];
    for (const auto& p : roc_curve(pos, neg)) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", p.threshold, p.fpr, p.tpr);
      csv += line;
    }
    write_file(o.roc, csv);
  }

  const std::string text = report.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    write_file(o.out, text);
  }
}

}  // namespace

void set_selftest_runner(SelftestRunner runner) { selftest_runner() = std::move(runner); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sentence-level semantic watermarking: fit, generate, attack, detect, evaluate."};
  app.name(args.empty() ? "semwm" : args.front());
  app.set_config("--config", "", "key=value configuration file; flags override it");
  app.config_formatter(std::make_shared<EnvFirstConfig>());
  app.require_subcommand(1, 1);
  app.fallthrough();

  Globals g;
  option(&app, "--seed", g.seed, "Master seed; every sub-seed derives from it");
  option(&app, "--embedder", g.embedder, "toy | exec:<command> | http://host:port/path");
  option(&app, "--dim", g.dim, "Embedding dimension")->check(CLI::Range(2, 1 << 20));
  option(&app, "--embed-seed", g.embed_seed, "Hash seed of the toy embedder");
  option(&app, "--threads", g.threads, "Worker threads (0 = all cores)");
  option(&app, "--timeout-ms", g.timeout_ms, "Per-request timeout for external endpoints")
      ->check(CLI::PositiveNumber);

  auto add_watermark = [](CLI::App* sub, WatermarkOptions& w, bool generation) {
    option(sub, "--gamma", w.gamma, "Valid-region ratio");
    option(sub, "--prime", w.prime, "Prime multiplier of the region seed");
    if (generation) {
      option(sub, "--margin", w.margin, "Rejection margin");
      option(sub, "--n-max", w.n_max, "Candidate budget per sentence");
    }
  };

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a k-means or LSH partition");
  option(fit_cmd, "--corpus", fit.corpus, "JSON-lines corpus of {\"text\": ...}");
  option(fit_cmd, "--out", fit.out, "Partition file to write")->required();
  option(fit_cmd, "--mode", fit.mode, "kmeans | lsh")->check(CLI::IsMember({"kmeans", "lsh"}));
  option(fit_cmd, "--k", fit.k, "Number of k-means clusters");
  option(fit_cmd, "--d", fit.d, "Number of LSH hyperplanes");
  option(fit_cmd, "--max-iters", fit.max_iters, "Lloyd iteration cap");
  option(fit_cmd, "--tol", fit.tol, "Convergence tolerance on centroid movement");
  option(fit_cmd, "--restarts", fit.restarts, "Independent k-means++ restarts");
  option(fit_cmd, "--limit", fit.limit, "Use at most this many sentences (0 = all)");

  WatermarkOptions gen_w;
  GenerateOptions gen;
  auto* gen_cmd = app.add_subcommand("generate", "Generate documents, watermarked or plain");
  option(gen_cmd, "--partition", gen.partition, "Partition file");
  option(gen_cmd, "--out", gen.out, "Documents to write (JSON lines)")->required();
  option(gen_cmd, "--trace", gen.trace, "Generation traces to write (JSON lines)");
  option(gen_cmd, "--prompts", gen.prompts, "Prompts file; default draws toy prompts");
  option(gen_cmd, "--generator", gen.generator, "toy | exec:<command> | http://host:port/path");
  option(gen_cmd, "--id-prefix", gen.id_prefix, "Prefix of generated doc_id values");
  option(gen_cmd, "--count", gen.count, "Documents to generate without --prompts");
  option(gen_cmd, "--sentences", gen.sentences, "Sentences per document after the prompt");
  option(gen_cmd, "--spread", gen.spread, "Toy generator topic re-draw probability");
  gen_cmd->add_flag("--no-watermark", gen.no_watermark, "Plain generation")
      ->envname("SEMWM_NO_WATERMARK");
  add_watermark(gen_cmd, gen_w, true);

  AttackOptions atk;
  auto* atk_cmd = app.add_subcommand("attack", "Paraphrase documents sentence by sentence");
  option(atk_cmd, "--in", atk.in, "Documents to attack")->required();
  option(atk_cmd, "--out", atk.out, "Attacked documents to write")->required();
  option(atk_cmd, "--similarities", atk.similarities, "Per-sentence similarity sidecar");
  option(atk_cmd, "--method", atk.method, "lexical | resample")
      ->check(CLI::IsMember({"lexical", "resample"}));
  option(atk_cmd, "--strength", atk.strength, "Attack strength in [0, 1]");
  option(atk_cmd, "--target-similarity", atk.target_similarity, "Resample target similarity");

  WatermarkOptions det_w;
  DetectOptions det;
  auto* det_cmd = app.add_subcommand("detect", "Score documents for the watermark");
  option(det_cmd, "--partition", det.partition, "Partition file")->required();
  option(det_cmd, "--in", det.in, "Documents to score")->required();
  option(det_cmd, "--out", det.out, "Detections to write (JSON lines)")->required();
  add_watermark(det_cmd, det_w, false);

  EvaluateOptions ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "ROC and quality report");
  option(ev_cmd, "--positive", ev.positive, "Detections of machine text")->required();
  option(ev_cmd, "--negative", ev.negative, "Detections of human text")->required();
  option(ev_cmd, "--out", ev.out, "Report file (default stdout)");
  option(ev_cmd, "--roc", ev.roc, "ROC points as CSV");
  option(ev_cmd, "--docs", ev.docs, "Documents for Ent-3 and Sem-Ent");
  option(ev_cmd, "--traces", ev.traces, "Generation traces for efficiency statistics");
  option(ev_cmd, "--similarities", ev.similarities, "Attack similarity sidecar");
  option(ev_cmd, "--fpr", ev.fprs, "False-positive rates for TP@FPR")->delimiter(',');
  option(ev_cmd, "--sem-ent-k", ev.sem_ent_k, "Clusters for Sem-Ent");

  auto* self_cmd = app.add_subcommand("selftest", "Run the built-in oracle checks");

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (fit_cmd->parsed()) {
      cmd_fit(g, fit, out);
    } else if (gen_cmd->parsed()) {
      cmd_generate(g, gen_w, gen, out);
    } else if (atk_cmd->parsed()) {
      cmd_attack(g, atk, out);
    } else if (det_cmd->parsed()) {
      cmd_detect(g, det_w, det, out);
    } else if (ev_cmd->parsed()) {
      cmd_evaluate(g, ev, out);
    } else if (self_cmd->parsed()) {
      if (!selftest_runner()) {
        err << "semwm: selftest is not available in this build\n";
        return kExitFailure;
      }
      return selftest_runner()(out) ? kExitOk : kExitFailure;
    }
  } catch (const Error& e) {
    err << "semwm: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "semwm: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace semwm::cli
