#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace semwm::acceptance {

struct Outcome {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

Outcome z_score_oracle();
Outcome null_calibration();
Outcome round_trip();
Outcome robustness_ordering();
Outcome efficiency_ordering();
Outcome kmeans_properties();
Outcome auc_oracle();
Outcome determinism();
Outcome metric_oracles();

std::vector<Outcome> run_all();

/// One line per outcome; returns true when all passed.
bool report(const std::vector<Outcome>& outcomes, std::ostream& out);

/// fit -> generate -> attack -> detect -> evaluate through the CLI, in
/// `dir`. Returns every produced file (and the captured stdout) by name.
std::map<std::string, std::string> run_pipeline(const std::filesystem::path& dir,
                                                std::uint64_t seed, unsigned threads);

}  // namespace semwm::acceptance
