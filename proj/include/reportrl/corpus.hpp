#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "reportrl/errors.hpp"
#include "reportrl/labeler.hpp"
#include "reportrl/labels.hpp"
#include "reportrl/render.hpp"
#include "reportrl/rng.hpp"

namespace reportrl {

inline constexpr int kCorpusGeneratorVersion = 1;

// One synthetic case: ground-truth labels plus the rendered reference report.
// Corpora are self-consistent by construction: label_report(reference_text)
// reproduces truth exactly.
struct Study {
  std::string id;
  LabelVector14 truth = all_blank_labels();
  std::string reference_text;
};

struct CorpusConfig {
  double prevalence = 0.3;      // P(finding is positive or uncertain), in (0, 1)
  double uncertain_frac = 0.15; // share of prevalent findings that are hedged, in [0, 1)

  void validate() const {
    if (!(prevalence > 0.0 && prevalence < 1.0)) {
      throw ConfigError("prevalence must lie in (0, 1)");
    }
    if (!(uncertain_frac >= 0.0 && uncertain_frac < 1.0)) {
      throw ConfigError("uncertain_frac must lie in [0, 1)");
    }
  }
};

// Each disease label is independently positive with probability
// prevalence*(1-uncertain_frac), uncertain with prevalence*uncertain_frac,
// and otherwise negative or blank with equal odds.
inline Study sample_study(std::uint64_t seed, double prevalence, double uncertain_frac,
                          std::string id = {}) {
  CorpusConfig cfg{prevalence, uncertain_frac};
  cfg.validate();
  Rng rng(seed);
  Study study;
  if (id.empty()) {
    char fallback[32];
    std::snprintf(fallback, sizeof(fallback), "study-%016llx",
                  static_cast<unsigned long long>(seed));
    study.id = fallback;
  } else {
    study.id = std::move(id);
  }
  for (std::size_t f = 0; f < kFindingCount; ++f) {
    const double u = rng.uniform();
    if (u < prevalence * (1.0 - uncertain_frac)) {
      study.truth[f] = LabelState::positive;
    } else if (u < prevalence) {
      study.truth[f] = LabelState::uncertain;
    } else if (u < prevalence + (1.0 - prevalence) / 2.0) {
      study.truth[f] = LabelState::negative;
    } else {
      study.truth[f] = LabelState::blank;
    }
  }
  study.truth[kNoFindingIndex] = derive_no_finding(study.truth);
  study.reference_text = render_reference(study.truth);
  return study;
}

inline Study sample_study(std::uint64_t seed, const CorpusConfig& cfg, std::string id = {}) {
  return sample_study(seed, cfg.prevalence, cfg.uncertain_frac, std::move(id));
}

inline nlohmann::json study_to_json(const Study& study) {
  nlohmann::json truth = nlohmann::json::array();
  for (LabelState s : study.truth) truth.push_back(std::string(to_string(s)));
  return nlohmann::json{
      {"id", study.id}, {"truth", truth}, {"reference", study.reference_text}};
}

inline Study study_from_json(const nlohmann::json& j) {
  Study study;
  study.id = j.at("id").get<std::string>();
  const auto& truth = j.at("truth");
  if (!truth.is_array() || truth.size() != kObservationCount) {
    throw StructuralError("study '" + study.id + "': truth must be a length-14 array");
  }
  for (std::size_t i = 0; i < kObservationCount; ++i) {
    study.truth[i] = label_state_from_string(truth.at(i).get<std::string>());
  }
  study.reference_text = j.at("reference").get<std::string>();
  return study;
}

inline std::vector<Study> make_corpus(std::size_t n, const CorpusConfig& cfg,
                                      std::uint64_t seed) {
  cfg.validate();
  std::vector<Study> corpus;
  corpus.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "s%06zu", i);
    Study study = sample_study(mix_seed(seed, i), cfg, id);
    if (label_report(study.reference_text) != study.truth) {
      throw NumericalFault("corpus self-consistency violated for study " + study.id);
    }
    corpus.push_back(std::move(study));
  }
  return corpus;
}

// JSONL: one manifest record first, then one study per line, stable order.
inline void write_corpus(const std::vector<Study>& corpus, const CorpusConfig& cfg,
                         std::uint64_t seed, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const nlohmann::json manifest{{"record", "manifest"},
                                {"generator_version", kCorpusGeneratorVersion},
                                {"n", corpus.size()},
                                {"seed", seed},
                                {"prevalence", cfg.prevalence},
                                {"uncertain_frac", cfg.uncertain_frac}};
  out << manifest.dump() << '\n';
  for (const Study& study : corpus) out << study_to_json(study).dump() << '\n';
  if (!out) throw IoError("failed writing corpus to '" + path + "'");
}

inline void generate_corpus(std::size_t n, const CorpusConfig& cfg, std::uint64_t seed,
                            const std::string& path) {
  if (n < 1) throw ConfigError("corpus size must be at least 1");
  write_corpus(make_corpus(n, cfg, seed), cfg, seed, path);
}

inline std::vector<Study> load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus '" + path + "'");
  std::vector<Study> corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trimmed(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw StructuralError("corpus '" + path + "' line " + std::to_string(line_no) + ": " +
                            e.what());
    }
    if (j.contains("record") && j.at("record") == "manifest") continue;
    try {
      corpus.push_back(study_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw StructuralError("corpus '" + path + "' line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  if (corpus.empty()) throw StructuralError("corpus '" + path + "' contains no studies");
  return corpus;
}

}  // namespace reportrl
