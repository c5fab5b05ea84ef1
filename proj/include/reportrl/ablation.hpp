#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "reportrl/eval.hpp"
#include "reportrl/grpo.hpp"

namespace reportrl {

struct AblationRow {
  std::string arm;  // "untrained" or a reward arm name
  EvalReport report;
};

// Trains every reward arm with the shared seed from cfg and evaluates each
// against the eval corpus; the untrained baseline row comes first.
inline std::vector<AblationRow> run_ablation(const GRPOConfig& cfg,
                                             const std::vector<Study>& train_corpus,
                                             const std::vector<Study>& eval_corpus,
                                             const Lexicon& lex = default_lexicon()) {
  std::vector<AblationRow> rows;
  rows.push_back({"untrained", evaluate_policy(uniform_policy(), eval_corpus, cfg, lex)});
  for (RewardArm arm : kAllRewardArms) {
    GRPOConfig arm_cfg = cfg;
    arm_cfg.arm = arm;
    const TrainState state = train_run(arm_cfg, train_corpus, lex);
    rows.push_back({std::string(to_string(arm)),
                    evaluate_policy(state.current, eval_corpus, cfg, lex)});
  }
  return rows;
}

inline std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::string csv = "arm,precision,recall,f1,mean_mccs,format_rate\n";
  for (const AblationRow& row : rows) {
    char line[256];
    std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%.6f,%.6f,%.6f\n", row.arm.c_str(),
                  row.report.precision, row.report.recall, row.report.f1, row.report.mean_mccs,
                  row.report.format_rate);
    csv += line;
  }
  return csv;
}

inline void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << ablation_csv(rows);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace reportrl
