#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "reportrl/errors.hpp"
#include "reportrl/grpo.hpp"
#include "reportrl/sections.hpp"

namespace reportrl {

// Run configuration for the train/ablate subcommands: optimizer settings plus
// corpus and output paths, read from a flat TOML-style key = value file.
struct RunConfig {
  GRPOConfig grpo;
  std::string train_corpus;
  std::string eval_corpus;           // required by ablate only
  std::string params_out = "params.json";
  std::string history_out = "history.csv";
  std::string manifest_out = "manifest.json";
  std::string ablation_out = "ablation.csv";
};

namespace detail {

inline std::string strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

inline std::string unquote(std::string_view v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + value + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a nonnegative integer, got '" + value +
                      "'");
  }
}

}  // namespace detail

inline RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = detail::strip_comment(line);
    const auto body = detail::trimmed(stripped);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(detail::trimmed(body.substr(0, eq)));
    const std::string value = detail::unquote(detail::trimmed(body.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    }

    if (key == "seed") cfg.grpo.seed = detail::parse_u64(key, value);
    else if (key == "steps") cfg.grpo.steps = detail::parse_u64(key, value);
    else if (key == "batch_size") cfg.grpo.batch_size = detail::parse_u64(key, value);
    else if (key == "group_size") cfg.grpo.group_size = detail::parse_u64(key, value);
    else if (key == "clip_eps") cfg.grpo.clip_eps = detail::parse_double(key, value);
    else if (key == "kl_beta") cfg.grpo.kl_beta = detail::parse_double(key, value);
    else if (key == "adv_eps") cfg.grpo.adv_eps = detail::parse_double(key, value);
    else if (key == "learning_rate") cfg.grpo.learning_rate = detail::parse_double(key, value);
    else if (key == "w_clinical") cfg.grpo.w_clinical = detail::parse_double(key, value);
    else if (key == "w_format") cfg.grpo.w_format = detail::parse_double(key, value);
    else if (key == "margin") cfg.grpo.margin = detail::parse_double(key, value);
    else if (key == "noise") cfg.grpo.noise = detail::parse_double(key, value);
    else if (key == "arm") cfg.grpo.arm = reward_arm_from_string(value);
    else if (key == "train_corpus") cfg.train_corpus = value;
    else if (key == "eval_corpus") cfg.eval_corpus = value;
    else if (key == "params_out") cfg.params_out = value;
    else if (key == "history_out") cfg.history_out = value;
    else if (key == "manifest_out") cfg.manifest_out = value;
    else if (key == "ablation_out") cfg.ablation_out = value;
    else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  cfg.grpo.validate();
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return parse_run_config(in);
}

inline nlohmann::json run_config_to_json(const RunConfig& cfg) {
  return nlohmann::json{
      {"seed", cfg.grpo.seed},
      {"steps", cfg.grpo.steps},
      {"batch_size", cfg.grpo.batch_size},
      {"group_size", cfg.grpo.group_size},
      {"clip_eps", cfg.grpo.clip_eps},
      {"kl_beta", cfg.grpo.kl_beta},
      {"adv_eps", cfg.grpo.adv_eps},
      {"learning_rate", cfg.grpo.learning_rate},
      {"w_clinical", cfg.grpo.w_clinical},
      {"w_format", cfg.grpo.w_format},
      {"margin", cfg.grpo.margin},
      {"noise", cfg.grpo.noise},
      {"arm", std::string(to_string(cfg.grpo.arm))},
      {"train_corpus", cfg.train_corpus},
      {"eval_corpus", cfg.eval_corpus},
      {"params_out", cfg.params_out},
      {"history_out", cfg.history_out},
      {"manifest_out", cfg.manifest_out},
      {"ablation_out", cfg.ablation_out},
  };
}

// step,mean_reward,mean_mccs,format_rate,kl — one row per optimizer step.
inline std::string history_csv(const std::vector<StepMetrics>& history) {
  std::string csv = "step,mean_reward,mean_mccs,format_rate,kl\n";
  for (const StepMetrics& m : history) {
    char line[256];
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g,%.17g\n", m.step, m.mean_reward,
                  m.mean_mccs, m.format_rate, m.kl);
    csv += line;
  }
  return csv;
}

inline void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace reportrl
