#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reportrl/ablation.hpp"
#include "reportrl/config.hpp"
#include "reportrl/corpus.hpp"
#include "reportrl/eval.hpp"
#include "reportrl/grpo.hpp"
#include "reportrl/labeler.hpp"
#include "reportrl/policy.hpp"

namespace reportrl::cli {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline nlohmann::json load_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError("'" + path + "': " + e.what());
  }
}

namespace detail {

inline Lexicon resolve_lexicon(const std::string& path) {
  if (path.empty()) return default_lexicon();
  return lexicon_from_json(load_json_file(path));
}

inline int run_generate(std::size_t n, std::uint64_t seed, const CorpusConfig& corpus_cfg,
                        const std::string& out_path, std::ostream& out) {
  generate_corpus(n, corpus_cfg, seed, out_path);
  out << nlohmann::json{{"written", out_path}, {"n", n}, {"seed", seed}}.dump() << '\n';
  return 0;
}

inline int run_label(const std::string& report_path, const std::string& lexicon_path,
                     std::ostream& out) {
  const Lexicon lex = resolve_lexicon(lexicon_path);
  const LabelVector14 labels = label_report(read_text_file(report_path), lex);
  nlohmann::json j = nlohmann::json::array();
  for (LabelState s : labels) j.push_back(std::string(to_string(s)));
  out << j.dump() << '\n';
  return 0;
}

inline int run_score(const std::string& gen_path, const std::string& ref_path, double margin_value,
                     const std::string& lexicon_path, std::ostream& out) {
  const Lexicon lex = resolve_lexicon(lexicon_path);
  const std::string gen_text = read_text_file(gen_path);
  const std::string ref_text = read_text_file(ref_path);
  const Margin margin(margin_value);

  const LabelVector14 gen_labels = label_report(gen_text, lex);
  const LabelVector14 ref_labels = label_report(ref_text, lex);
  const SignedVector13 a = to_signed_vector(gen_labels);
  const SignedVector13 b = to_signed_vector(ref_labels);
  const double ccs_value = ccs(a, b);
  const double mccs_value = mccs(a, b, margin);
  const double format_value = format_reward(gen_text);
  const RewardBreakdown breakdown = total_reward(mccs_value, format_value);

  out << nlohmann::json{
             {"ccs", ccs_value},
             {"mccs", mccs_value},
             {"format", format_value},
             {"ce_f1", ce_f1_reward(gen_labels, ref_labels)},
             {"nlg", nlg_reward(extract_sections(gen_text).report_body,
                                extract_sections(ref_text).report_body)},
             {"total", breakdown.total},
         }.dump()
      << '\n';
  return 0;
}

inline int run_train(const std::string& config_path, std::ostream& out) {
  const RunConfig cfg = load_run_config(config_path);
  if (cfg.train_corpus.empty()) throw ConfigError("config: train_corpus is required");
  const std::vector<Study> corpus = load_corpus(cfg.train_corpus);
  const TrainState state = train_run(cfg.grpo, corpus);

  write_text_file(cfg.params_out, params_to_json(state.current).dump(2) + "\n");
  write_text_file(cfg.history_out, history_csv(state.history));
  nlohmann::json manifest{{"config", run_config_to_json(cfg)},
                          {"seed", cfg.grpo.seed},
                          {"train_studies", corpus.size()}};
  write_text_file(cfg.manifest_out, manifest.dump(2) + "\n");

  nlohmann::json summary{{"steps", state.history.size()},
                         {"params_out", cfg.params_out},
                         {"history_out", cfg.history_out}};
  if (!state.history.empty()) {
    summary["final_mean_reward"] = state.history.back().mean_reward;
    summary["final_format_rate"] = state.history.back().format_rate;
  }
  out << summary.dump() << '\n';
  return 0;
}

inline int run_evaluate(const std::string& params_path, const std::string& corpus_path,
                        const std::string& out_path, const GRPOConfig& cfg, std::ostream& out) {
  const PolicyParams params = params_from_json(load_json_file(params_path));
  const std::vector<Study> corpus = load_corpus(corpus_path);
  const EvalReport report = evaluate_policy(params, corpus, cfg);
  const std::string body = eval_report_to_json(report).dump(2) + "\n";
  if (!out_path.empty()) write_text_file(out_path, body);
  out << body;
  return 0;
}

inline int run_ablate(const std::string& config_path, std::ostream& out) {
  const RunConfig cfg = load_run_config(config_path);
  if (cfg.train_corpus.empty()) throw ConfigError("config: train_corpus is required");
  if (cfg.eval_corpus.empty()) throw ConfigError("config: eval_corpus is required");
  const std::vector<Study> train = load_corpus(cfg.train_corpus);
  const std::vector<Study> eval = load_corpus(cfg.eval_corpus);
  const auto rows = run_ablation(cfg.grpo, train, eval);
  write_ablation_csv(rows, cfg.ablation_out);
  out << ablation_csv(rows);
  return 0;
}

}  // namespace detail

// Entry point shared by the binary and the in-process CLI tests. `args`
// excludes the program name. On failure a machine-readable error object is
// written to `err` and a nonzero code is returned.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Desk-scale reinforcement learning for structured report generation"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate-data", "Generate a synthetic study corpus (JSONL)");
  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 1;
  CorpusConfig corpus_cfg;
  std::string gen_out;
  gen->add_option("--n", gen_n, "number of studies")->required();
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output JSONL path")->required();
  gen->add_option("--prevalence", corpus_cfg.prevalence, "per-finding prevalence");
  gen->add_option("--uncertain-frac", corpus_cfg.uncertain_frac,
                  "hedged share of prevalent findings");

  auto* label = app.add_subcommand("label", "Extract the 14-label vector from a report file");
  std::string label_file, label_lexicon;
  label->add_option("file", label_file, "report text file")->required();
  label->add_option("--lexicon", label_lexicon, "lexicon JSON (defaults to the built-in one)");

  auto* score = app.add_subcommand("score", "Score a generated report against a reference");
  std::string score_gen, score_ref, score_lexicon;
  double score_margin = GRPOConfig{}.margin;
  score->add_option("--gen", score_gen, "generated report file")->required();
  score->add_option("--ref", score_ref, "reference report file")->required();
  score->add_option("--margin", score_margin, "margin for the shaped cosine reward");
  score->add_option("--lexicon", score_lexicon, "lexicon JSON");

  auto* train = app.add_subcommand("train", "Run GRPO training from a config file");
  std::string train_config;
  train->add_option("--config", train_config, "key = value config file")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate saved policy params on a corpus");
  std::string eval_params, eval_corpus, eval_out;
  GRPOConfig eval_cfg;
  evaluate->add_option("--params", eval_params, "policy params JSON")->required();
  evaluate->add_option("--corpus", eval_corpus, "eval corpus JSONL")->required();
  evaluate->add_option("--out", eval_out, "report JSON output path");
  evaluate->add_option("--margin", eval_cfg.margin, "margin for the shaped cosine reward");
  evaluate->add_option("--noise", eval_cfg.noise, "observation noise rate");
  evaluate->add_option("--seed", eval_cfg.seed, "evaluation seed");

  auto* ablate = app.add_subcommand("ablate", "Train and evaluate every reward arm");
  std::string ablate_config;
  ablate->add_option("--config", ablate_config, "key = value config file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << nlohmann::json{{"error", {{"type", "usage_error"}, {"message", e.what()}}}}.dump()
        << '\n';
    return 2;
  }

  try {
    if (gen->parsed()) return detail::run_generate(gen_n, gen_seed, corpus_cfg, gen_out, out);
    if (label->parsed()) return detail::run_label(label_file, label_lexicon, out);
    if (score->parsed()) return detail::run_score(score_gen, score_ref, score_margin,
                                                  score_lexicon, out);
    if (train->parsed()) return detail::run_train(train_config, out);
    if (evaluate->parsed()) return detail::run_evaluate(eval_params, eval_corpus, eval_out,
                                                        eval_cfg, out);
    if (ablate->parsed()) return detail::run_ablate(ablate_config, out);
    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    err << nlohmann::json{{"error", {{"type", "config_error"}, {"message", e.what()}}}}.dump()
        << '\n';
  } catch (const StructuralError& e) {
    err << nlohmann::json{{"error", {{"type", "structural_error"}, {"message", e.what()}}}}.dump()
        << '\n';
  } catch (const NumericalFault& e) {
    err << nlohmann::json{{"error", {{"type", "numerical_fault"}, {"message", e.what()}}}}.dump()
        << '\n';
  } catch (const IoError& e) {
    err << nlohmann::json{{"error", {{"type", "io_error"}, {"message", e.what()}}}}.dump() << '\n';
  } catch (const std::exception& e) {
    err << nlohmann::json{{"error", {{"type", "internal_error"}, {"message", e.what()}}}}.dump()
        << '\n';
  }
  return 1;
}

}  // namespace reportrl::cli
