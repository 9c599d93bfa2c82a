#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "phs/covers.hpp"
#include "phs/errors.hpp"
#include "phs/harness.hpp"
#include "phs/selection.hpp"

namespace phs {
namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed JSON in '" + path + "': " + e.what());
  }
  return j;
}

std::vector<Hypothesis> load_hypotheses(const std::string& path) {
  nlohmann::json j = load_json(path);
  if (!j.is_array() || j.empty())
    throw ParseError("'" + path + "' must be a nonempty JSON array of hypotheses");
  std::vector<Hypothesis> hyps;
  for (const auto& e : j) hyps.push_back(Hypothesis::from_json(e));
  return hyps;
}

void write_or_print(const nlohmann::json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

int cmd_select(const std::string& hyp_path, const std::string& data_path,
               const std::string& method, double alpha, double zeta, double beta,
               double epsilon, std::uint64_t seed, bool monte_carlo,
               std::size_t mc_samples) {
  std::vector<Hypothesis> hyps = load_hypotheses(hyp_path);
  Dataset d = dataset_from_json(load_json(data_path), hyps.front().domain());
  EstimatorConfig cfg;
  cfg.mode = monte_carlo ? EstimatorMode::MonteCarlo : EstimatorMode::Exact;
  cfg.mc_samples = mc_samples;
  cfg.seed = seed;
  SelectionParams params{alpha, zeta, beta, {epsilon, 0.0}};
  Rng rng(derive_seed(seed, 0xC11));

  SelectionReport rep;
  if (method == "phs") {
    rep = phs(hyps, d, params, cfg, rng);
  } else if (method == "naive") {
    rep = naive_laplace_select(hyps, d, params, cfg, rng);
  } else if (method == "dl") {
    const Hypothesis& h = dl_tournament_private(hyps, d, epsilon, rng, cfg);
    rep.chosen = h.id();
    rep.n_used = d.size();
    rep.budget_spent = {epsilon, 0.0};
  } else if (method == "semi-agnostic") {
    rep = semi_agnostic_select(hyps, d, alpha, beta, epsilon, cfg, rng, zeta);
  } else {
    throw CLI::ValidationError("--method must be phs, naive, dl, or semi-agnostic");
  }

  nlohmann::json out;
  out["chosen"] = rep.chosen;
  out["score_of_chosen"] = rep.score_of_chosen;
  out["n_used"] = rep.n_used;
  out["epsilon_spent"] = rep.budget_spent.epsilon;
  out["delta_spent"] = rep.budget_spent.delta;
  for (const auto& [k, v] : rep.diagnostics) out["diagnostics"][k] = v;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& output_override) {
  ExperimentConfig cfg = ExperimentConfig::from_json(load_json(config_path));
  if (!output_override.empty()) cfg.output_path = output_override;
  ExperimentResult res = run_experiment(cfg);
  if (!cfg.output_path.empty()) {
    std::ofstream out(cfg.output_path);
    if (!out) throw ParseError("cannot write '" + cfg.output_path + "'");
    out << records_to_csv(res.records);
  }
  std::cout << res.summary.dump(2) << "\n";
  return 0;
}

int cmd_cover(const std::string& family, double alpha, std::size_t k, std::size_t d,
              double R, double kappa, std::size_t mix_k, const std::string& out_path) {
  CoverSpec spec;
  if (family == "bernoulli-grid") {
    spec = product_cover(2, 1, alpha);
  } else if (family == "product") {
    spec = product_cover(k, d, alpha);
  } else if (family == "gaussian-mean") {
    spec = gaussian_mean_cover(d, R, alpha);
  } else if (family == "gaussian-cov") {
    spec = gaussian_cov_cover(d, R, kappa, alpha);
  } else if (family == "gaussian-lattice") {
    spec = gaussian_lattice_cover(d, alpha);
  } else if (family == "univariate-gaussian") {
    spec = univariate_gaussian_cover(alpha);
  } else if (family == "mixture-bernoulli") {
    spec = mixture_cover(product_cover(2, 1, alpha), mix_k, alpha);
  } else {
    throw CLI::ValidationError("unknown --family '" + family + "'");
  }
  write_or_print(cover_to_json(spec), out_path);
  return 0;
}

int cmd_packing(const std::string& hyp_path, double alpha, const std::string& out_path) {
  std::vector<Hypothesis> cands = load_hypotheses(hyp_path);
  EstimatorConfig cfg;
  cfg.mode = EstimatorMode::MonteCarlo;
  auto pack_a = greedy_packing(cands, alpha, cfg);
  auto pack_2a = greedy_packing(cands, 2.0 * alpha, cfg);
  nlohmann::json out;
  out["alpha"] = alpha;
  out["p_alpha"] = pack_a.size();
  out["p_2alpha"] = pack_2a.size();
  out["c_alpha"] = pack_a.size();  // a maximal alpha-packing is an alpha-cover
  out["sandwich_holds"] = pack_2a.size() <= pack_a.size();
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& h : pack_a) ids.push_back(h.id());
  out["packing_ids"] = std::move(ids);
  write_or_print(out, out_path);
  return 0;
}

int cmd_bound(std::size_t m, double alpha, double zeta, double beta, double epsilon,
              std::size_t packing_size) {
  SelectionParams p{alpha, zeta, beta, {epsilon, 0.0}};
  std::cout << required_n_phs(m, p) << "\n";
  if (packing_size > 0)
    std::cout << "packing_lower_bound_n=" << packing_lower_bound_n(packing_size, epsilon)
              << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{
      "Private hypothesis selection: Scheffe tournaments, exponential mechanism, "
      "GAP-MAX, covers and packings"};
  app.require_subcommand(1);

  std::string hyp_path, data_path, method = "phs", config_path, out_path, family;
  double alpha = 0.1, zeta = 1.0, beta = 0.1, epsilon = 1.0, R = 1.0, kappa = 1.0;
  std::uint64_t seed = 0;
  std::size_t mc_samples = 100000, m = 1, k = 2, d = 1, mix_k = 1, packing_size = 0;
  bool monte_carlo = false;

  auto* sel = app.add_subcommand("select", "One-shot private selection from JSON inputs");
  sel->add_option("--hypotheses", hyp_path, "JSON array of hypotheses")->required();
  sel->add_option("--data", data_path, "JSON array of dataset points")->required();
  sel->add_option("--method", method, "phs | naive | dl | semi-agnostic");
  sel->add_option("--alpha", alpha, "accuracy parameter");
  sel->add_option("--zeta", zeta, "slack parameter");
  sel->add_option("--beta", beta, "failure probability");
  sel->add_option("--epsilon", epsilon, "privacy budget");
  sel->add_option("--seed", seed, "RNG seed");
  sel->add_flag("--monte-carlo", monte_carlo, "use MC mass estimates instead of exact");
  sel->add_option("--mc-samples", mc_samples, "MC sample count");

  auto* bench = app.add_subcommand(
      "bench",
      "Run a seeded experiment from a JSON config; writes CSV trial records "
      "(columns: trial,seed,chosen_id,dtv,success,eps,delta,aux) and prints a "
      "JSON summary");
  bench->add_option("--config", config_path, "experiment config JSON")->required();
  bench->add_option("--output", out_path, "CSV output path (overrides config)");

  auto* cover = app.add_subcommand("cover", "Emit a cover as JSON");
  cover->add_option("--family", family,
                    "bernoulli-grid | product | gaussian-mean | gaussian-cov | "
                    "gaussian-lattice | univariate-gaussian | mixture-bernoulli")
      ->required();
  cover->add_option("--alpha", alpha, "cover radius");
  cover->add_option("--k", k, "alphabet size (product)");
  cover->add_option("--d", d, "dimension");
  cover->add_option("--R", R, "mean-norm bound");
  cover->add_option("--kappa", kappa, "condition-number bound");
  cover->add_option("--mix-k", mix_k, "mixture components");
  cover->add_option("--out", out_path, "output path (stdout if omitted)");

  auto* packing = app.add_subcommand("packing", "Greedy packing + sandwich audit");
  packing->add_option("--candidates", hyp_path, "JSON array of hypotheses")->required();
  packing->add_option("--alpha", alpha, "packing radius");
  packing->add_option("--out", out_path, "output path (stdout if omitted)");

  auto* bound = app.add_subcommand("bound", "Print sample-size bounds");
  bound->add_option("--m", m, "number of hypotheses")->required();
  bound->add_option("--alpha", alpha, "accuracy parameter");
  bound->add_option("--zeta", zeta, "slack parameter");
  bound->add_option("--beta", beta, "failure probability");
  bound->add_option("--epsilon", epsilon, "privacy budget");
  bound->add_option("--packing-size", packing_size,
                    "if set, also print the packing lower bound on n");

  try {
    app.parse(argc, argv);
    if (sel->parsed())
      return cmd_select(hyp_path, data_path, method, alpha, zeta, beta, epsilon, seed,
                        monte_carlo, mc_samples);
    if (bench->parsed()) return cmd_bench(config_path, out_path);
    if (cover->parsed()) return cmd_cover(family, alpha, k, d, R, kappa, mix_k, out_path);
    if (packing->parsed()) return cmd_packing(hyp_path, alpha, out_path);
    if (bound->parsed()) return cmd_bound(m, alpha, zeta, beta, epsilon, packing_size);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const CoverSizeError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace phs
