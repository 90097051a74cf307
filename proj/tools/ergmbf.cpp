// ergmbf command-line front end.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "ergmbf/bayes_factor.hpp"
#include "ergmbf/error.hpp"
#include "ergmbf/experiments.hpp"
#include "ergmbf/hypothesis.hpp"
#include "ergmbf/inference.hpp"
#include "ergmbf/network.hpp"
#include "ergmbf/priors.hpp"
#include "ergmbf/report.hpp"
#include "ergmbf/statistics.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace ergmbf;

namespace {

constexpr int kFullScaleMainIters = 100000;
constexpr int kFullScaleReplicates = 300;

struct RunConfig {
  std::string network;
  bool directed = false;
  std::string format = "adjacency";
  std::optional<int> nodes;
  std::string attrs;
  std::vector<std::string> categorical;
  std::map<std::string, std::string> covariates;
  std::string model;
  std::string hypothesis;
  std::vector<double> prior_probs;
  std::uint64_t seed = 1;
  int main_iters = 20000;
  int aux_sweeps = 5;
  int chains = 1;
  long mc_draws = 100000;
  std::string out = ".";
  bool paper_scale = false;
  // simulations
  int replicates = 50;
  std::vector<int> sizes;
  std::vector<double> betas;
  int workers = 0;
};

/// Settings from a JSON config file; command-line flags override them.
void apply_config_file(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  try {
    if (j.contains("network")) c.network = j["network"].get<std::string>();
    if (j.contains("directed")) c.directed = j["directed"].get<bool>();
    if (j.contains("format")) c.format = j["format"].get<std::string>();
    if (j.contains("nodes")) c.nodes = j["nodes"].get<int>();
    if (j.contains("attrs")) c.attrs = j["attrs"].get<std::string>();
    if (j.contains("categorical")) c.categorical = j["categorical"].get<std::vector<std::string>>();
    if (j.contains("covariates")) c.covariates = j["covariates"].get<std::map<std::string, std::string>>();
    if (j.contains("model")) c.model = j["model"].get<std::string>();
    if (j.contains("hypothesis")) c.hypothesis = j["hypothesis"].get<std::string>();
    if (j.contains("prior_probs")) c.prior_probs = j["prior_probs"].get<std::vector<double>>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("main_iters")) c.main_iters = j["main_iters"].get<int>();
    if (j.contains("aux_sweeps")) c.aux_sweeps = j["aux_sweeps"].get<int>();
    if (j.contains("chains")) c.chains = j["chains"].get<int>();
    if (j.contains("mc_draws")) c.mc_draws = j["mc_draws"].get<long>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("paper_scale")) c.paper_scale = j["paper_scale"].get<bool>();
    if (j.contains("replicates")) c.replicates = j["replicates"].get<int>();
    if (j.contains("sizes")) c.sizes = j["sizes"].get<std::vector<int>>();
    if (j.contains("betas")) c.betas = j["betas"].get<std::vector<double>>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

struct Inputs {
  Network network;
  AttributeTable attrs;
  CovariateSet covariates;
  Model model;
};

Inputs load_inputs(const RunConfig& c) {
  if (c.network.empty()) throw InputError("--network is required");
  if (c.model.empty()) throw InputError("--model is required");
  NetworkLoadOptions opts;
  opts.directed = c.directed;
  if (c.format == "adjacency") {
    opts.format = NetworkFormat::Adjacency;
  } else if (c.format == "edgelist" || c.format == "edge-list") {
    opts.format = NetworkFormat::EdgeList;
  } else {
    throw InputError("unknown network format '" + c.format + "'");
  }
  opts.node_count = c.nodes;
  auto loaded = load_network(c.network, opts);
  if (loaded.dropped_self_ties > 0) {
    std::cerr << "warning: dropped " << loaded.dropped_self_ties << " self-ties from " << c.network << "\n";
  }
  const int n = loaded.network.size();
  AttributeTable attrs(n);
  if (!c.attrs.empty()) {
    std::map<std::string, AttributeKind> schema;
    for (const auto& name : c.categorical) schema[name] = AttributeKind::Categorical;
    attrs = load_node_attributes(c.attrs, schema, n);
  }
  CovariateSet covs;
  for (const auto& [name, path] : c.covariates) covs.emplace(name, load_dyad_covariate(path, name, n));
  auto spec = ModelSpec::load(c.model);
  Model model(spec, loaded.network, attrs, covs);
  return {std::move(loaded.network), std::move(attrs), std::move(covs), std::move(model)};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path.string());
  out << text;
}

fs::path prepare_out(const RunConfig& c) {
  fs::path out(c.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw InputError("cannot create output directory " + out.string() + ": " + ec.message());
  return out;
}

ExchangeOptions exchange_options(const RunConfig& c) {
  ExchangeOptions eo;
  eo.main_iters = c.main_iters;
  eo.aux_sweeps = c.aux_sweeps;
  eo.chains = c.chains;
  eo.seed = c.seed;
  return eo;
}

FitResult run_fit(const RunConfig& c, const Inputs& in) {
  auto mple = fit_mple(in.network, in.model);
  auto prior = unit_information_prior(in.network, in.model);
  auto draws = sample_posterior(in.network, in.model, prior, exchange_options(c));
  auto post = gaussian_approx(draws);
  auto normality = normality_check(draws, post);
  return {std::move(mple), std::move(prior), std::move(draws), std::move(post), std::move(normality)};
}

json settings_json(const RunConfig& c) {
  return {{"seed", c.seed}, {"main_iters", c.main_iters}, {"aux_sweeps", c.aux_sweeps},
          {"chains", c.chains}, {"mc_draws", c.mc_draws}};
}

json fit_json(const FitResult& fit, const Inputs& in) {
  json j = to_json(fit);
  const double density = in.network.density();
  j["mple"]["density"] = density;
  j["mple"]["logit_density"] = std::log(density / (1.0 - density));
  return j;
}

int cmd_fit(const RunConfig& c) {
  const auto in = load_inputs(c);
  const auto out = prepare_out(c);
  const auto fit = run_fit(c, in);
  json report = fit_json(fit, in);
  report["settings"] = settings_json(c);
  write_text(out / "report.json", report.dump(2) + "\n");
  const std::string text = format_fit(fit);
  write_text(out / "report.txt", text);
  write_draws_csv(fit.draws, out / "draws.csv");
  std::cout << text;
  return 0;
}

int cmd_test(const RunConfig& c) {
  const auto in = load_inputs(c);
  const auto out = prepare_out(c);
  std::optional<HypothesisSet> hset;
  if (!c.hypothesis.empty()) {
    std::optional<std::vector<double>> probs;
    if (!c.prior_probs.empty()) probs = c.prior_probs;
    hset = parse_hypotheses(c.hypothesis, in.model.names(), in.model.edges_index(), probs);
  }
  const auto fit = run_fit(c, in);
  const auto exploratory = exploratory_test(fit.prior, fit.posterior, in.model.edges_index());

  json report;
  std::string text = format_fit(fit) + "\nExploratory test (equal prior probabilities)\n" +
                     format_exploratory(exploratory);
  if (hset) {
    const auto bf = test_hypotheses(fit.prior, fit.posterior, *hset, {c.mc_draws, c.seed});
    report = to_json(bf);
    text += "\nConfirmatory test\n" + format_report(bf);
  } else {
    report["settings"] = {{"mc_draws", c.mc_draws}, {"seed", c.seed}};
  }
  report["exploratory"] = to_json(exploratory);
  report["fit"] = fit_json(fit, in);
  report["settings"].update(settings_json(c));
  write_text(out / "report.json", report.dump(2) + "\n");
  write_text(out / "report.txt", text);
  write_draws_csv(fit.draws, out / "draws.csv");
  std::cout << text;
  return 0;
}

void log_progress(const std::string& s) { std::cerr << s << "\n"; }

int cmd_simulate_jl(const RunConfig& c) {
  const auto out = prepare_out(c);
  JlOptions o;
  if (c.paper_scale) {
    o.sizes = {7, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55};
    o.replicates = kFullScaleReplicates;
  }
  if (!c.sizes.empty()) o.sizes = c.sizes;
  o.replicates = c.paper_scale && c.replicates == 50 ? o.replicates : c.replicates;
  o.exchange.main_iters = c.main_iters;
  o.exchange.seed = c.seed;
  o.seed = c.seed;
  o.workers = c.workers;
  const auto rows = simulate_jl(o, log_progress);
  write_jl_csv(rows, out / "simulation.csv");
  return 0;
}

int cmd_simulate_order(const RunConfig& c) {
  const auto out = prepare_out(c);
  OrderOptions o;
  if (c.paper_scale) {
    o.sizes = {10, 30, 90};
    o.replicates = 100;
  }
  if (!c.sizes.empty()) o.sizes = c.sizes;
  if (!c.betas.empty()) o.betas = c.betas;
  o.replicates = c.paper_scale && c.replicates == 50 ? o.replicates : c.replicates;
  o.exchange.main_iters = c.main_iters;
  o.mc.draws = c.mc_draws;
  o.seed = c.seed;
  o.workers = c.workers;
  const auto rows = simulate_order(o, log_progress);
  write_order_csv(rows, out / "simulation.csv");
  return 0;
}

int fail(int code, std::string_view kind, const std::string& message) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayes factors for constrained hypotheses on ERGM coefficients"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path;
  std::vector<std::string> covariate_args;

  auto* fit = app.add_subcommand("fit", "MPLE and posterior estimates");
  auto* test = app.add_subcommand("test", "exploratory and confirmatory Bayes factor tests");
  auto* jl = app.add_subcommand("simulate-jl", "p-value fixed at .05 while the network grows");
  auto* order = app.add_subcommand("simulate-order", "ordering vs equality vs complement simulation");

  // Flags are parsed into `flags` and merged over the config file afterwards.
  RunConfig flags;
  for (auto* sub : {fit, test}) {
    sub->add_option("--network", flags.network, "network file (adjacency CSV or edge list)");
    sub->add_flag("--directed", flags.directed, "treat the network as directed");
    sub->add_option("--format", flags.format, "adjacency or edgelist")->check(CLI::IsMember({"adjacency", "edgelist"}));
    sub->add_option("--nodes", flags.nodes, "node count for edge lists with isolates");
    sub->add_option("--attrs", flags.attrs, "node attribute CSV");
    sub->add_option("--categorical", flags.categorical, "attribute columns to read as categorical");
    sub->add_option("--covariate", covariate_args, "dyadic covariate as name=path (repeatable)");
    sub->add_option("--model", flags.model, "model JSON");
    sub->add_option("--aux-sweeps", flags.aux_sweeps, "Gibbs sweeps per auxiliary network");
    sub->add_option("--chains", flags.chains, "independent exchange chains");
  }
  test->add_option("--hypothesis", flags.hypothesis, "hypotheses, separated by ';'");
  test->add_option("--prior-probs", flags.prior_probs, "prior probabilities, complement last");
  for (auto* sub : {fit, test, jl, order}) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_option("--main-iters", flags.main_iters, "retained exchange iterations per chain");
    sub->add_option("--mc-draws", flags.mc_draws, "Monte Carlo draws for order probabilities");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_flag("--paper-scale", flags.paper_scale, "full-size settings (slow)");
  }
  for (auto* sub : {jl, order}) {
    sub->add_option("--replicates", flags.replicates, "networks per grid point");
    sub->add_option("--sizes", flags.sizes, "network sizes");
    sub->add_option("--workers", flags.workers, "worker threads (0: all cores)");
  }
  order->add_option("--betas", flags.betas, "grid of beta values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "input", e.what());
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!config_path.empty()) apply_config_file(config_path, cfg);
    auto given = [sub](const char* name) { return sub->get_option_no_throw(name) && sub->count(name) > 0; };
    if (given("--network")) cfg.network = flags.network;
    if (given("--directed")) cfg.directed = flags.directed;
    if (given("--format")) cfg.format = flags.format;
    if (given("--nodes")) cfg.nodes = flags.nodes;
    if (given("--attrs")) cfg.attrs = flags.attrs;
    if (given("--categorical")) cfg.categorical = flags.categorical;
    if (given("--model")) cfg.model = flags.model;
    if (given("--aux-sweeps")) cfg.aux_sweeps = flags.aux_sweeps;
    if (given("--chains")) cfg.chains = flags.chains;
    if (given("--hypothesis")) cfg.hypothesis = flags.hypothesis;
    if (given("--prior-probs")) cfg.prior_probs = flags.prior_probs;
    if (given("--seed")) cfg.seed = flags.seed;
    if (given("--out")) cfg.out = flags.out;
    if (given("--paper-scale")) cfg.paper_scale = flags.paper_scale;
    if (given("--replicates")) cfg.replicates = flags.replicates;
    if (given("--sizes")) cfg.sizes = flags.sizes;
    if (given("--betas")) cfg.betas = flags.betas;
    if (given("--workers")) cfg.workers = flags.workers;
    const bool simulation = sub == jl || sub == order;
    if (simulation) cfg.aux_sweeps = 1;
    if (cfg.paper_scale) cfg.main_iters = kFullScaleMainIters;
    if (given("--main-iters")) cfg.main_iters = flags.main_iters;
    if (given("--mc-draws")) cfg.mc_draws = flags.mc_draws;
    for (const auto& arg : covariate_args) {
      const auto eq = arg.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) {
        throw InputError("--covariate expects name=path, got '" + arg + "'");
      }
      cfg.covariates[arg.substr(0, eq)] = arg.substr(eq + 1);
    }

    if (sub == fit) return cmd_fit(cfg);
    if (sub == test) return cmd_test(cfg);
    if (sub == jl) return cmd_simulate_jl(cfg);
    return cmd_simulate_order(cfg);
  } catch (const InputError& e) {
    return fail(2, "input", e.what());
  } catch (const NumericalError& e) {
    return fail(3, "numerical", e.what());
  } catch (const std::exception& e) {
    return fail(3, "internal", e.what());
  }
}
