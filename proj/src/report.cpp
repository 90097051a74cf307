#include "ergmbf/report.hpp"

#include <algorithm>
#include <cstdarg>
#include <cstdio>

namespace ergmbf {

using json = nlohmann::ordered_json;

namespace {

std::string printf_string(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

int name_width(const std::vector<std::string>& names, int floor) {
  int w = floor;
  for (const auto& n : names) w = std::max(w, static_cast<int>(n.size()));
  return w;
}

}  // namespace

json to_json(const GaussianDistribution& g) {
  return {{"names", g.names()}, {"mean", to_vector(g.mean())}, {"covariance", to_json(g.covariance())}};
}

json to_json(const FitResult& fit) {
  json coefs = json::array();
  const Eigen::VectorXd post_sd = fit.posterior.standard_deviations();
  for (std::size_t k = 0; k < fit.mple.names.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    coefs.push_back({{"name", fit.mple.names[k]},
                     {"mple", fit.mple.coefficients[i]},
                     {"mple_se", fit.mple.standard_errors[i]},
                     {"p_value", fit.mple.p_values[i]},
                     {"posterior_mean", fit.posterior.mean()[i]},
                     {"posterior_sd", post_sd[i]},
                     {"ks_distance", fit.normality[k].ks},
                     {"non_normal", fit.normality[k].flagged}});
  }
  return {{"coefficients", coefs},
          {"mple", {{"log_pseudolikelihood", fit.mple.log_pseudolikelihood},
                    {"iterations", fit.mple.iterations},
                    {"dyads", fit.mple.dyads},
                    {"exact_likelihood", fit.mple.exact_likelihood}}},
          {"prior", to_json(fit.prior)},
          {"posterior", to_json(fit.posterior)},
          {"sampler", {{"draws", fit.draws.draws.rows()},
                       {"acceptance_rate", fit.draws.acceptance_rate},
                       {"seed", fit.draws.seed}}}};
}

json to_json(const BayesFactorReport& report) {
  json hyps = json::array();
  json probs = json::object();
  for (std::size_t t = 0; t < report.hypotheses.size(); ++t) {
    const auto& h = report.hypotheses[t];
    const auto& c = h.components;
    hyps.push_back({{"label", h.label},
                    {"hypothesis", h.text},
                    {"complement", h.complement},
                    {"bf_vs_unconstrained", c.bf},
                    {"interpretation", std::string(to_string(raftery_label(std::max(c.bf, 1e-300))))},
                    {"prior_prob", report.prior_probs[t]},
                    {"fit", {{"density", c.posterior_density},
                             {"order_prob", c.posterior_prob.value},
                             {"order_prob_se", c.posterior_prob.mc_se}}},
                    {"complexity", {{"density", c.prior_density},
                                    {"order_prob", c.prior_prob.value},
                                    {"order_prob_se", c.prior_prob.mc_se}}}});
    probs[h.label] = report.posterior_probs[t];
  }
  return {{"hypotheses", hyps},
          {"evidence_matrix", to_json(report.evidence)},
          {"posterior_probs", probs},
          {"notices", report.notices},
          {"settings", {{"mc_draws", report.settings.draws}, {"seed", report.settings.seed}}}};
}

json to_json(const std::vector<ExploratoryResult>& results) {
  json out = json::array();
  for (const auto& r : results) {
    out.push_back({{"name", r.name},
                   {"bf", {{"zero", r.bf_zero}, {"negative", r.bf_negative}, {"positive", r.bf_positive}}},
                   {"posterior_probs", {{"zero", r.p_zero}, {"negative", r.p_negative}, {"positive", r.p_positive}}}});
  }
  return out;
}

std::string format_fit(const FitResult& fit) {
  const int w = name_width(fit.mple.names, 12);
  std::string out = printf_string("%-*s %12s %10s %10s   %12s %10s %8s\n", w, "", "MPLE", "s.e.", "p", "post. mean",
                                  "post. sd", "KS");
  const Eigen::VectorXd post_sd = fit.posterior.standard_deviations();
  for (std::size_t k = 0; k < fit.mple.names.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out += printf_string("%-*s %12.4f %10.4f %10.4f   %12.4f %10.4f %8.4f%s\n", w, fit.mple.names[k].c_str(),
                         fit.mple.coefficients[i], fit.mple.standard_errors[i], fit.mple.p_values[i],
                         fit.posterior.mean()[i], post_sd[i], fit.normality[k].ks,
                         fit.normality[k].flagged ? "  (not normal)" : "");
  }
  out += printf_string("\n%ld posterior draws, acceptance rate %.3f, seed %llu\n",
                       static_cast<long>(fit.draws.draws.rows()), fit.draws.acceptance_rate,
                       static_cast<unsigned long long>(fit.draws.seed));
  if (!fit.mple.exact_likelihood) out += "The model has dyad-dependent terms; MPLE standard errors are approximate.\n";
  return out;
}

std::string format_report(const BayesFactorReport& report) {
  std::vector<std::string> labels;
  for (const auto& h : report.hypotheses) labels.push_back(h.label);
  const int w = name_width(labels, 4);

  std::string out = "Hypotheses\n";
  for (const auto& h : report.hypotheses) out += printf_string("  %-*s %s\n", w, h.label.c_str(), h.text.c_str());

  out += printf_string("\n%-*s %12s %12s %12s %12s %12s %8s %8s\n", w, "", "fit dens.", "fit prob.", "compl. dens.",
                       "compl. prob.", "BF_u", "P(H)", "P(H|Y)");
  for (std::size_t t = 0; t < report.hypotheses.size(); ++t) {
    const auto& c = report.hypotheses[t].components;
    out += printf_string("%-*s %12.4g %12.4g %12.4g %12.4g %12.4g %8.3f %8.3f\n", w, labels[t].c_str(),
                         c.posterior_density, c.posterior_prob.value, c.prior_density, c.prior_prob.value, c.bf,
                         report.prior_probs[t], report.posterior_probs[t]);
  }

  out += printf_string("\nEvidence matrix (row vs column)\n%-*s", w, "");
  for (const auto& l : labels) out += printf_string(" %12s", l.c_str());
  out += "\n";
  for (Eigen::Index i = 0; i < report.evidence.rows(); ++i) {
    out += printf_string("%-*s", w, labels[static_cast<std::size_t>(i)].c_str());
    for (Eigen::Index j = 0; j < report.evidence.cols(); ++j) out += printf_string(" %12.4g", report.evidence(i, j));
    out += "\n";
  }

  out += "\nInterpretation\n";
  for (Eigen::Index i = 0; i < report.evidence.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < report.evidence.cols(); ++j) {
      const double bf = report.evidence(i, j);
      out += printf_string("  %s vs %s: %.4g, %s %s\n", labels[static_cast<std::size_t>(i)].c_str(),
                           labels[static_cast<std::size_t>(j)].c_str(), bf,
                           std::string(to_string(raftery_label(bf))).c_str(),
                           labels[static_cast<std::size_t>(i)].c_str());
    }
  }
  for (const auto& n : report.notices) out += "Note: " + n + "\n";
  out += printf_string("\nMonte Carlo draws %ld, seed %llu\n", report.settings.draws,
                       static_cast<unsigned long long>(report.settings.seed));
  return out;
}

std::string format_exploratory(const std::vector<ExploratoryResult>& results) {
  std::vector<std::string> names;
  for (const auto& r : results) names.push_back(r.name);
  const int w = name_width(names, 12);
  std::string out = printf_string("%-*s %10s %10s %10s\n", w, "", "P(=0)", "P(<0)", "P(>0)");
  for (const auto& r : results) {
    out += printf_string("%-*s %10.3f %10.3f %10.3f\n", w, r.name.c_str(), r.p_zero, r.p_negative, r.p_positive);
  }
  return out;
}

}  // namespace ergmbf
