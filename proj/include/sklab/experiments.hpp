#pragma once

// Experiment harness: study runners, result rows, CSV and manifest output.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sklab/bounds.hpp"
#include "sklab/disorder.hpp"
#include "sklab/errors.hpp"
#include "sklab/interp.hpp"
#include "sklab/stats.hpp"

namespace sklab {

inline constexpr std::string_view kVersion = "0.1.0";

enum class StudyKind { VarianceScaling, PhiCurve, OverlapCurve, QConvexity, HolderCheck, BoundRatios };

inline std::string_view study_name(StudyKind s) {
  switch (s) {
    case StudyKind::VarianceScaling: return "variance_scaling";
    case StudyKind::PhiCurve: return "phi_curve";
    case StudyKind::OverlapCurve: return "overlap_curve";
    case StudyKind::QConvexity: return "q_convexity";
    case StudyKind::HolderCheck: return "holder_check";
    case StudyKind::BoundRatios: return "bound_ratios";
  }
  return "unknown";
}

inline std::optional<StudyKind> parse_study_name(std::string_view name) {
  for (StudyKind s : {StudyKind::VarianceScaling, StudyKind::PhiCurve, StudyKind::OverlapCurve,
                      StudyKind::QConvexity, StudyKind::HolderCheck, StudyKind::BoundRatios}) {
    if (study_name(s) == name) return s;
  }
  return std::nullopt;
}

/// Textual description of a disorder law, as written in a [disorder] section.
struct DisorderFragment {
  std::string kind = "gaussian";
  std::optional<double> p;
  std::vector<double> coeffs;
  std::string function;
  std::string base;          // truncated / mollified only
  std::optional<double> n;   // truncation level
  std::optional<int> k;      // mollification index

  friend bool operator==(const DisorderFragment&, const DisorderFragment&) = default;
};

namespace detail {

inline DisorderSpec build_plain(const std::string& kind, const DisorderFragment& f,
                                const std::string& key) {
  if (kind == "gaussian") return make_gaussian();
  if (kind == "uniform") return make_uniform();
  if (kind == "rademacher") return make_rademacher();
  if (kind == "two_point") {
    if (!f.p) throw ValidationError("p", "two_point disorder requires p");
    return make_two_point(*f.p);
  }
  if (kind == "polynomial") {
    if (f.coeffs.empty()) throw ValidationError("coeffs", "polynomial disorder requires coeffs");
    return make_polynomial(f.coeffs);
  }
  if (kind == "lipschitz") {
    if (f.function.empty()) throw ValidationError("function", "lipschitz disorder requires function");
    return make_lipschitz_named(f.function);
  }
  throw ValidationError(key, "unknown disorder kind '" + kind + "'");
}

}  // namespace detail

inline DisorderSpec build_spec(const DisorderFragment& f) {
  if (f.kind == "truncated") {
    if (f.base.empty()) throw ValidationError("base", "truncated disorder requires base");
    return truncate(detail::build_plain(f.base, f, "base"), f.n.value_or(kDefaultTruncation));
  }
  if (f.kind == "mollified") {
    if (f.base.empty()) throw ValidationError("base", "mollified disorder requires base");
    DisorderSpec base = detail::build_plain(f.base, f, "base");
    if (f.n) base = truncate(base, *f.n);
    return mollify(base, f.k.value_or(kDefaultMollification));
  }
  if (f.n || f.k || !f.base.empty()) {
    throw ValidationError(f.n ? "n" : (f.k ? "k" : "base"),
                          "only truncated/mollified disorder takes base, n or k");
  }
  return detail::build_plain(f.kind, f, "kind");
}

inline std::vector<int> canonical_n_list() { return {4, 6, 8, 10, 12, 14, 16}; }

struct ExperimentConfig {
  DisorderFragment disorder;
  double beta = 1.0;
  double field_r = 0.0;
  std::vector<int> n_list = canonical_n_list();
  int replicas = 4000;
  std::uint64_t seed = 1;
  std::vector<double> t_grid;
  std::vector<double> lambda_grid;
  StudyKind study = StudyKind::VarianceScaling;
  double c_const = 1.0;
  double K_const = 1.0;
  std::vector<std::pair<double, double>> holder_pairs{{0.1, 0.5}, {0.2, 0.8}};
  std::optional<double> lambda0;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Structural checks that do not need the disorder law.
inline void validate(const ExperimentConfig& c) {
  if (!(c.beta > 0.0) || !std::isfinite(c.beta)) throw ValidationError("beta", "beta must be positive");
  if (!std::isfinite(c.field_r)) throw ValidationError("field_r", "field_r must be finite");
  if (c.replicas < 3) throw ValidationError("replicas", "replicas must be at least 3");
  if (c.n_list.empty()) throw ValidationError("N_list", "N_list must not be empty");
  const int cap = c.study == StudyKind::QConvexity ? kMaxPairSpins : kMaxExactSpins;
  for (int n : c.n_list) {
    if (n < 2 || n > cap) {
      throw ValidationError("N_list", "entries must lie in [2, " + std::to_string(cap) + "]");
    }
  }
  for (const auto* grid : {&c.t_grid}) {
    if (!std::is_sorted(grid->begin(), grid->end())) throw ValidationError("t_grid", "t_grid must be sorted");
    for (double t : *grid) {
      if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("t_grid", "t_grid entries must lie in [0,1]");
    }
  }
  if (!std::is_sorted(c.lambda_grid.begin(), c.lambda_grid.end())) {
    throw ValidationError("lambda_grid", "lambda_grid must be sorted");
  }
  for (double l : c.lambda_grid) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ValidationError("lambda_grid", "lambda_grid entries must be nonnegative");
  }
  if (!(c.c_const > 0.0)) throw ValidationError("c_const", "c_const must be positive");
  if (!(c.K_const > 0.0)) throw ValidationError("K_const", "K_const must be positive");
  for (auto [s, t] : c.holder_pairs) {
    if (!(s > 0.0 && s < t && t < 1.0)) throw ValidationError("pairs", "pairs need 0 < s < t < 1");
  }
  if (c.lambda0 && !(*c.lambda0 > 0.0)) throw ValidationError("lambda0", "lambda0 must be positive");
  switch (c.study) {
    case StudyKind::PhiCurve:
    case StudyKind::OverlapCurve:
      if (c.t_grid.empty()) throw ValidationError("t_grid", "this study requires t_grid");
      break;
    case StudyKind::QConvexity:
      if (c.lambda_grid.empty()) throw ValidationError("lambda_grid", "q_convexity requires lambda_grid");
      if (c.t_grid.empty()) throw ValidationError("t_grid", "q_convexity requires t_grid");
      break;
    default:
      break;
  }
}

struct ResultRow {
  std::string study;
  int n = 0;
  std::optional<double> t;
  std::optional<double> lambda;
  double estimate = 0.0;
  double std_error = 0.0;
  nlohmann::json extra = nlohmann::json::object();

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

namespace detail {

inline ResultRow make_row(const ExperimentConfig& c, int n, std::optional<double> t,
                          std::optional<double> lambda, double est, double se,
                          nlohmann::json extra) {
  return {std::string(study_name(c.study)), n, t, lambda, est, se, std::move(extra)};
}

inline std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t k) {
  std::vector<double> v(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) v[r] = rows[r][k];
  return v;
}

}  // namespace detail

inline std::vector<ResultRow> run_variance_scaling(const ExperimentConfig& c, const DisorderSpec& spec) {
  std::vector<ResultRow> out;
  for (int n : c.n_list) {
    const auto f = free_energy_samples(spec, n, c.beta, c.replicas, c.seed, c.field_r);
    const VarianceEstimate v = estimate_variance_jackknife(f);
    const double ln = std::log(static_cast<double>(n));
    nlohmann::json extra = {{"quantity", "variance"},
                            {"var_over_n", v.var / n},
                            {"var_over_n_se", v.std_error / n},
                            {"var_logn_over_n", v.var * ln / n},
                            {"mean_free_energy", estimate_mean(f).mean}};
    out.push_back(detail::make_row(c, n, std::nullopt, std::nullopt, v.var, v.std_error, extra));
  }
  return out;
}

inline std::vector<ResultRow> run_phi_curve(const ExperimentConfig& c, const DisorderSpec& spec) {
  std::vector<ResultRow> out;
  std::vector<double> grid = c.t_grid;
  grid.push_back(0.0);
  grid.push_back(1.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (int n : c.n_list) {
    const auto rows = phi_samples(spec, n, c.beta, grid, c.replicas, c.seed, c.field_r);
    auto index_of = [&](double t) {
      return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t) - grid.begin());
    };
    for (double t : c.t_grid) {
      const MeanEstimate e = estimate_mean(detail::column(rows, index_of(t)));
      out.push_back(detail::make_row(c, n, t, std::nullopt, e.mean, e.std_error, {{"quantity", "phi"}}));
    }
    for (std::size_t k = 0; k + 1 < c.t_grid.size(); ++k) {
      const std::size_t a = index_of(c.t_grid[k]);
      const std::size_t b = index_of(c.t_grid[k + 1]);
      std::vector<double> d(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) d[r] = rows[r][b] - rows[r][a];
      const MeanEstimate e = estimate_mean(d);
      out.push_back(detail::make_row(c, n, c.t_grid[k], std::nullopt, e.mean, e.std_error,
                                     {{"quantity", "first_difference"}, {"t_right", c.t_grid[k + 1]}}));
    }
    for (std::size_t k = 0; k + 2 < c.t_grid.size(); ++k) {
      const std::size_t a = index_of(c.t_grid[k]);
      const std::size_t b = index_of(c.t_grid[k + 1]);
      const std::size_t e2 = index_of(c.t_grid[k + 2]);
      const double h1 = c.t_grid[k + 1] - c.t_grid[k];
      const double h2 = c.t_grid[k + 2] - c.t_grid[k + 1];
      std::vector<double> d(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        d[r] = 2.0 * ((rows[r][e2] - rows[r][b]) / h2 - (rows[r][b] - rows[r][a]) / h1) / (h1 + h2);
      }
      const MeanEstimate e = estimate_mean(d);
      out.push_back(detail::make_row(c, n, c.t_grid[k + 1], std::nullopt, e.mean, e.std_error,
                                     {{"quantity", "second_difference"}}));
    }
    // phi(1) - phi(0) against the direct variance of F_N on the same replicas
    const std::size_t i0 = index_of(0.0);
    const std::size_t i1 = index_of(1.0);
    std::vector<double> d(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) d[r] = rows[r][i1] - rows[r][i0];
    const MeanEstimate gap = estimate_mean(d);
    const VarianceEstimate direct =
        estimate_variance_jackknife(free_energy_samples(spec, n, c.beta, c.replicas, c.seed, c.field_r));
    const double sigma = std::hypot(gap.std_error, direct.std_error);
    out.push_back(detail::make_row(
        c, n, std::nullopt, std::nullopt, gap.mean, gap.std_error,
        {{"quantity", "variance_identity"},
         {"direct_var", direct.var},
         {"direct_var_se", direct.std_error},
         {"agrees_within_3sigma", std::abs(gap.mean - direct.var) <= 3.0 * sigma}}));
  }
  return out;
}

inline std::vector<ResultRow> run_overlap_curve(const ExperimentConfig& c, const DisorderSpec& spec) {
  std::vector<ResultRow> out;
  for (int n : c.n_list) {
    const auto rows = overlap_samples(spec, n, c.beta, c.t_grid, c.replicas, c.seed, c.field_r);
    for (std::size_t k = 0; k < c.t_grid.size(); ++k) {
      const double t = c.t_grid[k];
      const MeanEstimate e = estimate_mean(detail::column(rows, k));
      const bool admissible = r1_admissible(c.beta, t);
      const double rn = std::sqrt(static_cast<double>(n));
      nlohmann::json extra = {{"quantity", "overlap_second_moment"},
                              {"admissible", admissible},
                              {"sqrt_n_times_estimate", rn * e.mean}};
      if (admissible) {
        extra["r1_over_sqrt_n"] = r1_of_t(spec.moments().abs3, c.beta, t, c.K_const) / rn;
      }
      out.push_back(detail::make_row(c, n, t, std::nullopt, e.mean, e.std_error, extra));
    }
  }
  return out;
}

struct QReplica {
  std::vector<double> q;           // over the lambda grid
  double decoupling_error = 0.0;   // |Q(0) - F_A - F_B|
  double min_second_difference = 0.0;
  double chain_lhs = 0.0;          // lambda0 * d/dlambda Q(t, 0)
  double chain_rhs = 0.0;          // Q(0, lambda0 + w) - Q(0, 0) + sqrt(N) D(t)
  double overlap_dual_gap = 0.0;   // |d/dlambda Q(t,0) - beta^2 N <R^2>|
};

/// One replica of the Q study at fixed t; the lambda grid is used as given.
inline QReplica q_replica(const DisorderSpec& spec, int n, double beta, double field, double t,
                          std::span<const double> lambda_grid, std::optional<double> lambda0,
                          std::uint64_t seed, std::size_t replica) {
  const InterpState s = make_interp_state(spec, n, seed, replica);
  const CoupledSystem c = realize_coupled(s, t, beta, field);
  const OverlapResolvedPartition part(c.a, c.b);
  QReplica out;
  for (double l : lambda_grid) out.q.push_back(part.q(l));
  out.decoupling_error = std::abs(part.q(0.0) - free_energy_exact(c.a).log_partition -
                                  free_energy_exact(c.b).log_partition);
  out.min_second_difference = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 2 < out.q.size(); ++k) {
    const double h1 = lambda_grid[k + 1] - lambda_grid[k];
    const double h2 = lambda_grid[k + 2] - lambda_grid[k + 1];
    const double d = (out.q[k + 2] - out.q[k + 1]) / h2 - (out.q[k + 1] - out.q[k]) / h1;
    out.min_second_difference = std::min(out.min_second_difference, d);
  }
  const auto ma = *free_energy_exact(c.a, true).pair_expectations;
  const auto mb = *free_energy_exact(c.b, true).pair_expectations;
  const double dq0 = part.dq_dlambda(0.0);
  out.overlap_dual_gap = std::abs(dq0 - beta * beta * n * detail::overlap_second_moment(ma, mb, n));
  if (lambda0) {
    const CoupledSystem c0 = realize_coupled(s, 0.0, beta, field);
    const OverlapResolvedPartition p0(c0.a, c0.b);
    const double abs3 = spec.moments().abs3;
    out.chain_lhs = *lambda0 * dq0;
    out.chain_rhs = p0.q(*lambda0 + w_of_t(spec, t)) - p0.q(0.0) +
                    std::sqrt(static_cast<double>(n)) * d_of_t(beta, abs3, t);
  }
  return out;
}

inline std::vector<ResultRow> run_q_convexity(const ExperimentConfig& c, const DisorderSpec& spec) {
  std::vector<ResultRow> out;
  const double lambda0 = c.lambda0.value_or(1.0 / (4.0 * c.beta * c.beta));
  // The chained inequality is derived for differentiable f only.
  const bool chain = !spec.two_point() && spec.has_derivative();
  for (int n : c.n_list) {
    for (double t : c.t_grid) {
      const auto reps = parallel_map(static_cast<std::size_t>(c.replicas), [&](std::size_t r) {
        return q_replica(spec, n, c.beta, c.field_r, t, c.lambda_grid,
                         chain && t < 1.0 ? std::optional<double>(lambda0) : std::nullopt, c.seed, r);
      });
      for (std::size_t k = 0; k < c.lambda_grid.size(); ++k) {
        std::vector<double> v(reps.size());
        for (std::size_t r = 0; r < reps.size(); ++r) v[r] = reps[r].q[k];
        const MeanEstimate e = estimate_mean(v);
        out.push_back(detail::make_row(c, n, t, c.lambda_grid[k], e.mean, e.std_error, {{"quantity", "Q"}}));
      }
      double worst_second = std::numeric_limits<double>::infinity();
      double worst_decoupling = 0.0;
      double worst_dual = 0.0;
      for (const auto& r : reps) {
        worst_second = std::min(worst_second, r.min_second_difference);
        worst_decoupling = std::max(worst_decoupling, r.decoupling_error);
        worst_dual = std::max(worst_dual, r.overlap_dual_gap);
      }
      if (c.lambda_grid.size() >= 3) {
        out.push_back(detail::make_row(c, n, t, std::nullopt, worst_second, 0.0,
                                       {{"quantity", "min_lambda_second_difference"},
                                        {"convex", worst_second >= -1e-9}}));
      }
      out.push_back(detail::make_row(c, n, t, 0.0, worst_decoupling, 0.0,
                                     {{"quantity", "max_decoupling_error"},
                                      {"max_overlap_dual_gap", worst_dual}}));
      if (chain && t < 1.0) {
        std::vector<double> margin(reps.size()), lhs(reps.size()), rhs(reps.size());
        for (std::size_t r = 0; r < reps.size(); ++r) {
          lhs[r] = reps[r].chain_lhs;
          rhs[r] = reps[r].chain_rhs;
          margin[r] = rhs[r] - lhs[r];
        }
        const MeanEstimate m = estimate_mean(margin);
        const bool valid = 2.0 * c.beta * c.beta * (lambda0 + w_of_t(spec, t)) < 1.0;
        out.push_back(detail::make_row(c, n, t, lambda0, m.mean, m.std_error,
                                       {{"quantity", "chain_margin"},
                                        {"lhs", estimate_mean(lhs).mean},
                                        {"rhs", estimate_mean(rhs).mean},
                                        {"in_validity_region", valid},
                                        {"holds_within_3sigma", m.mean >= -3.0 * m.std_error}}));
      }
    }
  }
  return out;
}

inline std::vector<ResultRow> run_holder_check(const ExperimentConfig& c, const DisorderSpec& spec) {
  if (!spec.has_derivative() || spec.two_point()) {
    throw ValidationError("kind", "holder_check needs a differentiable disorder");
  }
  std::vector<ResultRow> out;
  for (int n : c.n_list) {
    for (auto [s, t] : c.holder_pairs) {
      const HolderReport h = verify_holder_interpolation(spec, n, c.beta, s, t, c.replicas, c.seed, c.field_r);
      out.push_back(detail::make_row(c, n, t, std::nullopt, h.lhs, h.std_error,
                                     {{"quantity", "holder"},
                                      {"s", s},
                                      {"rhs", h.rhs},
                                      {"exponent", h.exponent},
                                      {"holds_within_ci", h.holds_within_ci}}));
    }
    if (c.t_grid.size() >= 4) {
      const MonotonicityReport m =
          verify_complete_monotonicity(spec, n, c.beta, c.t_grid, c.replicas, c.seed, c.field_r);
      for (const auto& d : m.first_differences) {
        out.push_back(detail::make_row(c, n, d.t, std::nullopt, d.value, d.std_error,
                                       {{"quantity", "first_divided_difference"}}));
      }
      for (const auto& d : m.second_differences) {
        out.push_back(detail::make_row(c, n, d.t, std::nullopt, d.value, d.std_error,
                                       {{"quantity", "second_divided_difference"}}));
      }
      out.push_back(detail::make_row(c, n, std::nullopt, std::nullopt, m.all_nonneg_within_ci ? 1.0 : 0.0,
                                     0.0, {{"quantity", "all_nonneg_within_ci"}}));
    }
  }
  return out;
}

inline std::vector<ResultRow> run_bound_ratios(const ExperimentConfig& c, const DisorderSpec& spec) {
  std::vector<ResultRow> out;
  const auto reports =
      bound_ratio_study(spec, c.beta, c.n_list, c.c_const, c.replicas, c.seed, c.field_r, c.K_const);
  for (const auto& r : reports) {
    nlohmann::json extra = {{"quantity", "bound_ratio"},
                            {"rhs_thm1", r.rhs_thm1},
                            {"ratio_thm1", r.ratio_thm1},
                            {"c_const", c.c_const},
                            {"K_const", c.K_const}};
    if (r.rhs_thm2) {
      extra["rhs_thm2"] = *r.rhs_thm2;
      extra["ratio_thm2"] = *r.ratio_thm2;
    }
    out.push_back(detail::make_row(c, r.n, std::nullopt, std::nullopt, r.measured_var, r.var_std_error, extra));
  }
  return out;
}

inline std::vector<ResultRow> run_study(const ExperimentConfig& c, const DisorderSpec& spec) {
  validate(c);
  switch (c.study) {
    case StudyKind::VarianceScaling: return run_variance_scaling(c, spec);
    case StudyKind::PhiCurve: return run_phi_curve(c, spec);
    case StudyKind::OverlapCurve: return run_overlap_curve(c, spec);
    case StudyKind::QConvexity: return run_q_convexity(c, spec);
    case StudyKind::HolderCheck: return run_holder_check(c, spec);
    case StudyKind::BoundRatios: return run_bound_ratios(c, spec);
  }
  throw std::logic_error("unhandled study");
}

inline std::vector<ResultRow> run_study(const ExperimentConfig& c) {
  return run_study(c, build_spec(c.disorder));
}

// ---- CSV ------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader = "study,N,t,lambda,estimate,std_error,extra_json";

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

namespace detail {

inline std::string csv_quote(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

inline std::vector<std::string> csv_split(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else {
      fields.back() += ch;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quote in CSV line");
  return fields;
}

}  // namespace detail

inline std::string to_csv(std::span<const ResultRow> rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const ResultRow& r : rows) {
    out += r.study;
    out += ',' + std::to_string(r.n) + ',';
    if (r.t) out += format_double(*r.t);
    out += ',';
    if (r.lambda) out += format_double(*r.lambda);
    out += ',' + format_double(r.estimate) + ',' + format_double(r.std_error) + ',';
    out += detail::csv_quote(r.extra.dump());
    out += '\n';
  }
  return out;
}

inline std::vector<ResultRow> parse_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::invalid_argument("CSV header mismatch");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::csv_split(line);
    if (f.size() != 7) throw std::invalid_argument("CSV row must have 7 fields");
    ResultRow r;
    r.study = f[0];
    r.n = std::stoi(f[1]);
    if (!f[2].empty()) r.t = parse_double(f[2]);
    if (!f[3].empty()) r.lambda = parse_double(f[3]);
    r.estimate = parse_double(f[4]);
    r.std_error = parse_double(f[5]);
    r.extra = nlohmann::json::parse(f[6]);
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Writes through a temporary file and renames, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string manifest_text(std::string_view canonical_config, std::uint64_t seed) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(canonical_config)));
  std::string out;
  out += "config_hash=fnv1a64:" + std::string(hex) + "\n";
  out += "seed=" + std::to_string(seed) + "\n";
  out += "sklab_version=" + std::string(kVersion) + "\n";
  out += "compiler=" + std::string(__VERSION__) + "\n";
  out += "json_version=" + std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH) + "\n";
  return out;
}

}  // namespace sklab
