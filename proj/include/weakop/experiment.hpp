#pragma once

// Configuration-driven experiment runners behind the CLI: lattice scaling
// rows, the weakly-(anti)commuting diagnostic report, module round-trip
// reports, and the full suite that ties them together. Every runner is a
// pure function of (config, seed) and writes byte-deterministic payloads.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "weakop/clifford.hpp"
#include "weakop/lattice.hpp"
#include "weakop/linops.hpp"
#include "weakop/matrix_io.hpp"
#include "weakop/random.hpp"
#include "weakop/report.hpp"
#include "weakop/version.hpp"
#include "weakop/weakpair.hpp"
#include "weakop/wick.hpp"

namespace weakop {

struct ExperimentConfig {
  int n = 2;
  int n1 = 1;
  std::vector<int> N_list{8, 16, 32};
  double alpha = 1.0;
  int dep_axis = 2;
  std::pair<int, int> rot_plane{1, 2};
  std::uint64_t seed = 42;
  std::optional<double> lambda0;  // empty = "auto"
  int grid_count = 11;
  std::optional<double> mu;  // empty = "auto" (2 * lambda0)
  std::string output_dir = "weakop_out";
  bool emit_matrices = false;

  FrameField frame() const {
    FrameField f;
    f.split = {n1, n - n1};
    f.rot_p = rot_plane.first;
    f.rot_q = rot_plane.second;
    f.dep_axis = dep_axis;
    f.alpha = alpha;
    return f;
  }

  void validate() const {
    if (n < 1) throw ConfigError("config key 'n': must be a positive integer");
    if (n1 < 0 || n1 > n) throw ConfigError("config key 'n1': need 0 <= n1 <= n");
    if (N_list.empty()) throw ConfigError("config key 'N_list': must not be empty");
    for (std::size_t i = 0; i < N_list.size(); ++i) {
      if (N_list[i] < 4 || N_list[i] % 2 != 0)
        throw ConfigError("config key 'N_list': entries must be even and >= 4");
      if (i > 0 && N_list[i] <= N_list[i - 1])
        throw ConfigError("config key 'N_list': must be strictly ascending");
    }
    if (!std::isfinite(alpha)) throw ConfigError("config key 'alpha': must be finite");
    if (dep_axis < 1 || dep_axis > n)
      throw ConfigError("config key 'dep_axis': out of range 1..n");
    if (alpha != 0.0 &&
        (rot_plane.first < 1 || !(rot_plane.first <= n1) || !(n1 < rot_plane.second) ||
         rot_plane.second > n))
      throw ConfigError("config key 'rot_plane': need p <= n1 < q within 1..n");
    if (grid_count < 4) throw ConfigError("config key 'grid_count': must be at least 4");
    if (lambda0 && !(*lambda0 > 0))
      throw ConfigError("config key 'lambda0': must be positive or \"auto\"");
    if (mu && !(*mu > 0)) throw ConfigError("config key 'mu': must be positive or \"auto\"");
    if (output_dir.empty()) throw ConfigError("config key 'output_dir': must not be empty");
  }
};

inline ExperimentConfig parse_config(const Json& j) {
  ExperimentConfig cfg;
  auto auto_or_positive = [](const Json& v, const char* key) -> std::optional<double> {
    if (v.is_string()) {
      if (v.get<std::string>() == "auto") return std::nullopt;
      throw ConfigError(std::string("config key '") + key + "': expected number or \"auto\"");
    }
    if (!v.is_number())
      throw ConfigError(std::string("config key '") + key + "': expected number or \"auto\"");
    return v.get<double>();
  };
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "n") cfg.n = value.get<int>();
      else if (key == "n1") cfg.n1 = value.get<int>();
      else if (key == "N_list") cfg.N_list = value.get<std::vector<int>>();
      else if (key == "alpha") cfg.alpha = value.get<double>();
      else if (key == "dep_axis") cfg.dep_axis = value.get<int>();
      else if (key == "rot_plane") {
        const auto v = value.get<std::vector<int>>();
        if (v.size() != 2) throw ConfigError("config key 'rot_plane': expected [p, q]");
        cfg.rot_plane = {v[0], v[1]};
      } else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "lambda0") cfg.lambda0 = auto_or_positive(value, "lambda0");
      else if (key == "grid_count") cfg.grid_count = value.get<int>();
      else if (key == "mu") cfg.mu = auto_or_positive(value, "mu");
      else if (key == "output_dir") cfg.output_dir = value.get<std::string>();
      else if (key == "emit_matrices") cfg.emit_matrices = value.get<bool>();
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': wrong type");
    }
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(is);
  } catch (const std::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return parse_config(j);
}

inline Json config_echo(const ExperimentConfig& cfg) {
  Json j;
  j["n"] = cfg.n;
  j["n1"] = cfg.n1;
  j["N_list"] = cfg.N_list;
  j["alpha"] = cfg.alpha;
  j["dep_axis"] = cfg.dep_axis;
  j["rot_plane"] = {cfg.rot_plane.first, cfg.rot_plane.second};
  j["seed"] = cfg.seed;
  if (cfg.lambda0) j["lambda0"] = *cfg.lambda0;
  else j["lambda0"] = "auto";
  j["grid_count"] = cfg.grid_count;
  if (cfg.mu) j["mu"] = *cfg.mu;
  else j["mu"] = "auto";
  j["output_dir"] = cfg.output_dir;
  j["emit_matrices"] = cfg.emit_matrices;
  return j;
}

inline Json tolerance_echo() {
  Json j;
  j["hermitian_rel"] = tol::hermitian_rel;
  j["eig_residual"] = tol::eig_residual;
  j["resolvent_residual"] = tol::resolvent_residual;
  j["clifford"] = tol::clifford;
  j["frame_orthonormal"] = tol::frame_orthonormal;
  j["model_identity"] = tol::model_identity;
  j["stencil_off_mass"] = tol::stencil_off_mass;
  j["split_reconstruct"] = tol::split_reconstruct;
  j["wick_roundtrip"] = tol::wick_roundtrip;
  j["doubling_rel"] = tol::doubling_rel;
  j["gen_eig_rel"] = tol::gen_eig_rel;
  return j;
}

inline TorusModel model_for(const ExperimentConfig& cfg, int N) {
  return make_torus_model(TorusLattice{cfg.n, N}, cfg.frame());
}

// ---------------------------------------------------------------------------
// lattice scaling rows

struct LatticeRow {
  int N = 0;
  long dim = 0;
  double norm_anticomm = 0.0;
  double C_combined = 0.0;
  double C_old = 0.0;
  double K_split = 0.0;
  bool bound_ok = false;
  double split_residual = 0.0;
  double rb1 = 0.0, rb2 = 0.0;
};

/// Heavy shared computation for one lattice size: the anticommutator, both
/// Definition-2.1 constants, the first-order split and the Lemma-3.1 chain.
inline LatticeRow compute_lattice_row(const TorusModel& model) {
  LatticeRow row;
  row.N = model.lattice.N;
  row.dim = model.dim();
  const CMatrix x = model.D1 * model.D2 + model.D2 * model.D1;
  CMatrix xx = x.adjoint() * x;
  xx = 0.5 * (xx + xx.adjoint());

  if (x.cwiseAbs().maxCoeff() == 0.0) {
    row.norm_anticomm = 0.0;
  } else {
    const RVector ev = herm_eigenvalues(xx);
    row.norm_anticomm = std::sqrt(std::max(0.0, ev(ev.size() - 1)));
  }

  const CMatrix s2 = model.D1 * model.D1;
  const CMatrix t2 = model.D2 * model.D2;
  const CMatrix id = CMatrix::Identity(row.dim, row.dim);
  CMatrix g = id + s2 + t2;
  g = 0.5 * (g + g.adjoint());
  CMatrix g_old = id + s2;
  g_old = 0.5 * (g_old + g_old.adjoint());
  row.C_combined = gen_eig_max(xx, g);
  row.C_old = gen_eig_max(xx, g_old);

  const auto [a1, a2] = split_first_order(x, model);
  row.split_residual = (a1 + a2 - x).norm() / (1.0 + x.norm());
  row.rb1 = relative_bound_norm(a1, model.D1);
  row.rb2 = relative_bound_norm(a2, model.D2);
  row.K_split = row.rb1 + row.rb2;
  row.bound_ok =
      row.C_combined <= 3.0 * row.K_split * row.K_split * (1.0 + tol::gen_eig_rel);
  return row;
}

inline std::string lattice_csv(const std::vector<LatticeRow>& rows) {
  std::string out = "N,dim,norm_anticomm,C_combined,C_old,K_split,bound_3K2_ok\n";
  for (const auto& r : rows) {
    out += std::to_string(r.N) + "," + std::to_string(r.dim) + "," +
           fmt_double(r.norm_anticomm) + "," + fmt_double(r.C_combined) + "," +
           fmt_double(r.C_old) + "," + fmt_double(r.K_split) + "," +
           (r.bound_ok ? "1" : "0") + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// weakpair diagnostic report

struct WeakpairOptions {
  std::optional<double> lambda0;
  int grid_count = 11;
  std::uint64_t seed = 42;
  std::optional<double> mu;
  bool both_signs = true;
};

struct WeakpairReport {
  std::string kind;
  int dim = 0;
  std::uint64_t seed = 0;
  double C = 0.0;
  double C_old = 0.0;
  double lambda0 = 0.0;
  double mu = 0.0;
  double C_doubled = std::numeric_limits<double>::quiet_NaN();
  double doubling_error = std::numeric_limits<double>::quiet_NaN();
  std::map<std::string, DiagnosticsTable> tables;
  std::map<std::string, double> bounds;
  std::vector<double> resolvent_singular_lambdas;
  std::vector<CheckRecord> checks;
};

/// Full diagnostic bundle for one pair. Anticommutator pairs are doubled
/// first (the resolvent-family lemmas concern commutators) and additionally
/// get the corrected-resolvent error study on the original pair.
namespace detail {

/// Zero tables are the degenerate-input oracle: they pass by being exactly
/// zero, otherwise the fitted rate must land in [lo, hi].
inline CheckRecord rate_or_zero(const std::string& name, const DiagnosticsTable& t,
                                double lo, double hi) {
  if (t.max_value() == 0.0)
    return CheckRecord{name + "_identically_zero", 0.0, 0.0, "==", true};
  return check_in(name, t.fitted_rate, lo, hi);
}

inline CheckRecord decay_or_zero(const std::string& name, const DiagnosticsTable& t,
                                 double factor) {
  if (t.max_value() == 0.0)
    return CheckRecord{name + "_identically_zero", 0.0, 0.0, "==", true};
  return check_le(name, t.last_value(), factor * t.first_value());
}

}  // namespace detail

inline WeakpairReport run_weakpair_report(const OperatorPair& pair,
                                          const WeakpairOptions& opts) {
  WeakpairReport rep;
  rep.kind = to_string(pair.kind());
  rep.dim = static_cast<int>(pair.dim());
  rep.seed = opts.seed;
  rep.C = condition1_constant(pair);
  rep.C_old = old_constant(pair);
  rep.lambda0 = opts.lambda0 ? *opts.lambda0 : auto_lambda0(pair, rep.C);
  rep.mu = opts.mu ? *opts.mu : 2.0 * rep.lambda0;

  const bool needs_doubling = pair.kind() == BracketKind::anticommutator;
  const OperatorPair app = needs_doubling ? double_pair(pair) : pair;
  if (needs_doubling) {
    rep.C_doubled = condition1_constant(app);
    rep.doubling_error = std::abs(rep.C_doubled - rep.C);
    rep.checks.push_back(check_le("doubling_preserves_constant", rep.doubling_error,
                                  tol::doubling_rel * (1.0 + rep.C)));
  }

  const TableMeta meta{opts.seed, static_cast<int>(app.dim()), rep.lambda0};
  const std::vector<CVector> xis = test_vectors(app, opts.seed);

  std::vector<double> n_grid;
  {
    double v = rep.lambda0;
    for (int k = 0; k < opts.grid_count; ++k, v *= 2.0) n_grid.push_back(v);
  }

  const std::vector<int> signs = opts.both_signs ? std::vector<int>{+1, -1}
                                                 : std::vector<int>{+1};
  for (const int sign : signs) {
    const std::string sfx = sign > 0 ? "_plus" : "_minus";
    const auto grid = lambda_grid(rep.lambda0, opts.grid_count, sign);
    const Complex mu_shift(0, sign > 0 ? rep.mu : -rep.mu);

    const auto a1 = lemmaA1_table_set(app, xis, grid, meta);
    const char* a1_names[3] = {"lemmaA1_S", "lemmaA1_T", "lemmaA1_ST"};
    for (int i = 0; i < 3; ++i) {
      rep.tables[std::string(a1_names[i]) + sfx] = a1[static_cast<std::size_t>(i)];
      rep.checks.push_back(detail::rate_or_zero(std::string(a1_names[i]) + "_rate" + sfx,
                                                a1[static_cast<std::size_t>(i)], -1.2, -0.8));
    }

    const auto a2 = lemmaA2_table_set(app, mu_shift, xis, grid, meta);
    const char* a2_names[2] = {"lemmaA2_ST", "lemmaA2_TS"};
    for (int i = 0; i < 2; ++i) {
      rep.tables[std::string(a2_names[i]) + sfx] = a2[static_cast<std::size_t>(i)];
      rep.checks.push_back(detail::decay_or_zero(std::string(a2_names[i]) + "_decay" + sfx,
                                                 a2[static_cast<std::size_t>(i)], 0.2));
    }

    const auto p23 = prop23_table_set(app, xis, grid, meta);
    const char* p23_names[2] = {"prop23_S", "prop23_T"};
    for (int i = 0; i < 2; ++i) {
      rep.tables[std::string(p23_names[i]) + sfx] = p23[static_cast<std::size_t>(i)];
      rep.checks.push_back(detail::decay_or_zero(std::string(p23_names[i]) + "_decay" + sfx,
                                                 p23[static_cast<std::size_t>(i)], 0.2));
    }

    const LemmaA3Result a3 = lemmaA3_bound(app, grid, meta);
    rep.tables["lemmaA3_S" + sfx] = a3.s_table;
    rep.tables["lemmaA3_T" + sfx] = a3.t_table;
    rep.bounds["lemmaA3_sup_S" + sfx] = a3.s_sup;
    rep.bounds["lemmaA3_sup_T" + sfx] = a3.t_sup;
    rep.bounds["lemmaA3_uniformity_ratio" + sfx] = a3.uniformity_ratio;
    rep.checks.push_back(
        check_le("lemmaA3_uniformity_ratio" + sfx, a3.uniformity_ratio, 3.0));

    if (needs_doubling) {
      std::vector<std::pair<double, double>> rows;
      for (const Complex& lam : grid) {
        try {
          rows.emplace_back(std::abs(lam),
                            resolvent_approx_error(pair, mu_shift, lam));
        } catch (const Singular&) {
          rep.resolvent_singular_lambdas.push_back(std::abs(lam) * sign);
        }
      }
      if (rows.size() >= 2) {
        const DiagnosticsTable t = make_table(std::move(rows), meta);
        rep.tables["resolvent_approx" + sfx] = t;
        rep.checks.push_back(
            detail::rate_or_zero("resolvent_approx_rate" + sfx, t, -2.5, -0.8));
      }
    }
  }

  const auto [an_norms, an_conv] = approx_identity_tables(app, xis, n_grid, meta);
  rep.tables["approx_identity_norm"] = an_norms;
  rep.tables["approx_identity_conv"] = an_conv;
  rep.bounds["approx_identity_max_norm"] = an_norms.max_value();
  rep.checks.push_back(
      check_le("approx_identity_norm", an_norms.max_value(), 1.0 + 1e-9));
  rep.checks.push_back(detail::rate_or_zero("approx_identity_rate", an_conv, -1.3, -0.7));

  const DiagnosticsTable sum_tab = sum_approx_table(app, xis, n_grid, meta);
  rep.tables["sum_approx"] = sum_tab;
  rep.checks.push_back(detail::decay_or_zero("sum_approx_decay", sum_tab, 0.2));

  {
    std::vector<std::pair<double, double>> rows;
    for (const double m : n_grid) {
      const Complex z(0, m);
      rows.emplace_back(m, lm_lemma32_constant(app, z, z));
    }
    const DiagnosticsTable t = make_table(std::move(rows), meta);
    rep.tables["lemma32_constant"] = t;
    double worst = 1.0;
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      const double a = t.rows[i - 1].second, b = t.rows[i].second;
      if (a > 0 && b > 0) worst = std::max(worst, std::max(a, b) / std::min(a, b));
    }
    rep.bounds["lemma32_stabilization_ratio"] = worst;
    rep.checks.push_back(check_le("lemma32_stabilization_ratio", worst, 2.0));
  }
  return rep;
}

inline Json weakpair_summary_json(const WeakpairReport& rep) {
  Json j;
  j["kind"] = rep.kind;
  j["dim"] = rep.dim;
  j["seed"] = rep.seed;
  j["C"] = rep.C;
  j["C_old"] = rep.C_old;
  j["lambda0"] = rep.lambda0;
  j["mu"] = rep.mu;
  if (std::isfinite(rep.C_doubled)) {
    j["C_doubled"] = rep.C_doubled;
    j["doubling_error"] = rep.doubling_error;
  }
  Json rates;
  for (const auto& [name, table] : rep.tables) rates[name] = table.fitted_rate;
  j["rates"] = std::move(rates);
  Json bounds;
  for (const auto& [name, value] : rep.bounds) bounds[name] = value;
  j["bounds"] = std::move(bounds);
  if (!rep.resolvent_singular_lambdas.empty())
    j["resolvent_singular_lambdas"] = rep.resolvent_singular_lambdas;
  j["checks"] = to_json(rep.checks);
  return j;
}

// ---------------------------------------------------------------------------
// wick reports

struct WickReport {
  std::string source;
  int dim = 0;
  double residual_forward = 0.0;
  double residual_reverse = 0.0;
  double C_anticommute = 0.0;
  std::vector<double> commutator_norms;
  std::vector<double> proxy_eigs_head;
  double proxy_decay_rate = 0.0;
  double herm_residual_re = 0.0;
  double herm_residual_im = 0.0;
  std::vector<CheckRecord> checks;
};

inline WickReport run_wick_report_matrix(const CMatrix& d, const std::string& source) {
  WickReport rep;
  rep.source = source;
  rep.dim = static_cast<int>(d.rows());
  rep.residual_forward = roundtrip_residual(d);
  const ModuleCheckReport mc = check_indefinite_module(d);
  rep.C_anticommute = mc.C_anticommute;
  rep.herm_residual_re = mc.herm_residual_re;
  rep.herm_residual_im = mc.herm_residual_im;
  const std::size_t head = std::min<std::size_t>(8, mc.proxy_eigenvalues.size());
  rep.proxy_eigs_head.assign(mc.proxy_eigenvalues.begin(),
                             mc.proxy_eigenvalues.begin() + head);
  rep.proxy_decay_rate = mc.proxy_decay_rate;
  const WickQuadruple q = wick_rotate(d);
  rep.residual_reverse = roundtrip_residual_pair(q.Dplus, q.Dminus);
  rep.checks.push_back(check_le("roundtrip_forward", rep.residual_forward,
                                tol::wick_roundtrip * (1.0 + op_norm(d))));
  rep.checks.push_back(check_le("roundtrip_reverse", rep.residual_reverse,
                                tol::wick_roundtrip * (1.0 + op_norm(q.Dplus))));
  return rep;
}

/// Report for the canonical lattice operator D = (D1+D2)/2 + i (D1-D2)/2,
/// probed against f = exp(i x_1).
inline WickReport run_wick_report_model(const TorusModel& model) {
  const CMatrix d = lattice_indefinite_operator(model);
  WickReport rep;
  rep.source = "lattice N=" + std::to_string(model.lattice.N);
  rep.dim = static_cast<int>(d.rows());
  rep.residual_forward = roundtrip_residual(d);
  rep.residual_reverse = roundtrip_residual_pair(CMatrix(model.D1 + model.D2),
                                                 CMatrix(model.D1 - model.D2));
  const long sites = model.lattice.sites();
  CVector f(sites);
  for (long x = 0; x < sites; ++x)
    f(x) = std::polar(1.0, model.lattice.coordinate(x, 1));
  const ModuleCheckReport mc = check_indefinite_module(d, {f}, &model);
  rep.C_anticommute = mc.C_anticommute;
  rep.commutator_norms = mc.commutator_norms;
  rep.herm_residual_re = mc.herm_residual_re;
  rep.herm_residual_im = mc.herm_residual_im;
  const std::size_t head = std::min<std::size_t>(8, mc.proxy_eigenvalues.size());
  rep.proxy_eigs_head.assign(mc.proxy_eigenvalues.begin(),
                             mc.proxy_eigenvalues.begin() + head);
  rep.proxy_decay_rate = mc.proxy_decay_rate;
  const double scale = 1.0 + op_norm(model.D);
  rep.checks.push_back(
      check_le("roundtrip_forward", rep.residual_forward, tol::wick_roundtrip * scale));
  rep.checks.push_back(
      check_le("roundtrip_reverse", rep.residual_reverse, tol::wick_roundtrip * scale));
  rep.checks.push_back(check_le("herm_residual_re", rep.herm_residual_re, 1e-13));
  rep.checks.push_back(check_le("herm_residual_im", rep.herm_residual_im, 1e-13));
  return rep;
}

inline Json wick_report_json(const WickReport& rep) {
  Json j;
  j["source"] = rep.source;
  j["dim"] = rep.dim;
  j["residual_forward"] = rep.residual_forward;
  j["residual_reverse"] = rep.residual_reverse;
  j["C_anticommute"] = rep.C_anticommute;
  j["commutator_norms"] = rep.commutator_norms;
  j["proxy_eigs_head"] = rep.proxy_eigs_head;
  j["proxy_decay_rate"] = rep.proxy_decay_rate;
  j["herm_residual_re"] = rep.herm_residual_re;
  j["herm_residual_im"] = rep.herm_residual_im;
  j["checks"] = to_json(rep.checks);
  return j;
}

}  // namespace weakop
