#include "volflow/suites.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "volflow/fig8.hpp"
#include "volflow/forms.hpp"
#include "volflow/variation.hpp"

namespace volflow {

namespace {

constexpr double kTolAlgebraic = 1e-9;
constexpr double kTolCrossOracle = 1e-10;
constexpr double kTolExact = 1e-14;

struct Check {
  std::string name;
  std::vector<int> sizes;
  double tolerance;
  // residual of one trial at size n
  std::function<double(int n, std::uint64_t trial_seed)> run;
  bool structural = false;  // deterministic dimension counts; one trial suffices
};

SlElement rand_sl_for(int n, std::uint64_t s, int slot) {
  return random_sl(n, sub_seed(s, 11, slot));
}

BorelElement rand_b_for(int n, std::uint64_t s, int slot) {
  return random_borel(n, sub_seed(s, 13, slot));
}

CuspJet random_jet(int n, std::uint64_t s) {
  return CuspJet(rand_b_for(n, s, 0), rand_b_for(n, s, 1), rand_b_for(n, s, 2),
                 rand_b_for(n, s, 3));
}

double check_coboundary_beta(int n, std::uint64_t s) {
  std::vector<SlElement> args = {rand_b_for(n, s, 0).sl(), rand_b_for(n, s, 1).sl(),
                                 rand_b_for(n, s, 2).sl()};
  double lhs = ce_diff_scalar(beta_cochain(n), args);
  double rhs = omega_eval(args[0], args[1], args[2]);
  return std::abs(lhs - rhs);
}

double check_coboundary_gamma(int n, std::uint64_t s) {
  std::vector<SlElement> args = {rand_sl_for(n, s, 0), rand_sl_for(n, s, 1)};
  SlElement probe = rand_sl_for(n, s, 2);
  double lhs = ce_diff_dual(gamma_dual(n), args, probe);
  double rhs = omega_eval(args[0], args[1], probe);
  return std::abs(lhs - rhs);
}

double check_zeta_decomposition(int n, std::uint64_t s) {
  BorelElement x = rand_b_for(n, s, 0), y = rand_b_for(n, s, 1);
  double lhs = zeta_eval(x, y);
  double rhs = gamma_eval(x.sl(), y.sl()) - beta_eval(x, y);
  return std::abs(lhs - rhs);
}

double check_su_invariance(int n, std::uint64_t s) {
  CMat k = expm(random_su(n, sub_seed(s, 17, 0)).mat());
  SlElement a = rand_sl_for(n, s, 1), b = rand_sl_for(n, s, 2), c = rand_sl_for(n, s, 3);
  double before = omega_eval(a, b, c);
  double after = omega_eval(adjoint_action(k, a), adjoint_action(k, b), adjoint_action(k, c));
  return std::abs(after - before);
}

double check_omega_alternating(int n, std::uint64_t s) {
  SlElement a = rand_sl_for(n, s, 0), b = rand_sl_for(n, s, 1), c = rand_sl_for(n, s, 2);
  double r = std::abs(omega_eval(a, b, c) + omega_eval(b, a, c));
  r = std::max(r, std::abs(omega_eval(a, b, c) + omega_eval(a, c, b)));
  r = std::max(r, std::abs(omega_eval(a, b, a)));
  return r;
}

double check_omega_real(int n, std::uint64_t s) {
  CMat pa = hermitian_part(rand_sl_for(n, s, 0).mat());
  CMat pb = hermitian_part(rand_sl_for(n, s, 1).mat());
  CMat pc = hermitian_part(rand_sl_for(n, s, 2).mat());
  Cplx val = Cplx(0, 2) * (pa * commutator(pb, pc)).trace();
  return std::abs(val.imag());
}

double check_omega_stability(int n, std::uint64_t s) {
  SlElement a = rand_sl_for(n, s, 0), b = rand_sl_for(n, s, 1), c = rand_sl_for(n, s, 2);
  auto embed = [n](const SlElement& x) {
    CMat big = CMat::Zero(n + 1, n + 1);
    big.topLeftCorner(n, n) = x.mat();
    return SlElement(std::move(big));
  };
  return std::abs(omega_eval(embed(a), embed(b), embed(c)) - omega_eval(a, b, c));
}

double check_omega_su2_restriction(int n, std::uint64_t s) {
  // embed a random 2x2 triple into positions (j,k) and compare with n=2
  std::uint64_t h = sub_seed(s, 23, 0);
  int j = static_cast<int>(h % static_cast<std::uint64_t>(n));
  int k = static_cast<int>((h / 7) % static_cast<std::uint64_t>(n));
  if (j == k) k = (j + 1) % n;
  if (j > k) std::swap(j, k);
  auto embed = [&](const SlElement& x) {
    CMat big = CMat::Zero(n, n);
    big(j, j) = x.mat()(0, 0);
    big(j, k) = x.mat()(0, 1);
    big(k, j) = x.mat()(1, 0);
    big(k, k) = x.mat()(1, 1);
    return SlElement(std::move(big));
  };
  SlElement a = rand_sl_for(2, s, 0), b = rand_sl_for(2, s, 1), c = rand_sl_for(2, s, 2);
  return std::abs(omega_eval(embed(a), embed(b), embed(c)) - omega_eval(a, b, c));
}

double check_bracket_projection(int n, std::uint64_t s) {
  SlElement a = rand_sl_for(n, s, 0), b = rand_sl_for(n, s, 1);
  CMat su_a = anti_hermitian_part(a.mat()), isu_a = hermitian_part(a.mat());
  CMat su_b = anti_hermitian_part(b.mat()), isu_b = hermitian_part(b.mat());
  CMat lhs1 = anti_hermitian_part(commutator(a.mat(), b.mat()));
  CMat rhs1 = commutator(su_a, su_b) + commutator(isu_a, isu_b);
  CMat lhs2 = hermitian_part(commutator(a.mat(), b.mat()));
  CMat rhs2 = commutator(su_a, isu_b) + commutator(isu_a, su_b);
  return std::max(max_abs(lhs1 - rhs1), max_abs(lhs2 - rhs2));
}

double check_beta_torus_invariance(int n, std::uint64_t s) {
  BorelElement x = rand_b_for(n, s, 0), y = rand_b_for(n, s, 1);
  std::mt19937_64 rng(sub_seed(s, 29, 0));
  std::normal_distribution<double> gauss;
  CMat t = CMat::Zero(n, n);
  double total = 0;
  for (int i = 0; i < n; ++i) {
    double v = gauss(rng);
    t(i, i) = Cplx(0, v);
    total += v;
  }
  for (int i = 0; i < n; ++i) t(i, i) -= Cplx(0, total / n);
  BorelElement tx(commutator(t, x.mat())), ty(commutator(t, y.mat()));
  return std::abs(beta_eval(tx, y) + beta_eval(x, ty));
}

double check_omega_expansion(int n, std::uint64_t s) {
  SlElement a = rand_sl_for(n, s, 0), b = rand_sl_for(n, s, 1), c = rand_sl_for(n, s, 2);
  return std::abs(omega_eval(a, b, c) - omega_basis_expansion_eval(a, b, c));
}

double check_rate_dual_path(int n, std::uint64_t s) {
  std::array<CuspJet, 1> jets = {random_jet(n, s)};
  return std::abs(volume_rate(jets) - volume_rate_via_zeta(jets));
}

double check_rate_shift_invariance(int n, std::uint64_t s) {
  CuspJet jet = random_jet(n, s);
  std::mt19937_64 rng(sub_seed(s, 31, 0));
  CMat shifted = jet.a.mat();
  for (int i = 0; i < n; ++i)
    shifted(i, i) += Cplx(0, 2.0 * kPi * static_cast<double>(static_cast<int>(rng() % 7) - 3));
  CuspJet jet2(BorelElement(shifted), jet.b, jet.da, jet.db);
  std::array<CuspJet, 1> j1 = {jet}, j2 = {jet2};
  return std::abs(volume_rate(j1) - volume_rate(j2));
}

double check_rate_permutation_invariance(int n, std::uint64_t s) {
  CuspJet jet = random_jet(n, s);
  std::mt19937_64 rng(sub_seed(s, 37, 0));
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  auto permute_diag = [&](const BorelElement& x) {
    CMat m = x.mat();
    for (int i = 0; i < n; ++i) m(i, i) = x.mat()(perm[i], perm[i]);
    return BorelElement(std::move(m));
  };
  CuspJet jet2(permute_diag(jet.a), permute_diag(jet.b), permute_diag(jet.da),
               permute_diag(jet.db));
  std::array<CuspJet, 1> j1 = {jet}, j2 = {jet2};
  return std::abs(volume_rate(j1) - volume_rate(j2));
}

double check_rate_unipotent(int n, std::uint64_t s) {
  auto strip_diag = [n](const BorelElement& x) {
    CMat m = x.mat();
    for (int i = 0; i < n; ++i) m(i, i) = Cplx(0, 0);
    return BorelElement(std::move(m));
  };
  CuspJet jet = random_jet(n, s);
  CuspJet uni(strip_diag(jet.a), strip_diag(jet.b), strip_diag(jet.da), strip_diag(jet.db));
  std::array<CuspJet, 1> jets = {uni};
  return std::abs(volume_rate(jets));
}

double check_hodgson(int /*n*/, std::uint64_t s) {
  std::mt19937_64 rng(sub_seed(s, 41, 0));
  std::normal_distribution<double> gauss;
  HodgsonData d{gauss(rng), gauss(rng), gauss(rng), gauss(rng),
                gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
  std::array<CuspJet, 1> jets = {hodgson_jet(d)};
  std::array<HodgsonData, 1> ds = {d};
  return std::abs(volume_rate(jets) - hodgson_rate(ds));
}

double check_dgg(int n, std::uint64_t s) {
  CuspJet jet = random_jet(n, s);
  std::array<CuspJet, 1> jets = {jet};
  double rate = volume_rate(jets);
  double g = dgg_rate(n, dgg_coords(jet));
  double residual = std::abs(g - kDggSign * rate);
  // any sign flip across trials is a hard failure
  if (std::abs(rate) > 1e-6 && g / (kDggSign * rate) < 0) return 1.0;
  return residual;
}

double check_bfg(int /*n*/, std::uint64_t s) {
  CuspJet jet = random_jet(3, s);
  std::array<CuspJet, 1> jets = {jet};
  double rate = volume_rate(jets);
  double g = 4.0 * bfg_rate(bfg_coords(jet));
  if (std::abs(rate) > 1e-6 && g / (kBfgSign * rate) < 0) return 1.0;
  return std::abs(g - kBfgSign * rate);
}

double check_veronese_trace(int n, std::uint64_t s) {
  SlElement x = rand_sl_for(2, s, 0), y = rand_sl_for(2, s, 1);
  double c = std::round(static_cast<double>(n + 1) * n * (n - 1) / 6.0);
  Cplx lhs = (veronese_algebra(n, x).mat() * veronese_algebra(n, y).mat()).trace();
  Cplx rhs = c * (x.mat() * y.mat()).trace();
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

double check_veronese_rate_scaling(int n, std::uint64_t s) {
  CuspJet jet2 = random_jet(2, s);
  std::array<CuspJet, 1> small = {jet2};
  std::array<CuspJet, 1> big = {veronese_jet(n, jet2)};
  double c = std::round(static_cast<double>(n + 1) * n * (n - 1) / 6.0);
  double lhs = volume_rate(big);
  double rhs = c * volume_rate(small);
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

double check_veronese_homomorphism(int n, std::uint64_t s) {
  SlElement x = rand_sl_for(2, s, 0), y = rand_sl_for(2, s, 1);
  double r = max_abs(commutator(veronese_algebra(n, x).mat(), veronese_algebra(n, y).mat()) -
                     veronese_algebra(n, bracket(x, y)).mat());
  CMat m1 = expm(0.3 * x.mat()), m2 = expm(0.3 * y.mat());
  double scale = std::pow(std::max(1.0, std::max(max_abs(m1), max_abs(m2))),
                          static_cast<double>(n - 1));
  double rg = max_abs(veronese_group(n, m1 * m2) - veronese_group(n, m1) * veronese_group(n, m2));
  return std::max(r, rg / std::max(1.0, scale));
}

double check_exp_log_roundtrip(int n, std::uint64_t s) {
  // diagonal imaginary parts kept inside (-pi, pi), no reference
  BorelElement x = rand_b_for(n, s, 0);
  CMat m = 0.35 * x.mat();
  for (int i = 0; i < n; ++i)
    if (std::abs(m(i, i).imag()) > 2.8) m(i, i) = Cplx(m(i, i).real(), 0.0);
  Cplx shift = m.trace() / static_cast<double>(n);
  for (int i = 0; i < n; ++i) m(i, i) -= shift;
  BorelElement y(m);
  BorelElement back = branch_log_upper(expm(y.mat()));
  return max_abs(back.mat() - y.mat());
}

double check_triangularize(int n, std::uint64_t s) {
  // commuting pair with a shared random eigenbasis
  std::mt19937_64 rng(sub_seed(s, 43, 0));
  std::normal_distribution<double> gauss;
  CMat p(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p(i, j) = Cplx(gauss(rng), gauss(rng));
  Eigen::FullPivLU<CMat> lu(p);
  CMat pinv = lu.inverse();
  auto rand_diag = [&] {
    CMat d = CMat::Zero(n, n);
    Cplx logdet(0, 0);
    for (int i = 0; i < n; ++i) {
      d(i, i) = std::exp(Cplx(0.5 * gauss(rng), 0.5 * gauss(rng)));
      logdet += std::log(d(i, i));
    }
    d *= std::exp(-logdet / static_cast<double>(n));
    return d;
  };
  std::array<CMat, 2> ms = {p * rand_diag() * pinv, p * rand_diag() * pinv};
  Triangularization tri = commuting_triangularize(ms);
  double r = 0;
  for (int i = 0; i < 2; ++i) {
    r = std::max(r, strict_lower_max(tri.uppers[i]));
    r = std::max(r, max_abs(tri.conjugator * tri.uppers[i] * tri.conjugator.adjoint() - ms[i]) /
                        std::max(1.0, max_abs(ms[i])));
  }
  return r;
}

double check_invariant_dims_su(int n, std::uint64_t) {
  return std::abs(invariant_two_form_dimension(n) - 0);
}

double check_invariant_dims_borel(int n, std::uint64_t) {
  int expected = n * (n - 1) / 2 + (n - 1) * (n - 2) / 2;
  return std::abs(borel_invariant_two_form_dimension(n) - expected);
}

double check_invariant_dims_one_forms(int n, std::uint64_t) {
  return std::abs(borel_invariant_one_form_dimension(n) - (n - 1));
}

std::vector<Check> all_checks(const std::vector<int>& sizes) {
  std::vector<int> dims_sizes, small_sizes;
  for (int n : sizes) {
    if (n >= 2 && n <= 4) dims_sizes.push_back(n);
    if (n >= 2 && n <= 3) small_sizes.push_back(n);
  }
  std::vector<Check> cs = {
      {"coboundary_beta_omega", sizes, kTolAlgebraic, check_coboundary_beta},
      {"coboundary_gamma_var_omega", sizes, kTolAlgebraic, check_coboundary_gamma},
      {"zeta_decomposition", sizes, kTolAlgebraic, check_zeta_decomposition},
      {"omega_su_invariance", sizes, kTolAlgebraic, check_su_invariance},
      {"omega_alternating", sizes, kTolAlgebraic, check_omega_alternating},
      {"omega_real_valued", sizes, 1e-12, check_omega_real},
      {"omega_stability", sizes, kTolCrossOracle, check_omega_stability},
      {"omega_su2_restriction", sizes, kTolCrossOracle, check_omega_su2_restriction},
      {"bracket_projection_rule", sizes, 1e-10, check_bracket_projection},
      {"beta_torus_invariance", sizes, kTolAlgebraic, check_beta_torus_invariance},
      {"omega_expansion_oracle", sizes, kTolCrossOracle, check_omega_expansion},
      {"rate_dual_path", sizes, 1e-12, check_rate_dual_path},
      {"rate_shift_invariance", sizes, kTolExact, check_rate_shift_invariance},
      {"rate_permutation_invariance", sizes, kTolExact, check_rate_permutation_invariance},
      {"rate_unipotent_zero", sizes, kTolExact, check_rate_unipotent},
      {"hodgson_cross", {2}, 1e-12, check_hodgson},
      {"dgg_cross", sizes, kTolCrossOracle, check_dgg},
      {"bfg_cross", {3}, kTolCrossOracle, check_bfg},
      {"veronese_trace_identity", {3, 4, 5, 6, 7}, kTolCrossOracle, check_veronese_trace},
      {"veronese_rate_scaling", {3, 4, 5, 6}, kTolCrossOracle, check_veronese_rate_scaling},
      {"veronese_homomorphism", {3, 4, 5}, kTolAlgebraic, check_veronese_homomorphism},
      {"exp_log_roundtrip", sizes, kTolAlgebraic, check_exp_log_roundtrip},
      {"triangularize_reconstruction", sizes, 1e-8, check_triangularize},
  };
  if (!small_sizes.empty())
    cs.push_back({"invariant_two_forms_su", small_sizes, 0.5, check_invariant_dims_su, true});
  if (!dims_sizes.empty()) {
    cs.push_back(
        {"invariant_two_forms_borel", dims_sizes, 0.5, check_invariant_dims_borel, true});
    cs.push_back(
        {"invariant_one_forms_borel", dims_sizes, 0.5, check_invariant_dims_one_forms, true});
  }
  return cs;
}

// residuals for all trials, computed with at most `threads` workers; the
// reduction order is fixed by trial index regardless of thread count
double max_residual_over_trials(const Check& c, int n, int trials, std::uint64_t seed,
                                int threads) {
  const int eff_trials = c.structural ? 1 : trials;
  std::vector<double> res(eff_trials);
  auto work = [&](int lo, int hi) {
    for (int t = lo; t < hi; ++t)
      res[t] = c.run(n, sub_seed(seed, std::hash<std::string>{}(c.name), n, t));
  };
  if (threads <= 1 || eff_trials < 4) {
    work(0, eff_trials);
  } else {
    int nt = std::min(threads, eff_trials);
    std::vector<std::thread> pool;
    int chunk = (eff_trials + nt - 1) / nt;
    for (int i = 0; i < nt; ++i)
      pool.emplace_back(work, i * chunk, std::min(eff_trials, (i + 1) * chunk));
    for (auto& th : pool) th.join();
  }
  double m = 0;
  for (double r : res) m = std::max(m, r);
  return m;
}

}  // namespace

std::vector<CheckResult> run_verify_suite(const SuiteOptions& opts) {
  std::vector<CheckResult> out;
  for (const Check& c : all_checks(opts.sizes)) {
    for (int n : c.sizes) {
      auto t0 = std::chrono::steady_clock::now();
      double mr = max_residual_over_trials(c, n, opts.trials, opts.seed, opts.threads);
      auto t1 = std::chrono::steady_clock::now();
      CheckResult r;
      r.name = c.name + "[n=" + std::to_string(n) + "]";
      r.trials = c.structural ? 1 : opts.trials;
      r.max_residual = mr;
      r.tolerance = opts.tol_override.value_or(c.tolerance);
      r.pass = mr < r.tolerance;
      r.millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
      out.push_back(std::move(r));
    }
  }
  return out;
}

bool all_pass(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

std::string suite_to_json(const std::vector<CheckResult>& results) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : results)
    doc.push_back({{"name", r.name},
                   {"trials", r.trials},
                   {"max_residual", r.max_residual},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass},
                   {"millis", r.millis}});
  return doc.dump(2);
}

std::string suite_to_csv(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  os << "name,trials,max_residual,tolerance,pass,millis\n";
  for (const auto& r : results)
    os << r.name << ',' << r.trials << ',' << std::setprecision(17) << r.max_residual << ','
       << r.tolerance << ',' << (r.pass ? 1 : 0) << ',' << r.millis << '\n';
  return os.str();
}

std::string suite_to_text(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.pass ? "PASS " : "FAIL ") << std::left << std::setw(38) << r.name << " trials="
       << std::setw(5) << r.trials << " max_residual=" << std::setw(13) << std::setprecision(4)
       << std::scientific << r.max_residual << std::defaultfloat << " tol=" << r.tolerance
       << "\n";
  }
  return os.str();
}

int env_thread_cap() {
  const char* env = std::getenv("VOLFLOW_THREADS");
  if (!env) return 1;
  int v = std::atoi(env);
  if (v < 1) return 1;
  unsigned hw = std::thread::hardware_concurrency();
  return std::min<int>(v, hw > 0 ? static_cast<int>(hw) : v);
}

}  // namespace volflow
