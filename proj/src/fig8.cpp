#include "volflow/fig8.hpp"

#include <Eigen/LU>
#include <cmath>

namespace volflow {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// principal log shifted to the branch nearest a reference value
Cplx tracked_log(Cplx val, Cplx reference, bool has_ref) {
  Cplx p = std::log(val);
  if (!has_ref) return p;
  double k = std::round((reference.imag() - p.imag()) / kTwoPi);
  return p + Cplx(0, kTwoPi * k);
}

}  // namespace

// ---------------------------------------------------------------------------
// Dilogarithm / Bloch-Wigner.
// ---------------------------------------------------------------------------

namespace {

// Li_2 via the series in w = -log(1-z), valid after reduction to
// |z| <= 1, Re z <= 1/2.  Coefficients B_n / (n+1)!.
Cplx dilog_core(Cplx z) {
  static const double kCoef[] = {
      // B_n / (n+1)! for n = 0, 1, 2, 4, 6, ... (odd n > 1 vanish)
      1.0,
      -0.25,
      1.0 / 36.0,
      -1.0 / 3600.0,
      1.0 / 211680.0,
      -1.0 / 10886400.0,
      1.0 / 526901760.0,
      -4.0647616451442255e-11,
      8.9216910204564526e-13,
      -1.9939295860721076e-14,
      4.5189800296199182e-16,
      -1.0356517612181247e-17,
      2.3952186210261867e-19,
      -5.5817858743250093e-21,
      1.3091507554183213e-22,
      -3.0874198024267403e-24,
      7.3159756527022034e-26,
  };
  const Cplx w = -std::log(1.0 - z);
  Cplx w2 = w * w;
  Cplx term = w;        // w^(2k+1) runner over odd powers after the first two
  Cplx sum = kCoef[0] * w + kCoef[1] * w2;
  term = w * w2;        // w^3
  for (std::size_t k = 2; k < sizeof(kCoef) / sizeof(kCoef[0]); ++k) {
    Cplx add = kCoef[k] * term;
    sum += add;
    if (std::abs(add) < 1e-17 * (1.0 + std::abs(sum))) break;
    term *= w2;
  }
  return sum;
}

}  // namespace

Cplx dilog(Cplx z) {
  const double pi2_6 = kPi * kPi / 6.0;
  if (z == Cplx(0, 0)) return {0, 0};
  if (z == Cplx(1, 0)) return {pi2_6, 0};
  if (std::abs(z) > 1.0) {
    // Li2(z) = -Li2(1/z) - pi^2/6 - log(-z)^2 / 2
    Cplx lz = std::log(-z);
    return -dilog(1.0 / z) - pi2_6 - 0.5 * lz * lz;
  }
  if (z.real() > 0.5) {
    // Li2(z) = pi^2/6 - log(z) log(1-z) - Li2(1-z)
    return pi2_6 - std::log(z) * std::log(1.0 - z) - dilog(1.0 - z);
  }
  return dilog_core(z);
}

double bloch_wigner(Cplx z) {
  if (z == Cplx(0, 0) || z == Cplx(1, 0))
    throw std::invalid_argument("bloch_wigner: singular argument");
  if (z.imag() == 0.0) return 0.0;
  return dilog(z).imag() + std::arg(1.0 - z) * std::log(std::abs(z));
}

// ---------------------------------------------------------------------------
// Gluing system.
// ---------------------------------------------------------------------------

ShapeLogs shape_logs(const ShapePair& s, const std::optional<ShapeLogs>& reference) {
  const bool r = reference.has_value();
  ShapeLogs out;
  out.log_z = tracked_log(s.z, r ? reference->log_z : Cplx(), r);
  out.log_one_minus_z = tracked_log(1.0 - s.z, r ? reference->log_one_minus_z : Cplx(), r);
  out.log_w = tracked_log(s.w, r ? reference->log_w : Cplx(), r);
  out.log_w_ratio = tracked_log(1.0 - 1.0 / s.w, r ? reference->log_w_ratio : Cplx(), r);
  out.log_one_minus_w = tracked_log(1.0 - s.w, r ? reference->log_one_minus_w : Cplx(), r);
  return out;
}

std::pair<Cplx, Cplx> gluing_residual(const ShapePair& s, Cplx u_target,
                                      const std::optional<ShapeLogs>& reference) {
  if (s.z == Cplx(0, 0) || s.z == Cplx(1, 0) || s.w == Cplx(0, 0) || s.w == Cplx(1, 0))
    throw std::invalid_argument("gluing_residual: degenerate shapes");
  ShapeLogs lg = shape_logs(s, reference);
  Cplx r1 = 2.0 * lg.log_z - lg.log_one_minus_z + lg.log_w + 2.0 * lg.log_w_ratio -
            Cplx(0, kTwoPi);
  Cplx r2 = lg.log_z + lg.log_one_minus_w - u_target;
  return {r1, r2};
}

ShapePair solve_shapes(Cplx u_target, const ShapePair& seed,
                       const std::optional<ShapeLogs>& reference) {
  if (std::abs(u_target) >= 0.5)
    throw std::invalid_argument("solve_shapes: |u_target| must be < 0.5");
  Cplx z = seed.z, w = seed.w;
  for (int it = 0; it < 50; ++it) {
    auto [r1, r2] = gluing_residual({z, w}, u_target, reference);
    if (std::max(std::abs(r1), std::abs(r2)) < 1e-13) {
      if (std::abs(z.imag()) < 1e-12 || std::abs(w.imag()) < 1e-12)
        throw Fig8SolveError("solve_shapes: degenerate (real) shapes");
      return {z, w};
    }
    Eigen::Matrix2cd j;
    j(0, 0) = 2.0 / z + 1.0 / (1.0 - z);
    j(0, 1) = 1.0 / w + 2.0 / (w * (w - 1.0));
    j(1, 0) = 1.0 / z;
    j(1, 1) = -1.0 / (1.0 - w);
    Eigen::Vector2cd rhs;
    rhs << -r1, -r2;
    Eigen::Vector2cd step = j.partialPivLu().solve(rhs);
    z += step(0);
    w += step(1);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !std::isfinite(w.real()) ||
        !std::isfinite(w.imag()))
      throw Fig8SolveError("solve_shapes: iteration diverged");
  }
  throw Fig8SolveError("solve_shapes: no convergence in 50 iterations");
}

Cplx holonomy_v(const ShapePair& s, const std::optional<ShapeLogs>& reference) {
  ShapeLogs lg = shape_logs(s, reference);
  return -2.0 * lg.log_one_minus_w - 2.0 * lg.log_w_ratio;
}

double volume_of(const ShapePair& s) { return bloch_wigner(s.z) + bloch_wigner(s.w); }

// ---------------------------------------------------------------------------
// Deformation experiments.
// ---------------------------------------------------------------------------

namespace {

struct PathPoint {
  ShapePair shapes;
  ShapeLogs logs;
  Cplx u, v;
  double vol;
  double residual;
};

// continuation solve along a list of meridian targets starting from the
// complete structure
std::vector<PathPoint> walk(const std::vector<Cplx>& us) {
  std::vector<PathPoint> out;
  out.reserve(us.size());
  ShapePair cur = complete_shapes();
  std::optional<ShapeLogs> ref;
  for (std::size_t i = 0; i < us.size(); ++i) {
    Cplx target = us[i];
    try {
      // intermediate continuation steps if the jump is large for Newton
      Cplx from = out.empty() ? Cplx(0, 0) : out.back().u;
      int nsub = std::max(1, static_cast<int>(std::ceil(std::abs(target - from) / 0.05)));
      for (int s = 1; s <= nsub; ++s) {
        Cplx t = from + (target - from) * (static_cast<double>(s) / nsub);
        cur = solve_shapes(t, cur, ref);
        ref = shape_logs(cur, ref);
      }
    } catch (const Fig8SolveError& e) {
      throw Fig8SolveError(std::string(e.what()) + " (sample " + std::to_string(i) + ")",
                           static_cast<int>(i));
    }
    PathPoint p;
    p.shapes = cur;
    p.logs = *ref;
    p.u = target;
    p.v = holonomy_v(cur, ref);
    p.vol = volume_of(cur);
    auto [r1, r2] = gluing_residual(cur, target, ref);
    p.residual = std::max(std::abs(r1), std::abs(r2));
    out.push_back(p);
  }
  return out;
}

std::vector<Cplx> path_targets(const PathSpec& path) {
  if (path.kind == PathSpec::Kind::list) {
    if (path.points.size() < 9) throw std::invalid_argument("path list: need >= 9 samples");
    return path.points;
  }
  if (path.samples < 9 || path.samples % 2 == 0)
    throw std::invalid_argument("path: samples must be odd and >= 9");
  std::vector<Cplx> us(path.samples);
  for (int i = 0; i < path.samples; ++i) {
    double t = static_cast<double>(i) / (path.samples - 1);
    if (path.kind == PathSpec::Kind::radial) {
      us[i] = path.u0 * t;
    } else {
      us[i] = path.u0 * std::exp(Cplx(0, kTwoPi * t));
    }
  }
  return us;
}

double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n % 2 == 0) throw std::invalid_argument("simpson: need odd sample count");
  double s = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < n; ++i) s += f[i] * ((i % 2) ? 4.0 : 2.0);
  return s * h / 3.0;
}

DeformationReport run_path(const PathSpec& path) {
  std::vector<Cplx> us = path_targets(path);
  std::vector<PathPoint> pts = walk(us);
  const std::size_t n = pts.size();
  const double h = 1.0 / static_cast<double>(n - 1);

  // finite-difference derivatives of u(t), v(t); one-sided second order at
  // the ends
  auto fd = [&](auto get) {
    std::vector<Cplx> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == 0)
        d[i] = (-3.0 * get(0) + 4.0 * get(1) - get(2)) / (2.0 * h);
      else if (i + 1 == n)
        d[i] = (3.0 * get(i) - 4.0 * get(i - 1) + get(i - 2)) / (2.0 * h);
      else
        d[i] = (get(i + 1) - get(i - 1)) / (2.0 * h);
    }
    return d;
  };
  std::vector<Cplx> du = fd([&](std::size_t i) { return pts[i].u; });
  std::vector<Cplx> dv = fd([&](std::size_t i) { return pts[i].v; });

  std::vector<double> rate(n), rate_fd(n);
  for (std::size_t i = 0; i < n; ++i) {
    // the n=2 jet a = diag(v/2, -v/2), b = diag(u/2, -u/2) gives
    // rate = (Re u Im v' - Re v Im u') / 2
    rate[i] = 0.5 * (pts[i].u.real() * dv[i].imag() - pts[i].v.real() * du[i].imag());
  }
  std::vector<Cplx> dvol_src(n);
  for (std::size_t i = 0; i < n; ++i) dvol_src[i] = Cplx(pts[i].vol, 0);
  std::vector<Cplx> dvol = fd([&](std::size_t i) { return dvol_src[i]; });
  for (std::size_t i = 0; i < n; ++i) rate_fd[i] = dvol[i].real();

  DeformationReport rep;
  rep.rows.resize(n);
  double running = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) running += 0.5 * h * (rate[i] + rate[i - 1]);
    rep.rows[i] = {static_cast<double>(i) * h, pts[i].u,     pts[i].v, pts[i].vol,
                   rate[i],                    rate_fd[i],   running,  pts[i].residual};
  }
  rep.integral_rate = simpson(rate, h);
  rep.q_nz = kNzSign * 0.25 * (std::conj(pts.back().u) * pts.back().v).imag();
  rep.nz_discrepancy = std::abs(rep.integral_rate - rep.q_nz);
  return rep;
}

}  // namespace

DeformationReport deformation_experiment(const PathSpec& path, bool with_decay_diagnostic) {
  DeformationReport rep = run_path(path);
  if (with_decay_diagnostic && path.kind == PathSpec::Kind::radial &&
      std::abs(path.u0) > 0) {
    DecayDiagnostic d;
    for (double scale : {1.0, 0.5, 0.25}) {
      PathSpec sub = path;
      sub.u0 = path.u0 * scale;
      DeformationReport r = (scale == 1.0) ? rep : run_path(sub);
      d.radii.push_back(std::abs(sub.u0));
      d.errors.push_back(r.nz_discrepancy);
    }
    // least squares slope of log(err) vs log(radius)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = static_cast<int>(d.radii.size());
    for (int i = 0; i < m; ++i) {
      double x = std::log(d.radii[i]), y = std::log(std::max(d.errors[i], 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    d.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.decay = d;
  }
  return rep;
}

double calibrate_nz_sign() {
  PathSpec p;
  p.kind = PathSpec::Kind::radial;
  p.u0 = Cplx(0.08, 0.06);
  p.samples = 33;
  DeformationReport rep = run_path(p);
  double q_raw = 0.25 * (std::conj(rep.rows.back().u) * rep.rows.back().v).imag();
  return (rep.integral_rate / q_raw > 0) ? 1.0 : -1.0;
}

Cplx tau_estimate(double h) {
  ShapePair sp = solve_shapes(Cplx(h, 0), complete_shapes());
  ShapePair sm = solve_shapes(Cplx(-h, 0), complete_shapes());
  return (holonomy_v(sp) - holonomy_v(sm)) / (2.0 * h);
}

}  // namespace volflow
