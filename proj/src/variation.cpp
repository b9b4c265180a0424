#include "volflow/variation.hpp"

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace volflow {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

Cplx ipow(Cplx z, int e) {
  Cplx r(1, 0);
  for (int i = 0; i < e; ++i) r *= z;
  return r;
}

}  // namespace

CuspJet::CuspJet(BorelElement a_, BorelElement b_, BorelElement da_, BorelElement db_)
    : a(std::move(a_)), b(std::move(b_)), da(std::move(da_)), db(std::move(db_)) {
  const int n = a.size();
  if (b.size() != n || da.size() != n || db.size() != n)
    fail("CuspJet: mismatched matrix sizes");
}

double torus_pair_eval(const DualCochain& c, const CuspJet& jet) {
  if (c.degree != 1) fail("torus_pair_eval: need a degree-1 dual cochain");
  std::array<SlElement, 1> arg_a = {jet.a.sl()};
  std::array<SlElement, 1> arg_b = {jet.b.sl()};
  return c(arg_a, jet.db.sl()) - c(arg_b, jet.da.sl());
}

double volume_rate(std::span<const CuspJet> jets) {
  if (jets.empty()) fail("volume_rate: empty cusp list");
  double total = 0.0;
  for (const auto& j : jets) {
    Eigen::MatrixXd re_b = j.b.mat().real();
    Eigen::MatrixXd im_da = j.da.mat().imag();
    Eigen::MatrixXd re_a = j.a.mat().real();
    Eigen::MatrixXd im_db = j.db.mat().imag();
    total += (re_b * im_da).trace() - (re_a * im_db).trace();
  }
  return total;
}

double volume_rate_via_zeta(std::span<const CuspJet> jets) {
  if (jets.empty()) fail("volume_rate_via_zeta: empty cusp list");
  double total = 0.0;
  for (const auto& j : jets) total += torus_pair_eval(zeta_dual(j.size()), j);
  return total;
}

double hodgson_rate(std::span<const HodgsonData> data) {
  double total = 0.0;
  for (const auto& d : data) total += 0.5 * (d.l2 * d.dtheta1 - d.l1 * d.dtheta2);
  return total;
}

CuspJet hodgson_jet(const HodgsonData& d) {
  auto diag2 = [](double l, double th) {
    CMat m = CMat::Zero(2, 2);
    m(0, 0) = Cplx(l, th) / 2.0;
    m(1, 1) = -m(0, 0);
    return BorelElement(std::move(m));
  };
  return CuspJet(diag2(d.l1, d.theta1), diag2(d.l2, d.theta2), diag2(d.dl1, d.dtheta1),
                 diag2(d.dl2, d.dtheta2));
}

DggCoords dgg_coords(const CuspJet& jet) {
  const int n = jet.size();
  DggCoords c;
  c.lambda.resize(n - 1);
  c.mu.resize(n - 1);
  c.dlambda.resize(n - 1);
  c.dmu.resize(n - 1);
  for (int s = 0; s < n - 1; ++s) {
    c.lambda(s) = jet.a.mat()(s + 1, s + 1) - jet.a.mat()(s, s);
    c.mu(s) = jet.b.mat()(s + 1, s + 1) - jet.b.mat()(s, s);
    c.dlambda(s) = jet.da.mat()(s + 1, s + 1) - jet.da.mat()(s, s);
    c.dmu(s) = jet.db.mat()(s + 1, s + 1) - jet.db.mat()(s, s);
  }
  return c;
}

double dgg_rate(int n, const DggCoords& c) {
  const int m = n - 1;
  if (c.lambda.size() != m || c.mu.size() != m || c.dlambda.size() != m || c.dmu.size() != m)
    fail("dgg_rate: dimension mismatch");
  Eigen::MatrixXd kappa = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    kappa(i, i) = 2.0;
    if (i + 1 < m) {
      kappa(i, i + 1) = -1.0;
      kappa(i + 1, i) = -1.0;
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(kappa);
  Eigen::VectorXd x1 = lu.solve(c.dmu.imag());
  Eigen::VectorXd x2 = lu.solve(c.dlambda.imag());
  return c.lambda.real().dot(x1) - c.mu.real().dot(x2);
}

double calibrate_dgg_sign() {
  HodgsonData d{0.31, 0.2, 0.73, -0.41, 0.11, 0.23, -0.05, 0.17};
  CuspJet jet = hodgson_jet(d);
  std::array<CuspJet, 1> jets = {jet};
  double r = volume_rate(jets);
  double g = dgg_rate(2, dgg_coords(jet));
  return (g / r > 0) ? 1.0 : -1.0;
}

BfgCoords bfg_coords(const CuspJet& jet) {
  if (jet.size() != 3) fail("bfg_coords: jets must have n = 3");
  BfgCoords c;
  const CMat &a = jet.a.mat(), &b = jet.b.mat(), &da = jet.da.mat(), &db = jet.db.mat();
  c.logA = b(2, 2) - b(1, 1);
  c.logAs = b(1, 1) - b(0, 0);
  c.logB = a(2, 2) - a(1, 1);
  c.logBs = a(1, 1) - a(0, 0);
  c.dlogA = db(2, 2) - db(1, 1);
  c.dlogAs = db(1, 1) - db(0, 0);
  c.dlogB = da(2, 2) - da(1, 1);
  c.dlogBs = da(1, 1) - da(0, 0);
  return c;
}

double bfg_rate(const BfgCoords& c) {
  // Im(dlog ^ log)(f ^ g) on log coordinates
  auto w = [](Cplx lf, Cplx dlf, Cplx lg, Cplx dlg) {
    return lg.real() * dlf.imag() - lf.real() * dlg.imag();
  };
  double t = 2.0 * w(c.logA, c.dlogA, c.logB, c.dlogB) +
             2.0 * w(c.logAs, c.dlogAs, c.logBs, c.dlogBs) +
             w(c.logAs, c.dlogAs, c.logB, c.dlogB) + w(c.logA, c.dlogA, c.logBs, c.dlogBs);
  return t / 12.0;
}

double calibrate_bfg_sign() {
  CuspJet jet(random_borel(3, 2024), random_borel(3, 2025), random_borel(3, 2026),
              random_borel(3, 2027));
  std::array<CuspJet, 1> jets = {jet};
  double r = volume_rate(jets);
  double g = 4.0 * bfg_rate(bfg_coords(jet));
  return (g / r > 0) ? 1.0 : -1.0;
}

// ---------------------------------------------------------------------------
// Symmetric power of SL_2.  Basis: u_k = binom(n-1,k) x^(n-1-k) y^k for
// k = 0..n-1, on which the three standard sl_2 generators act by the integer
// matrices below; the group map is computed by expanding u_k(m^T (x,y)).
// ---------------------------------------------------------------------------

CMat veronese_group(int n, const CMat& m) {
  if (n < 2) fail("veronese_group: n < 2");
  if (m.rows() != 2 || m.cols() != 2) fail("veronese_group: need a 2x2 matrix");
  const Cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (std::abs(det - 1.0) > 1e-8 * std::max(1.0, max_abs(m) * max_abs(m)))
    fail("veronese_group: input not unimodular");
  const Cplx a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const int deg = n - 1;
  CMat out = CMat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    // u_k(ax+cy, bx+dy) = binom(deg,k) (ax+cy)^(deg-k) (bx+dy)^k
    std::vector<Cplx> poly(n, Cplx(0, 0));  // coefficients of x^(deg-j) y^j
    for (int i = 0; i <= deg - k; ++i)
      for (int j = 0; j <= k; ++j) {
        Cplx coef = binom(deg - k, i) * ipow(a, deg - k - i) * ipow(c, i) *
                    binom(k, j) * ipow(b, k - j) * ipow(d, j);
        poly[i + j] += coef;
      }
    for (int j = 0; j < n; ++j) out(j, k) = poly[j] * binom(deg, k) / binom(deg, j);
  }
  return out;
}

SlElement veronese_algebra(int n, const SlElement& x) {
  if (n < 2) fail("veronese_algebra: n < 2");
  if (x.size() != 2) fail("veronese_algebra: input must be 2x2");
  const Cplx alpha = x.mat()(0, 0), beta = x.mat()(0, 1), gamma = x.mat()(1, 0);
  CMat out = CMat::Zero(n, n);
  for (int k = 0; k < n; ++k) out(k, k) = alpha * static_cast<double>(n - 1 - 2 * k);
  for (int k = 0; k + 1 < n; ++k) {
    out(k, k + 1) = beta * static_cast<double>(n - 1 - k);
    out(k + 1, k) = gamma * static_cast<double>(k + 1);
  }
  return SlElement(std::move(out));
}

CuspJet veronese_jet(int n, const CuspJet& jet2) {
  if (jet2.size() != 2) fail("veronese_jet: input jet must have n = 2");
  auto push = [n](const BorelElement& x) {
    return BorelElement(veronese_algebra(n, x.sl()));
  };
  return CuspJet(push(jet2.a), push(jet2.b), push(jet2.da), push(jet2.db));
}

// ---------------------------------------------------------------------------
// Jet extraction from holonomy paths.
// ---------------------------------------------------------------------------

namespace {

void validate_sample(const PeripheralPathSample& s, int n, std::size_t idx) {
  if (s.rho_l.rows() != n || s.rho_l.cols() != n || s.rho_m.rows() != n || s.rho_m.cols() != n)
    fail("peripheral_jet: sample " + std::to_string(idx) + " has mismatched sizes");
  double scale = std::max(1.0, max_abs(s.rho_l)) * std::max(1.0, max_abs(s.rho_m));
  if (max_abs(commutator(s.rho_l, s.rho_m)) > kEpsComm * scale)
    fail("peripheral_jet: holonomies at sample " + std::to_string(idx) + " do not commute");
}

struct TriangularFrame {
  CMat q;
  CMat upper_l;
  CMat upper_m;
};

TriangularFrame triangularize_matched(const PeripheralPathSample& s,
                                      const TriangularFrame* prev) {
  std::array<CMat, 2> ms = {s.rho_l, s.rho_m};
  Triangularization tri;
  if (prev) {
    const int n = static_cast<int>(s.rho_l.rows());
    std::vector<std::vector<Cplx>> targets(n);
    for (int d = 0; d < n; ++d)
      targets[d] = {prev->upper_l(d, d), prev->upper_m(d, d)};
    tri = commuting_triangularize(ms, &targets);
  } else {
    tri = commuting_triangularize(ms);
  }
  TriangularFrame f{tri.conjugator, tri.uppers[0], tri.uppers[1]};
  if (prev) {
    // nearest-frame phase match: multiply each conjugator column by a unit
    // phase; uppers transform by the corresponding diagonal conjugation
    const int n = static_cast<int>(f.q.rows());
    CVec phases(n);
    for (int j = 0; j < n; ++j) {
      Cplx z = (prev->q.col(j).adjoint() * f.q.col(j))(0, 0);
      phases(j) = (std::abs(z) > 1e-12) ? z / std::abs(z) : Cplx(1, 0);
      f.q.col(j) *= std::conj(phases(j));
    }
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Cplx factor = phases(i) / phases(j);
        f.upper_l(i, j) *= factor;
        f.upper_m(i, j) *= factor;
      }
  }
  return f;
}

BorelElement fd_derivative(const BorelElement& prev, const BorelElement& mid,
                           const BorelElement& next, double h_minus, double h_plus) {
  // second-order central difference on a possibly nonuniform grid
  const double hm = h_minus, hp = h_plus;
  CMat d = (hm * hm * next.mat() - hp * hp * prev.mat() +
            (hp * hp - hm * hm) * mid.mat()) /
           (hp * hm * (hp + hm));
  // the traces of the branch logs carry O(eps) noise that the division by h
  // amplifies; remove it so the derivative is an honest traceless element
  const int n = static_cast<int>(d.rows());
  Cplx shift = d.trace() / static_cast<double>(n);
  for (int i = 0; i < n; ++i) d(i, i) -= shift;
  return BorelElement(std::move(d));
}

}  // namespace

CuspJet peripheral_jet(std::span<const PeripheralPathSample> samples, std::size_t at) {
  if (samples.size() < 3) fail("peripheral_jet: need at least 3 samples");
  if (at == 0 || at + 1 >= samples.size())
    fail("peripheral_jet: index must be bracketed by samples on both sides");
  const int n = static_cast<int>(samples[0].rho_l.rows());
  for (std::size_t i = 0; i < samples.size(); ++i) validate_sample(samples[i], n, i);

  // walk the path up to at+1, keeping frames and branches continuous
  TriangularFrame frame;
  std::optional<BorelElement> log_l, log_m;
  std::array<std::optional<BorelElement>, 3> window_l, window_m;
  for (std::size_t i = 0; i <= at + 1; ++i) {
    frame = triangularize_matched(samples[i], (i == 0) ? nullptr : &frame);
    BorelElement li = branch_log_upper(frame.upper_l, log_l);
    BorelElement mi = branch_log_upper(frame.upper_m, log_m);
    if (log_l) {
      double jump = 0.0;
      for (int d = 0; d < n; ++d) {
        jump = std::max(jump, std::abs(li.mat()(d, d).imag() - log_l->mat()(d, d).imag()));
        jump = std::max(jump, std::abs(mi.mat()(d, d).imag() - log_m->mat()(d, d).imag()));
      }
      if (jump > 0.95 * kPi)
        throw std::runtime_error(
            "peripheral_jet: branch jump of ~pi between consecutive samples; "
            "sampling too coarse at index " + std::to_string(i));
    }
    log_l = li;
    log_m = mi;
    if (i + 1 >= at) {
      window_l[i + 1 - at] = li;
      window_m[i + 1 - at] = mi;
    }
  }

  const double hm = samples[at].t - samples[at - 1].t;
  const double hp = samples[at + 1].t - samples[at].t;
  if (hm <= 0 || hp <= 0) fail("peripheral_jet: sample times must be strictly increasing");
  BorelElement da = fd_derivative(*window_l[0], *window_l[1], *window_l[2], hm, hp);
  BorelElement db = fd_derivative(*window_m[0], *window_m[1], *window_m[2], hm, hp);
  return CuspJet(*window_l[1], *window_m[1], std::move(da), std::move(db));
}

}  // namespace volflow
