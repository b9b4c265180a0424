#include "volflow/forms.hpp"

#include <Eigen/SVD>
#include <array>
#include <cmath>
#include <stdexcept>

namespace volflow {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void require_size(const SlElement& x, int n, const char* op) {
  if (x.size() != n) fail(std::string(op) + ": size mismatch");
}

}  // namespace

double ScalarCochain::operator()(std::span<const SlElement> args) const {
  if (static_cast<int>(args.size()) != degree) fail("ScalarCochain: argument count != degree");
  return eval(args);
}

double DualCochain::operator()(std::span<const SlElement> args, const SlElement& probe) const {
  if (static_cast<int>(args.size()) != degree) fail("DualCochain: argument count != degree");
  return eval(args, probe);
}

double omega_eval(const SlElement& a, const SlElement& b, const SlElement& c) {
  const int n = a.size();
  require_size(b, n, "omega_eval");
  require_size(c, n, "omega_eval");
  CMat pa = hermitian_part(a.mat());
  CMat pb = hermitian_part(b.mat());
  CMat pc = hermitian_part(c.mat());
  Cplx val = Cplx(0, 2) * (pa * commutator(pb, pc)).trace();
  return val.real();
}

double omega_basis_expansion_eval(const SlElement& a, const SlElement& b, const SlElement& c) {
  const int n = a.size();
  require_size(b, n, "omega_basis_expansion_eval");
  require_size(c, n, "omega_basis_expansion_eval");
  std::array<CMat, 3> p = {hermitian_part(a.mat()), hermitian_part(b.mat()),
                           hermitian_part(c.mat())};
  double total = 0.0;

  // wedge term per pair: -(ih_jk)^v ^ (ie_jk)^v ^ (if_jk)^v
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      double m[3][3];
      for (int col = 0; col < 3; ++col) {
        const CMat& x = p[col];
        m[0][col] = (x(k, k) - x(j, j)).real();
        m[1][col] = 2.0 * x(j, k).imag();
        m[2][col] = -2.0 * x(j, k).real();
      }
      double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                   m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                   m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
      total -= det;
    }

  // triple-product term per index triangle j < k < l
  static constexpr int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                                      {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
  static constexpr double sgn[6] = {1, 1, 1, -1, -1, -1};
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      for (int l = k + 1; l < n; ++l) {
        double s = 0.0;
        for (int t = 0; t < 6; ++t) {
          const CMat& x = p[perms[t][0]];
          const CMat& y = p[perms[t][1]];
          const CMat& z = p[perms[t][2]];
          s += sgn[t] * (x(j, k) * y(k, l) * std::conj(z(j, l))).imag();
        }
        total -= 4.0 * s;
      }
  return total;
}

double beta_eval(const BorelElement& x, const BorelElement& y) {
  const int n = x.size();
  if (y.size() != n) fail("beta_eval: size mismatch");
  CMat xu = x.mat(), yu = y.mat();
  for (int i = 0; i < n; ++i) {
    xu(i, i) = Cplx(0, 0);
    yu(i, i) = Cplx(0, 0);
  }
  Cplx val = Cplx(0, 0.25) * (xu.adjoint() * yu - xu * yu.adjoint()).trace();
  return val.real();
}

double gamma_eval(const SlElement& g, const SlElement& h) {
  if (g.size() != h.size()) fail("gamma_eval: size mismatch");
  Cplx val = kImUnit * (hermitian_part(g.mat()) * anti_hermitian_part(h.mat())).trace();
  return val.real();
}

double zeta_eval(const BorelElement& x, const BorelElement& y) {
  const int n = x.size();
  if (y.size() != n) fail("zeta_eval: size mismatch");
  Cplx val(0, 0);
  for (int i = 0; i < n; ++i)
    val += kImUnit * Cplx(x.mat()(i, i).real(), 0) * Cplx(0, y.mat()(i, i).imag());
  return val.real();
}

ScalarCochain omega_cochain(int n) {
  return {3, [n](std::span<const SlElement> args) {
            for (const auto& x : args) require_size(x, n, "omega_cochain");
            return omega_eval(args[0], args[1], args[2]);
          }};
}

ScalarCochain beta_cochain(int n) {
  return {2, [n](std::span<const SlElement> args) {
            for (const auto& x : args) require_size(x, n, "beta_cochain");
            return beta_eval(BorelElement(args[0]), BorelElement(args[1]));
          }};
}

DualCochain gamma_dual(int n) {
  return {1, [n](std::span<const SlElement> args, const SlElement& probe) {
            require_size(args[0], n, "gamma_dual");
            require_size(probe, n, "gamma_dual");
            return gamma_eval(args[0], probe);
          }};
}

DualCochain zeta_dual(int n) {
  return {1, [n](std::span<const SlElement> args, const SlElement& probe) {
            require_size(args[0], n, "zeta_dual");
            require_size(probe, n, "zeta_dual");
            return zeta_eval(BorelElement(args[0]), BorelElement(probe));
          }};
}

DualCochain var_map(const ScalarCochain& c) {
  if (c.degree < 1) fail("var_map: degree must be >= 1");
  auto inner = c;
  return {c.degree - 1,
          [inner](std::span<const SlElement> args, const SlElement& probe) {
            std::vector<SlElement> all(args.begin(), args.end());
            all.push_back(probe);
            return inner(all);
          }};
}

double ce_diff_scalar(const ScalarCochain& c, std::span<const SlElement> args) {
  const int k = c.degree;
  if (static_cast<int>(args.size()) != k + 1) fail("ce_diff_scalar: need degree+1 arguments");
  double total = 0.0;
  for (int i = 0; i < k + 1; ++i)
    for (int j = i + 1; j < k + 1; ++j) {
      std::vector<SlElement> rest;
      rest.reserve(k);
      rest.push_back(bracket(args[i], args[j]));
      for (int t = 0; t < k + 1; ++t)
        if (t != i && t != j) rest.push_back(args[t]);
      const double sign = ((i + j) % 2 == 1) ? -1.0 : 1.0;
      total += sign * c(rest);
    }
  return total;
}

double ce_diff_dual(const DualCochain& c, std::span<const SlElement> args,
                    const SlElement& probe) {
  const int k = c.degree;
  if (static_cast<int>(args.size()) != k + 1) fail("ce_diff_dual: need degree+1 arguments");
  double total = 0.0;
  // module action term: (x_i . phi)(probe) = -phi([x_i, probe])
  for (int i = 0; i < k + 1; ++i) {
    std::vector<SlElement> rest;
    rest.reserve(k);
    for (int t = 0; t < k + 1; ++t)
      if (t != i) rest.push_back(args[t]);
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    total += sign * (-c(rest, bracket(args[i], probe)));
  }
  for (int i = 0; i < k + 1; ++i)
    for (int j = i + 1; j < k + 1; ++j) {
      std::vector<SlElement> rest;
      rest.reserve(k);
      rest.push_back(bracket(args[i], args[j]));
      for (int t = 0; t < k + 1; ++t)
        if (t != i && t != j) rest.push_back(args[t]);
      const double sign = ((i + j) % 2 == 1) ? -1.0 : 1.0;
      total += sign * c(rest, probe);
    }
  return total;
}

// ---------------------------------------------------------------------------
// Invariant-form dimension counts.
//
// Both computations assemble the infinitesimal invariance conditions as a
// real linear system over the coefficients of the form in the dual basis and
// return the nullity, with rank read off unit-normalized rows by singular
// value threshold.
// ---------------------------------------------------------------------------

namespace {

// Coordinates of an anti-Hermitian traceless y in the su_basis order.
Eigen::VectorXd su_coordinates(const CMat& y, int n) {
  const int dim = n * n - 1;
  Eigen::VectorXd c(dim);
  int pos = 0;
  for (int s = 0; s < n - 1; ++s) c(pos++) = 2.0 * y(s, s).imag();
  for (int s = 0; s < n; ++s)
    for (int t = s + 1; t < n; ++t) c(pos++) = 2.0 * y(s, t).real();
  for (int s = 0; s < n; ++s)
    for (int t = s + 1; t < n; ++t) c(pos++) = 2.0 * y(s, t).imag();
  return c;
}

int nullity(const Eigen::MatrixXd& rows, int unknowns) {
  if (rows.rows() == 0) return unknowns;
  Eigen::MatrixXd m = rows;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    double nrm = m.row(r).norm();
    if (nrm > 1e-14) m.row(r) /= nrm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-8) ++rank;
  return unknowns - rank;
}

}  // namespace

int invariant_two_form_dimension(int n) {
  if (n < 2 || n > 4) fail("invariant_two_form_dimension: n must be in {2,3,4}");
  const auto basis = su_basis(n);
  const int d = static_cast<int>(basis.size());
  const int unknowns = d * (d - 1) / 2;
  auto pair_index = [d](int a, int b) {  // a < b
    return a * d - a * (a + 1) / 2 + (b - a - 1);
  };

  std::vector<Eigen::VectorXd> bracket_coords(d * d);
  for (int x = 0; x < d; ++x)
    for (int a = 0; a < d; ++a)
      bracket_coords[x * d + a] =
          su_coordinates(commutator(basis[x].mat(), basis[a].mat()), n);

  Eigen::MatrixXd rows(d * unknowns, unknowns);
  rows.setZero();
  int r = 0;
  for (int x = 0; x < d; ++x)
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        // phi([x, e_a], e_b) + phi(e_a, [x, e_b]) = 0
        const Eigen::VectorXd& ca = bracket_coords[x * d + a];
        const Eigen::VectorXd& cb = bracket_coords[x * d + b];
        for (int c = 0; c < d; ++c) {
          if (std::abs(ca(c)) > 1e-14 && c != b)
            rows(r, pair_index(std::min(c, b), std::max(c, b))) +=
                (c < b ? ca(c) : -ca(c));
          if (std::abs(cb(c)) > 1e-14 && c != a)
            rows(r, pair_index(std::min(a, c), std::max(a, c))) +=
                (a < c ? cb(c) : -cb(c));
        }
        ++r;
      }
  return nullity(rows, unknowns);
}

namespace {

// Basis of b_n/h_n: classes of ih_s (s = 1..n-1), then ur_{kl}, ui_{kl}
// lexicographically.  Coordinates read off a representative with the h-part
// discarded.
Eigen::VectorXd borel_quotient_coordinates(const CMat& y, int n) {
  const int dim = (n - 1) + n * (n - 1);
  Eigen::VectorXd c(dim);
  int pos = 0;
  for (int s = 0; s < n - 1; ++s) c(pos++) = -2.0 * y(s, s).real();
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      c(pos++) = y(k, l).real();
      c(pos++) = y(k, l).imag();
    }
  return c;
}

std::vector<CMat> borel_quotient_basis(int n) {
  std::vector<CMat> out;
  for (int s = 1; s <= n - 1; ++s) out.push_back(basis_matrix({BasisKind::ih, s}, n));
  for (int k = 1; k <= n; ++k)
    for (int l = k + 1; l <= n; ++l) {
      out.push_back(basis_matrix({BasisKind::ur, k, l}, n));
      out.push_back(basis_matrix({BasisKind::ui, k, l}, n));
    }
  return out;
}

}  // namespace

int borel_invariant_two_form_dimension(int n) {
  if (n < 2 || n > 4) fail("borel_invariant_two_form_dimension: n must be in {2,3,4}");
  const auto vb = borel_quotient_basis(n);
  const int m = static_cast<int>(vb.size());
  const int unknowns = m * (m - 1) / 2;
  auto pair_index = [m](int a, int b) { return a * m - a * (a + 1) / 2 + (b - a - 1); };

  std::vector<CMat> torus;
  for (int s = 1; s <= n - 1; ++s) torus.push_back(basis_matrix({BasisKind::h, s}, n));

  Eigen::MatrixXd rows(static_cast<int>(torus.size()) * unknowns, unknowns);
  rows.setZero();
  int r = 0;
  for (const auto& t : torus) {
    std::vector<Eigen::VectorXd> bc(m);
    for (int a = 0; a < m; ++a) bc[a] = borel_quotient_coordinates(commutator(t, vb[a]), n);
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) {
        for (int c = 0; c < m; ++c) {
          if (std::abs(bc[a](c)) > 1e-14 && c != b)
            rows(r, pair_index(std::min(c, b), std::max(c, b))) +=
                (c < b ? bc[a](c) : -bc[a](c));
          if (std::abs(bc[b](c)) > 1e-14 && c != a)
            rows(r, pair_index(std::min(a, c), std::max(a, c))) +=
                (a < c ? bc[b](c) : -bc[b](c));
        }
        ++r;
      }
  }
  return nullity(rows, unknowns);
}

int borel_invariant_one_form_dimension(int n) {
  if (n < 2 || n > 4) fail("borel_invariant_one_form_dimension: n must be in {2,3,4}");
  const auto vb = borel_quotient_basis(n);
  const int m = static_cast<int>(vb.size());

  std::vector<CMat> torus;
  for (int s = 1; s <= n - 1; ++s) torus.push_back(basis_matrix({BasisKind::h, s}, n));

  Eigen::MatrixXd rows(static_cast<int>(torus.size()) * m, m);
  rows.setZero();
  int r = 0;
  for (const auto& t : torus)
    for (int a = 0; a < m; ++a) rows.row(r++) = borel_quotient_coordinates(commutator(t, vb[a]), n);
  return nullity(rows, m);
}

}  // namespace volflow
