#include "volflow/lie.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace volflow {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void require_same_size(const SlElement& x, const SlElement& y, const char* op) {
  if (x.size() != y.size()) {
    std::ostringstream os;
    os << op << ": size mismatch (" << x.size() << " vs " << y.size() << ")";
    fail(os.str());
  }
}

}  // namespace

void SlElement::validate() const {
  if (m_.rows() < 2 || m_.rows() != m_.cols()) fail("SlElement: need square matrix with n >= 2");
  if (!entries_finite(m_)) fail("SlElement: non-finite entries");
  const Cplx tr = m_.trace();
  if (std::abs(tr.real()) > kEpsAlg || dist_to_2pi_lattice(tr) > kEpsAlg)
    fail("SlElement: trace not in 2*pi*i*Z within tolerance");
}

SuElement::SuElement(CMat m) : x_(std::move(m)) {
  if (max_abs(x_.mat() + x_.mat().adjoint()) > kEpsAlg)
    fail("SuElement: X + X^* != 0 within tolerance");
}

SuElement::SuElement(SlElement x) : x_(std::move(x)) {
  if (max_abs(x_.mat() + x_.mat().adjoint()) > kEpsAlg)
    fail("SuElement: X + X^* != 0 within tolerance");
}

BorelElement::BorelElement(CMat m) : x_(std::move(m)) {
  if (!strict_lower_is_zero(x_.mat()))
    fail("BorelElement: strict lower triangle must be exactly zero");
}

BorelElement::BorelElement(SlElement x) : x_(std::move(x)) {
  if (!strict_lower_is_zero(x_.mat()))
    fail("BorelElement: strict lower triangle must be exactly zero");
}

void BasisIndex::validate(int n) const {
  if (n < 2) fail("BasisIndex: n < 2");
  switch (kind) {
    case BasisKind::h:
    case BasisKind::ih:
      if (s < 1 || s > n - 1) fail("BasisIndex: h index out of range");
      break;
    default:
      if (s < 1 || t <= s || t > n) fail("BasisIndex: pair index out of range");
  }
}

CMat basis_matrix(const BasisIndex& idx, int n) {
  idx.validate(n);
  CMat m = CMat::Zero(n, n);
  const int s = idx.s - 1, t = idx.t - 1;
  switch (idx.kind) {
    case BasisKind::h:
      m(s, s) = Cplx(0, 0.5);
      m(n - 1, n - 1) = Cplx(0, -0.5);
      break;
    case BasisKind::ih:
      m(s, s) = Cplx(-0.5, 0);
      m(n - 1, n - 1) = Cplx(0.5, 0);
      break;
    case BasisKind::e:
      m(s, t) = Cplx(0.5, 0);
      m(t, s) = Cplx(-0.5, 0);
      break;
    case BasisKind::f:
      m(s, t) = Cplx(0, 0.5);
      m(t, s) = Cplx(0, 0.5);
      break;
    case BasisKind::ur:
      m(s, t) = Cplx(1, 0);
      break;
    case BasisKind::ui:
      m(s, t) = Cplx(0, 1);
      break;
  }
  return m;
}

std::vector<SuElement> su_basis(int n) {
  if (n < 2) fail("su_basis: n < 2");
  std::vector<SuElement> out;
  out.reserve(n * n - 1);
  for (int s = 1; s <= n - 1; ++s) out.emplace_back(basis_matrix({BasisKind::h, s}, n));
  for (int s = 1; s <= n; ++s)
    for (int t = s + 1; t <= n; ++t) out.emplace_back(basis_matrix({BasisKind::e, s, t}, n));
  for (int s = 1; s <= n; ++s)
    for (int t = s + 1; t <= n; ++t) out.emplace_back(basis_matrix({BasisKind::f, s, t}, n));
  return out;
}

std::vector<BorelElement> borel_basis(int n) {
  if (n < 2) fail("borel_basis: n < 2");
  std::vector<BorelElement> out;
  out.reserve(n * n + n - 2);
  for (int s = 1; s <= n - 1; ++s) {
    out.emplace_back(basis_matrix({BasisKind::h, s}, n));
    out.emplace_back(basis_matrix({BasisKind::ih, s}, n));
  }
  for (int k = 1; k <= n; ++k)
    for (int l = k + 1; l <= n; ++l) {
      out.emplace_back(basis_matrix({BasisKind::ur, k, l}, n));
      out.emplace_back(basis_matrix({BasisKind::ui, k, l}, n));
    }
  return out;
}

CMat h_difference(int n, int s, int t) {
  if (n < 2 || s < 1 || t < 1 || s > n || t > n || s == t) fail("h_difference: bad indices");
  CMat m = CMat::Zero(n, n);
  m(s - 1, s - 1) = Cplx(0, 0.5);
  m(t - 1, t - 1) = Cplx(0, -0.5);
  return m;
}

SlElement bracket(const SlElement& x, const SlElement& y) {
  require_same_size(x, y, "bracket");
  return SlElement(commutator(x.mat(), y.mat()));
}

HermitianSplit split_hermitian(const SlElement& x) {
  CMat su = anti_hermitian_part(x.mat());
  CMat isu = hermitian_part(x.mat());
  return {SuElement(std::move(su)), SlElement(std::move(isu))};
}

DiagonalSplit split_diagonal(const BorelElement& x) {
  const int n = x.size();
  RVec re(n), im(n);
  CMat uni = x.mat();
  for (int i = 0; i < n; ++i) {
    re(i) = uni(i, i).real();
    im(i) = uni(i, i).imag();
    uni(i, i) = Cplx(0, 0);
  }
  return {std::move(re), std::move(im), BorelElement(std::move(uni))};
}

CMat adjoint_action(const CMat& k, const CMat& x) {
  if (k.rows() != k.cols() || k.rows() != x.rows()) fail("adjoint_action: size mismatch");
  Eigen::FullPivLU<CMat> lu(k);
  if (!lu.isInvertible()) fail("adjoint_action: singular conjugator");
  return k * x * lu.inverse();
}

SlElement adjoint_action(const CMat& k, const SlElement& x) {
  return SlElement(adjoint_action(k, x.mat()));
}

CMat expm(const CMat& x) {
  const int n = static_cast<int>(x.rows());
  double norm = max_abs(x);
  int s = 0;
  while (norm > 0.25 && s < 60) {
    norm /= 2;
    ++s;
  }
  CMat a = x / std::pow(2.0, s);
  CMat term = CMat::Identity(n, n);
  CMat sum = term;
  for (int k = 1; k <= 40; ++k) {
    term = (term * a) / static_cast<double>(k);
    sum += term;
    if (max_abs(term) < 1e-18) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

// ---------------------------------------------------------------------------
// Simultaneous triangularization of a commuting family.
//
// The flag is built one dimension at a time: restrict the family to the
// current invariant subspace, pick an eigenvalue of each member in turn and
// intersect the kernels.  Any vector of the final intersection is a common
// eigenvector.  Targets, when given, steer the eigenvalue choices so that
// the diagonal order matches a previous sample of a path.
// ---------------------------------------------------------------------------

namespace {

// Orthonormal kernel basis of m (columns), using singular values below tol.
CMat kernel_basis(const CMat& m, double tol) {
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int k = 0;
  for (int i = static_cast<int>(sv.size()) - 1; i >= 0; --i)
    if (sv(i) <= tol) ++k;
  if (k == 0) return CMat(m.cols(), 0);
  return svd.matrixV().rightCols(k);
}

// Common eigenvector of a commuting family, with per-matrix joint eigenvalue
// targets (may be null).  Also reports the achieved joint eigenvalues.
CVec common_eigenvector(const std::vector<CMat>& fam, const std::vector<Cplx>* target,
                        std::vector<Cplx>* joint) {
  const int k = static_cast<int>(fam.front().rows());
  CMat v = CMat::Identity(k, k);
  joint->clear();
  for (std::size_t mi = 0; mi < fam.size(); ++mi) {
    if (v.cols() == 1) {
      // already down to a line; record Rayleigh quotients for the rest
      joint->push_back((v.col(0).adjoint() * fam[mi] * v.col(0))(0, 0));
      continue;
    }
    CMat g = v.adjoint() * fam[mi] * v;
    Eigen::ComplexEigenSolver<CMat> es(g, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("commuting_triangularize: eigensolver failed");
    CVec evs = es.eigenvalues();
    Cplx lambda;
    if (target) {
      int best = 0;
      for (int i = 1; i < evs.size(); ++i)
        if (std::abs(evs(i) - (*target)[mi]) < std::abs(evs(best) - (*target)[mi])) best = i;
      lambda = evs(best);
    } else {
      int best = 0;
      for (int i = 1; i < evs.size(); ++i) {
        if (evs(i).real() < evs(best).real() - 1e-12 ||
            (std::abs(evs(i).real() - evs(best).real()) <= 1e-12 &&
             evs(i).imag() < evs(best).imag()))
          best = i;
      }
      lambda = evs(best);
    }
    const double scale = std::max(1.0, max_abs(g));
    CMat ker = kernel_basis(g - lambda * CMat::Identity(g.rows(), g.cols()), 1e-9 * scale);
    if (ker.cols() == 0) {
      // eigensolver eigenvalue slightly off a defective cluster; widen
      ker = kernel_basis(g - lambda * CMat::Identity(g.rows(), g.cols()), 1e-6 * scale);
      if (ker.cols() == 0) throw std::runtime_error("commuting_triangularize: empty eigenspace");
    }
    joint->push_back(lambda);
    v = v * ker;
  }
  return v.col(0);
}

// Unitary whose first column is the given unit vector.
CMat unitary_from_column(const CVec& v) {
  const int k = static_cast<int>(v.size());
  CMat a = CMat::Zero(k, 1);
  a.col(0) = v;
  Eigen::HouseholderQR<CMat> qr(a);
  CMat q = qr.householderQ();
  Cplx phase = q.col(0).dot(v);  // v^H q ... align q.col(0) with v
  phase = (q.col(0).adjoint() * v)(0, 0);
  q.col(0) = v;  // exact first column; remaining columns stay orthonormal to it
  // re-orthonormalize the remaining columns against the exact first column
  for (int j = 1; j < k; ++j) {
    CVec c = q.col(j);
    c -= v * (v.adjoint() * c)(0, 0);
    for (int p = 1; p < j; ++p) c -= q.col(p) * (q.col(p).adjoint() * c)(0, 0);
    double nrm = c.norm();
    if (nrm < 1e-8) throw std::runtime_error("commuting_triangularize: basis completion failed");
    q.col(j) = c / nrm;
  }
  (void)phase;
  return q;
}

}  // namespace

Triangularization commuting_triangularize(std::span<const CMat> ms,
                                          const std::vector<std::vector<Cplx>>* target_diagonals) {
  if (ms.empty()) fail("commuting_triangularize: empty input");
  const int n = static_cast<int>(ms[0].rows());
  for (const auto& m : ms) {
    if (m.rows() != n || m.cols() != n) fail("commuting_triangularize: size mismatch");
    if (!entries_finite(m)) fail("commuting_triangularize: non-finite entries");
  }
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      double scale = std::max(1.0, max_abs(ms[i])) * std::max(1.0, max_abs(ms[j]));
      if (max_abs(commutator(ms[i], ms[j])) > kEpsComm * scale)
        fail("commuting_triangularize: inputs do not commute");
    }

  std::vector<CMat> work(ms.begin(), ms.end());
  CMat q_total = CMat::Identity(n, n);

  for (int d = 0; d < n - 1; ++d) {
    const int k = n - d;
    std::vector<CMat> fam;
    fam.reserve(work.size());
    for (const auto& w : work) fam.push_back(w.bottomRightCorner(k, k));

    const std::vector<Cplx>* target = nullptr;
    if (target_diagonals) target = &(*target_diagonals)[d];
    std::vector<Cplx> joint;
    CVec v = common_eigenvector(fam, target, &joint);

    CMat u = unitary_from_column(v);
    CMat u_full = CMat::Identity(n, n);
    u_full.bottomRightCorner(k, k) = u;
    for (auto& w : work) {
      w = u_full.adjoint() * w * u_full;
      // the new column d is an eigvector direction: clean the subdiagonal part
      for (int r = d + 1; r < n; ++r) w(r, d) = Cplx(0, 0);
    }
    q_total = q_total * u_full;
  }

  // postcondition: residual of the triangularization
  for (std::size_t i = 0; i < ms.size(); ++i) {
    CMat recon = q_total * work[i] * q_total.adjoint();
    double scale = std::max(1.0, max_abs(ms[i]));
    if (max_abs(recon - ms[i]) > 1e-8 * scale)
      throw std::runtime_error("commuting_triangularize: failed to converge (reconstruction residual)");
  }
  return {std::move(q_total), std::move(work)};
}

// ---------------------------------------------------------------------------
// Branch-controlled logarithm of an upper triangular matrix.
//
// Diagonal entries are clustered; within a cluster the log is computed by
// inverse scaling-and-squaring of the nearly-unipotent factor, across
// clusters by the block recurrence with Sylvester solves.  Non-contiguous
// clusters are first made contiguous with unitary swaps of adjacent diagonal
// entries.
// ---------------------------------------------------------------------------

namespace {

// Principal square root of upper triangular t with diagonal near 1.
CMat sqrtm_upper(const CMat& t) {
  const int n = static_cast<int>(t.rows());
  CMat r = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) r(i, i) = std::sqrt(t(i, i));
  for (int d = 1; d < n; ++d)
    for (int i = 0; i + d < n; ++i) {
      const int j = i + d;
      Cplx s = t(i, j);
      for (int k = i + 1; k < j; ++k) s -= r(i, k) * r(k, j);
      r(i, j) = s / (r(i, i) + r(j, j));
    }
  return r;
}

// log of upper triangular m with all diagonal entries near a common value
// whose chosen branch log is lbar.
CMat log_cluster_block(const CMat& m, Cplx lbar) {
  const int n = static_cast<int>(m.rows());
  CMat b = m * std::exp(-lbar);
  int s = 0;
  while (max_abs(b - CMat::Identity(n, n)) > 0.25 && s < 80) {
    b = sqrtm_upper(b);
    ++s;
  }
  CMat e = b - CMat::Identity(n, n);
  CMat term = e;
  CMat sum = CMat::Zero(n, n);
  for (int k = 1; k <= 64; ++k) {
    sum += term / static_cast<double>(k) * ((k % 2) ? 1.0 : -1.0);
    term = term * e;
    if (max_abs(term) < 1e-18) break;
  }
  sum *= std::pow(2.0, s);
  for (int i = 0; i < n; ++i) sum(i, i) += lbar;
  return sum;
}

// X solving A X - X B = C (A, B small upper triangular, spectra disjoint).
CMat sylvester(const CMat& a, const CMat& b, const CMat& c) {
  const int p = static_cast<int>(a.rows()), q = static_cast<int>(b.rows());
  CMat k = CMat::Zero(p * q, p * q);
  // vec(X) column-major: (I_q (x) A - B^T (x) I_p) vec(X) = vec(C)
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < p; ++i) {
      const int row = j * p + i;
      for (int l = 0; l < p; ++l) k(row, j * p + l) += a(i, l);
      for (int l = 0; l < q; ++l) k(row, l * p + i) -= b(l, j);
    }
  CVec rhs(p * q);
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < p; ++i) rhs(j * p + i) = c(i, j);
  Eigen::PartialPivLU<CMat> lu(k);
  CVec x = lu.solve(rhs);
  CMat out(p, q);
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < p; ++i) out(i, j) = x(j * p + i);
  return out;
}

// Unitary 2x2 similarity swapping the diagonal entries of an upper
// triangular 2x2 block [[a, b], [0, c]] with a != c.
Eigen::Matrix2cd swap_rotation(Cplx a, Cplx b, Cplx c) {
  CVec x(2);
  x(0) = b;
  x(1) = c - a;
  x.normalize();
  Eigen::Matrix2cd g;
  g(0, 0) = x(0);
  g(1, 0) = x(1);
  g(0, 1) = -std::conj(x(1));
  g(1, 1) = std::conj(x(0));
  return g;
}

}  // namespace

BorelElement branch_log_upper(const CMat& u_in, const std::optional<BorelElement>& reference) {
  const int n = static_cast<int>(u_in.rows());
  if (n < 2 || u_in.cols() != n) fail("branch_log_upper: need square n >= 2");
  if (!entries_finite(u_in)) fail("branch_log_upper: non-finite entries");
  const double scale = std::max(1.0, max_abs(u_in));
  if (strict_lower_max(u_in) > 1e-12 * scale) fail("branch_log_upper: input not upper triangular");
  if (reference && reference->size() != n) fail("branch_log_upper: reference size mismatch");

  CMat u = u_in;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) u(i, j) = Cplx(0, 0);

  // branch choice per diagonal entry
  std::vector<Cplx> l(n);
  Cplx lsum(0, 0);
  for (int i = 0; i < n; ++i) {
    const Cplx d = u(i, i);
    if (std::abs(d) < 1e-300) fail("branch_log_upper: zero diagonal entry");
    Cplx principal = std::log(d);
    double k = 0.0;
    if (reference) {
      k = std::round((reference->mat()(i, i).imag() - principal.imag()) / (2.0 * kPi));
    } else if (kPi - std::abs(principal.imag()) < 1e-9) {
      fail("branch_log_upper: eigenvalue at branch cut and no reference given");
    }
    l[i] = principal + Cplx(0, 2.0 * kPi * k);
    lsum += l[i];
  }
  if (std::abs(lsum.real()) > 0.5 * kEpsAlg)
    fail("branch_log_upper: determinant modulus not 1");

  // cluster nearly-equal diagonal entries (transitive closure)
  const double dscale = std::max(1.0, u.diagonal().cwiseAbs().maxCoeff());
  const double delta = 1e-6 * dscale;
  std::vector<int> cluster(n, -1);
  int n_clusters = 0;
  for (int i = 0; i < n; ++i) {
    if (cluster[i] >= 0) continue;
    cluster[i] = n_clusters;
    bool grew = true;
    while (grew) {
      grew = false;
      for (int a = 0; a < n; ++a)
        if (cluster[a] == n_clusters)
          for (int b = 0; b < n; ++b)
            if (cluster[b] < 0 && std::abs(u(a, a) - u(b, b)) <= delta) {
              cluster[b] = n_clusters;
              grew = true;
            }
    }
    ++n_clusters;
  }
  // branch must be uniform within a cluster, otherwise no triangular log exists
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (cluster[a] == cluster[b] &&
          std::abs((l[a] - std::log(u(a, a))) - (l[b] - std::log(u(b, b)))) > 1e-9)
        fail("branch_log_upper: reference assigns different branches to equal eigenvalues");

  // make clusters contiguous via adjacent unitary swaps (bubble pass)
  CMat w = CMat::Identity(n, n);
  std::vector<int> cl = cluster;
  std::vector<Cplx> lo = l;
  bool swapped = true;
  while (swapped) {
    swapped = false;
    for (int i = 0; i + 1 < n; ++i) {
      if (cl[i] > cl[i + 1]) {
        Eigen::Matrix2cd g = swap_rotation(u(i, i), u(i, i + 1), u(i + 1, i + 1));
        u.block(i, 0, 2, n) = g.adjoint() * u.block(i, 0, 2, n);
        u.block(0, i, n, 2) = u.block(0, i, n, 2) * g;
        u(i + 1, i) = Cplx(0, 0);
        w.block(0, i, n, 2) = w.block(0, i, n, 2) * g;
        std::swap(cl[i], cl[i + 1]);
        std::swap(lo[i], lo[i + 1]);
        swapped = true;
      }
    }
  }

  // block partition (clusters now contiguous and sorted by id)
  std::vector<int> starts;
  for (int i = 0; i < n; ++i)
    if (i == 0 || cl[i] != cl[i - 1]) starts.push_back(i);
  starts.push_back(n);
  const int nb = static_cast<int>(starts.size()) - 1;

  CMat f = CMat::Zero(n, n);
  for (int p = 0; p < nb; ++p) {
    const int i0 = starts[p], sz = starts[p + 1] - i0;
    f.block(i0, i0, sz, sz) = log_cluster_block(u.block(i0, i0, sz, sz), lo[i0]);
  }
  for (int d = 1; d < nb; ++d)
    for (int p = 0; p + d < nb; ++p) {
      const int q = p + d;
      const int ip = starts[p], sp = starts[p + 1] - ip;
      const int iq = starts[q], sq = starts[q + 1] - iq;
      CMat rhs = f.block(ip, ip, sp, sp) * u.block(ip, iq, sp, sq) -
                 u.block(ip, iq, sp, sq) * f.block(iq, iq, sq, sq);
      for (int r = p + 1; r < q; ++r) {
        const int ir = starts[r], sr = starts[r + 1] - ir;
        rhs += f.block(ip, ir, sp, sr) * u.block(ir, iq, sr, sq) -
               u.block(ip, ir, sp, sr) * f.block(ir, iq, sr, sq);
      }
      f.block(ip, iq, sp, sq) = sylvester(u.block(ip, ip, sp, sp), u.block(iq, iq, sq, sq), rhs);
    }

  // undo the swaps; a branch-consistent log is a polynomial in the input, so
  // the result is upper triangular up to roundoff
  CMat out = w * f * w.adjoint();
  if (strict_lower_max(out) > 1e-8 * std::max(1.0, max_abs(out)))
    throw std::runtime_error("branch_log_upper: failed to produce a triangular logarithm");
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) out(i, j) = Cplx(0, 0);
  return BorelElement(std::move(out));
}

SlElement random_sl(int n, std::uint64_t seed) { return random_element(Space::sl, n, seed); }

SuElement random_su(int n, std::uint64_t seed) {
  return SuElement(random_element(Space::su, n, seed));
}

BorelElement random_borel(int n, std::uint64_t seed) {
  return BorelElement(random_element(Space::borel, n, seed));
}

SlElement random_element(Space space, int n, std::uint64_t seed) {
  if (n < 2) fail("random_element: n < 2");
  std::mt19937_64 rng(sub_seed(seed, static_cast<std::uint64_t>(space), static_cast<std::uint64_t>(n)));
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double re = gauss(rng), im = gauss(rng);
      m(i, j) = Cplx(re, im);
    }
  switch (space) {
    case Space::sl:
      m -= (m.trace() / static_cast<double>(n)) * CMat::Identity(n, n);
      break;
    case Space::su:
      m -= (m.trace() / static_cast<double>(n)) * CMat::Identity(n, n);
      m = anti_hermitian_part(m);
      break;
    case Space::borel: {
      for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) m(i, j) = Cplx(0, 0);
      Cplx shift = m.trace() / static_cast<double>(n);
      for (int i = 0; i < n; ++i) m(i, i) -= shift;
      break;
    }
  }
  return SlElement(std::move(m));
}

}  // namespace volflow
