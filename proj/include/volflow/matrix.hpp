#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace volflow {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Membership tolerance for algebraic constraints (tracelessness,
// anti-Hermitian defect) on unit-scale inputs.
inline constexpr double kEpsAlg = 1e-10;
// Tolerance for accepting a family of matrices as commuting.
inline constexpr double kEpsComm = 1e-8;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Cplx kImUnit{0.0, 1.0};

inline double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

inline CMat conj_transpose(const CMat& m) { return m.adjoint(); }

inline CMat commutator(const CMat& x, const CMat& y) { return x * y - y * x; }

inline bool entries_finite(const CMat& m) { return m.allFinite(); }

// Distance of z to the nearest point of 2*pi*i*Z.
inline double dist_to_2pi_lattice(Cplx z) {
  double k = std::round(z.imag() / (2.0 * kPi));
  return std::abs(z - Cplx(0.0, 2.0 * kPi * k));
}

inline double strict_lower_max(const CMat& m) {
  double r = 0.0;
  for (Eigen::Index i = 1; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j) r = std::max(r, std::abs(m(i, j)));
  return r;
}

inline bool strict_lower_is_zero(const CMat& m) {
  for (Eigen::Index i = 1; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (m(i, j) != Cplx(0.0, 0.0)) return false;
  return true;
}

// splitmix64; used to derive independent sub-seeds from a user seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t sub_seed(std::uint64_t base, std::uint64_t a,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
  return mix_seed(base + mix_seed(a + mix_seed(b + mix_seed(c))));
}

}  // namespace volflow
