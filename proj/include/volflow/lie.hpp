#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "volflow/matrix.hpp"

// Real Lie algebra arithmetic for sl_n(C), su_n and the Borel subalgebra b_n
// of traceless upper triangular matrices, plus the matrix-level utilities
// (exponential, simultaneous triangularization of commuting families,
// branch-tracked triangular logarithms) used by the cusp-jet extraction.

namespace volflow {

// Traceless n x n complex matrix.  Traces lying in 2*pi*i*Z are accepted:
// branch-shifted logarithms of unit-determinant matrices land there, and
// every quantity computed downstream is invariant under such shifts.
class SlElement {
 public:
  explicit SlElement(CMat m) : m_(std::move(m)) { validate(); }

  const CMat& mat() const { return m_; }
  int size() const { return static_cast<int>(m_.rows()); }
  Cplx operator()(int i, int j) const { return m_(i, j); }

 private:
  void validate() const;
  CMat m_;
};

// Anti-Hermitian traceless matrix (X + X^* = 0).
class SuElement {
 public:
  explicit SuElement(CMat m);
  explicit SuElement(SlElement x);

  const CMat& mat() const { return x_.mat(); }
  const SlElement& sl() const { return x_; }
  int size() const { return x_.size(); }

 private:
  SlElement x_;
};

// Traceless upper triangular matrix; the strict lower triangle must be
// exactly zero (constructors never round it away).
class BorelElement {
 public:
  explicit BorelElement(CMat m);
  explicit BorelElement(SlElement x);

  const CMat& mat() const { return x_.mat(); }
  const SlElement& sl() const { return x_; }
  int size() const { return x_.size(); }

 private:
  SlElement x_;
};

enum class BasisKind { h, e, f, ih, ur, ui };

// Index of a standard basis element:  h_s / ih_s take a single index s with
// 1 <= s <= n-1; the off-diagonal kinds take a pair 1 <= s < t <= n.
struct BasisIndex {
  BasisKind kind;
  int s = 0;
  int t = 0;  // unused for h / ih

  void validate(int n) const;
};

CMat basis_matrix(const BasisIndex& idx, int n);

// Orthogonal R-basis of su_n: h_1..h_{n-1}, then e_{st} (lexicographic), then
// f_{st}.  Total n^2 - 1 elements.
std::vector<SuElement> su_basis(int n);

// R-basis of b_n: the pairs (h_s, i h_s) for s = 1..n-1, then the pairs
// (ur_{kl}, ui_{kl}) in lexicographic (k,l) order.  Total n^2 + n - 2.
std::vector<BorelElement> borel_basis(int n);

// The literal difference matrix h_s - h_t (with h_n read as 0): i/2 in
// diagonal position s, -i/2 in position t.  Exposed as a plain matrix since
// it is not a basis element for n >= 3.
CMat h_difference(int n, int s, int t);

SlElement bracket(const SlElement& x, const SlElement& y);

struct HermitianSplit {
  SuElement su_part;    // (x - x^*)/2
  SlElement isu_part;   // (x + x^*)/2, Hermitian traceless
};

// Orthogonal decomposition sl_n = su_n + i su_n.
HermitianSplit split_hermitian(const SlElement& x);

inline CMat hermitian_part(const CMat& m) { return (m + m.adjoint()) / 2.0; }
inline CMat anti_hermitian_part(const CMat& m) { return (m - m.adjoint()) / 2.0; }

struct DiagonalSplit {
  RVec re_diag;
  RVec im_diag;
  BorelElement unipotent;  // zero diagonal
};

// x = diag(re + i*im) + unipotent for upper triangular x.
DiagonalSplit split_diagonal(const BorelElement& x);

// k x k^{-1}.  Throws on (numerically) singular k.
SlElement adjoint_action(const CMat& k, const SlElement& x);
CMat adjoint_action(const CMat& k, const CMat& x);

// Scaling-and-squaring matrix exponential; accurate to ~1e-12 for inputs of
// norm up to ~10.
CMat expm(const CMat& x);
inline CMat matrix_exp(const SlElement& x) { return expm(x.mat()); }

struct Triangularization {
  CMat conjugator;           // unitary
  std::vector<CMat> uppers;  // conjugator^* m conjugator, upper triangular
};

// Simultaneous unitary triangularization of a pairwise-commuting family.
// When target_diagonals is given (one complex per matrix and flag position,
// outer index = flag position), the joint eigenvalue sequence along the
// diagonal is chosen to match it as closely as possible; this is what keeps
// conjugators continuous along a sampled path.
Triangularization commuting_triangularize(
    std::span<const CMat> ms,
    const std::vector<std::vector<Cplx>>* target_diagonals = nullptr);

// Upper triangular logarithm with branch control: the diagonal of the result
// is the principal log of diag(u) shifted entrywise by 2*pi*i*k to the branch
// nearest the reference diagonal.  No trace-zero repair is applied after
// shifting, so the trace of the result lies in 2*pi*i*Z rather than being
// forced to 0; downstream rate formulas are invariant under that ambiguity.
// exp(result) reproduces u to ~1e-9.
BorelElement branch_log_upper(const CMat& u,
                              const std::optional<BorelElement>& reference = std::nullopt);

enum class Space { sl, su, borel };

// Deterministic in (space, n, seed): standard complex normal entries
// projected onto the requested subspace.
SlElement random_element(Space space, int n, std::uint64_t seed);
SlElement random_sl(int n, std::uint64_t seed);
SuElement random_su(int n, std::uint64_t seed);
BorelElement random_borel(int n, std::uint64_t seed);

}  // namespace volflow
