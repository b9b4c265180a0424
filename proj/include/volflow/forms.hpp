#pragma once

#include <functional>
#include <span>
#include <vector>

#include "volflow/lie.hpp"

// The concrete cochains behind the volume variation formula: the invariant
// 3-form omega on sl_n, its bounded trivialization beta on the Borel
// subalgebra, the primitive gamma with d(gamma) = var(omega), and the
// boundary cocycle zeta.  A small Chevalley-Eilenberg differential evaluator
// makes every identity between them machine-checkable.

namespace volflow {

// Alternating multilinear real-valued cochain, represented functionally.
struct ScalarCochain {
  int degree;
  std::function<double(std::span<const SlElement>)> eval;

  double operator()(std::span<const SlElement> args) const;
};

// Cochain with values in the dual module; the value is only ever needed
// through its evaluation on a probe element.  Module action used throughout:
// (g . phi)(h) = -phi([g, h]).
struct DualCochain {
  int degree;
  std::function<double(std::span<const SlElement>, const SlElement&)> eval;

  double operator()(std::span<const SlElement> args, const SlElement& probe) const;
};

// omega(A,B,C) = 2i tr(p(A) [p(B), p(C)]) with p the Hermitian projection
// sl_n -> i su_n.  The +2i sign is fixed so that the evaluation on the
// standard orthonormal tangent triple at n = 2 is +1 (hyperbolic volume
// normalization).
double omega_eval(const SlElement& a, const SlElement& b, const SlElement& c);

// Same form evaluated through its coordinate expansion in the dual basis of
// i su_n: a wedge term per index pair j < k plus a triple-product term per
// index triple j < k < l.  Independent of the trace code path; agrees with
// omega_eval on all inputs.
double omega_basis_expansion_eval(const SlElement& a, const SlElement& b, const SlElement& c);

// beta(x, y) = i tr(x_u^* y_u - x_u y_u^*) / 4 on b_n, with x_u, y_u the
// strictly upper parts.  Depends only on the unipotent parts;
// beta(ur_12, ui_12) = -1/2 under this trace-form convention.
double beta_eval(const BorelElement& x, const BorelElement& y);

// gamma(g)(h) = i tr(p_{i su}(g) p_{su}(h)); d(gamma) = var(omega).
double gamma_eval(const SlElement& g, const SlElement& h);

// zeta(x)(y) = i tr(p_{i h}(x) p_h(y)) = -sum_j Re(x_jj) Im(y_jj).
double zeta_eval(const BorelElement& x, const BorelElement& y);

ScalarCochain omega_cochain(int n);
ScalarCochain beta_cochain(int n);   // arguments must be upper triangular
DualCochain gamma_dual(int n);
DualCochain zeta_dual(int n);        // arguments must be upper triangular

// var(c)(g_1..g_{k-1})(h) = c(g_1, ..., g_{k-1}, h).
DualCochain var_map(const ScalarCochain& c);

// (dc)(x_1..x_{k+1}) = sum_{i<j} (-1)^{i+j} c([x_i,x_j], ..., ^x_i, ..., ^x_j, ...).
double ce_diff_scalar(const ScalarCochain& c, std::span<const SlElement> args);

// Chevalley-Eilenberg differential with the dual-module action term,
// evaluated at probe.
double ce_diff_dual(const DualCochain& c, std::span<const SlElement> args,
                    const SlElement& probe);

// Dimension of the space of Ad-invariant alternating 2-forms on su_n,
// computed as the nullity of the infinitesimal invariance system
// phi([X,Y],Z) + phi(Y,[X,Z]) = 0 over the dual basis.  Zero for all n.
int invariant_two_form_dimension(int n);

// Dimension of T-invariant 2-forms on b_n / h_n: n(n-1)/2 + (n-1)(n-2)/2.
int borel_invariant_two_form_dimension(int n);

// Sanity inversion for the same machinery: T-invariant 1-forms on b_n / h_n
// form an (n-1)-dimensional space.
int borel_invariant_one_form_dimension(int n);

}  // namespace volflow
