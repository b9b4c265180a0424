#pragma once

#include <span>
#include <vector>

#include "volflow/forms.hpp"
#include "volflow/lie.hpp"

// The per-cusp rate evaluator on peripheral first-order data, extraction of
// that data from holonomy paths, the symmetric-power embedding of SL_2, and
// the comparison formulas written in other coordinate systems.

namespace volflow {

// First-order data of one cusp: upper triangular logs a, b of the longitude
// and meridian holonomies and their t-derivatives.
struct CuspJet {
  BorelElement a;
  BorelElement b;
  BorelElement da;
  BorelElement db;

  CuspJet(BorelElement a_, BorelElement b_, BorelElement da_, BorelElement db_);
  int size() const { return a.size(); }
};

// c(a)(db) - c(b)(da) for a degree-1 dual cochain.
double torus_pair_eval(const DualCochain& c, const CuspJet& jet);

// sum_i tr(Re(b_i) Im(da_i) - Re(a_i) Im(db_i)).
double volume_rate(std::span<const CuspJet> jets);

// Same quantity through the boundary cocycle: sum_i zeta-pairing of jet i.
// Kept as an independent code path; agrees with volume_rate to ~1e-15.
double volume_rate_via_zeta(std::span<const CuspJet> jets);

// Translation lengths / rotation angles of the two peripheral generators of
// an SL_2 cusp, with their derivatives.
struct HodgsonData {
  double l1 = 0, theta1 = 0, l2 = 0, theta2 = 0;
  double dl1 = 0, dtheta1 = 0, dl2 = 0, dtheta2 = 0;
};

// sum (1/2)(l2 dtheta1 - l1 dtheta2).
double hodgson_rate(std::span<const HodgsonData> data);

// The diagonal n=2 jet realizing the given length/angle data.
CuspJet hodgson_jet(const HodgsonData& d);

struct DggCoords {
  CVec lambda, mu, dlambda, dmu;  // length n-1
};

// Successive diagonal-log differences lambda_s = a_{s+1,s+1} - a_{s,s} and
// likewise mu from b.
DggCoords dgg_coords(const CuspJet& jet);

// sum_{ij} (kappa^{-1})_{ij} (Re lambda_i Im dmu_j - Re mu_j Im dlambda_i)
// with kappa the tridiagonal Cartan matrix of size n-1.
double dgg_rate(int n, const DggCoords& c);

// kDggSign * volume_rate == dgg_rate identically; the constant is fixed by
// calibrate_dgg_sign() on a reference jet.
inline constexpr double kDggSign = -1.0;
double calibrate_dgg_sign();

struct BfgCoords {
  Cplx logA, logAs, logB, logBs;
  Cplx dlogA, dlogAs, dlogB, dlogBs;
};

// PGL_3-normalized coordinates: logA = b_33 - b_22, logA* = b_22 - b_11 from
// the meridian log, logB/logB* likewise from the longitude log.
BfgCoords bfg_coords(const CuspJet& jet);

// (1/12) Im(dlog ^ log) over 2 A^B + 2 A*^B* + A*^B + A^B*, with
// Im(dlog ^ log)(f ^ g) = log|g| darg f - log|f| darg g.
double bfg_rate(const BfgCoords& c);

// 4 * bfg_rate == kBfgSign * volume_rate identically on n=3 jets.
inline constexpr double kBfgSign = -1.0;
double calibrate_bfg_sign();

// Image of a 2x2 unimodular matrix under the n-dimensional irreducible
// representation (degree n-1 symmetric power on binary forms).
CMat veronese_group(int n, const CMat& m);

// Induced Lie algebra map sl_2 -> sl_n: diag(1,-1) -> diag(n-1, n-3, ...),
// upper nilpotent -> superdiagonal (n-1, ..., 1), lower -> (1, ..., n-1).
SlElement veronese_algebra(int n, const SlElement& x);

// Pushforward of an n=2 jet along the symmetric power; rates scale by
// binomial(n+1, 3).
CuspJet veronese_jet(int n, const CuspJet& jet2);

struct PeripheralPathSample {
  double t;
  CMat rho_l;
  CMat rho_m;
};

// Jet extraction from a sampled path of commuting peripheral holonomy pairs:
// simultaneous triangularization with frame matching along the path,
// branch-tracked logs, and second-order finite differences at sample `at`
// (which must have neighbours on both sides).
CuspJet peripheral_jet(std::span<const PeripheralPathSample> samples, std::size_t at);

}  // namespace volflow
