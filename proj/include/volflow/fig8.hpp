#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "volflow/matrix.hpp"

// Numerical oracle on the figure-eight knot complement: the two-tetrahedron
// deformation space gives a computable volume function and a holonomy pair
// (u, v) against which the boundary rate formula is validated by finite
// differences and the quadratic surgery law.

namespace volflow {

struct ShapePair {
  Cplx z, w;
};

// Log holonomies of the peripheral basis; the complete structure sits at
// u = v = 0 and v(u) = tau u + O(u^3) with Im(tau) > 0.
struct HolonomyPair {
  Cplx u, v;
};

class Fig8SolveError : public std::runtime_error {
 public:
  Fig8SolveError(const std::string& msg, int sample_index = -1)
      : std::runtime_error(msg), sample_index_(sample_index) {}
  int sample_index() const { return sample_index_; }

 private:
  int sample_index_;
};

// Bloch-Wigner function D(z) = Im(Li_2(z)) + arg(1-z) log|z|; the volume of
// the ideal tetrahedron with cross ratio z.  Absolute accuracy ~1e-13.
double bloch_wigner(Cplx z);

// Dilogarithm on the cut plane, via inversion/reflection plus the
// log-argument series.
Cplx dilog(Cplx z);

// Branch bookkeeping for the five logarithms entering the gluing and
// holonomy functions, tracked continuously from the complete structure.
struct ShapeLogs {
  Cplx log_z, log_one_minus_z, log_w, log_w_ratio /* log(1 - 1/w) */, log_one_minus_w;
};

ShapeLogs shape_logs(const ShapePair& s, const std::optional<ShapeLogs>& reference);

// Residuals of the deformed-structure equations in log form:
//   r1 = 2 log z - log(1-z) + log w + 2 log(1-1/w) - 2 pi i      (edge)
//   r2 = log z + log(1-w) - u_target                             (meridian)
// Both vanish on the deformation curve.
std::pair<Cplx, Cplx> gluing_residual(const ShapePair& s, Cplx u_target,
                                      const std::optional<ShapeLogs>& reference = std::nullopt);

inline ShapePair complete_shapes() {
  const Cplx z{0.5, 0.8660254037844386467637231707529362};
  return {z, z};
}

// Newton solve of the gluing system at the given meridian holonomy; the seed
// must lie in the basin (continuation along a path passes the previous
// solution).  Residual target 1e-12.
ShapePair solve_shapes(Cplx u_target, const ShapePair& seed,
                       const std::optional<ShapeLogs>& reference = std::nullopt);

// Longitude log holonomy v = -2 log(1-w) - 2 log(1-1/w), branch-tracked.
Cplx holonomy_v(const ShapePair& s, const std::optional<ShapeLogs>& reference = std::nullopt);

double volume_of(const ShapePair& s);

struct PathSpec {
  enum class Kind { radial, circle, list };
  Kind kind = Kind::radial;
  Cplx u0{0, 0};
  int samples = 33;          // odd, >= 9
  std::vector<Cplx> points;  // kind == list
};

struct DeformationRow {
  double t;
  Cplx u, v;
  double vol;
  double rate;      // boundary formula on finite-difference jets
  double rate_fd;   // finite difference of the volume column (exploratory)
  double int_rate;  // running trapezoid integral of rate
  double residual;  // max |gluing residual| at the solved shapes
};

// The rate integral is compared against q_nz = 1/4 Im(conj(u0) v(u0)); the
// discrepancy is O(|u0|^4), which the halving diagnostic exhibits.
struct DecayDiagnostic {
  std::vector<double> radii;
  std::vector<double> errors;
  double slope = 0.0;  // log-log fit
};

struct DeformationReport {
  std::vector<DeformationRow> rows;
  double integral_rate = 0.0;  // composite Simpson over the path
  double q_nz = 0.0;           // s_nz * 1/4 Im(conj(u_end) v_end)
  double nz_discrepancy = 0.0;
  std::optional<DecayDiagnostic> decay;  // radial paths only
};

// Sign relating the rate integral to 1/4 Im(conj(u) v); fixed by
// calibrate_nz_sign() against the measured volume decrease.
inline constexpr double kNzSign = 1.0;
double calibrate_nz_sign();

// Estimate of the cusp shape tau = v'(0) by central differences.
Cplx tau_estimate(double h = 1e-3);

DeformationReport deformation_experiment(const PathSpec& path, bool with_decay_diagnostic = true);

}  // namespace volflow
