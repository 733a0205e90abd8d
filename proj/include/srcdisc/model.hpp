#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "srcdisc/linalg.hpp"
#include "srcdisc/quadrature.hpp"

namespace srcdisc {

enum class Scenario { Asymmetric, Symmetric };

inline const char* to_string(Scenario s) {
  return s == Scenario::Asymmetric ? "asymmetric" : "symmetric";
}

inline Scenario scenario_from_string(std::string_view name) {
  if (name == "asymmetric" || name == "a") return Scenario::Asymmetric;
  if (name == "symmetric" || name == "s") return Scenario::Symmetric;
  throw std::invalid_argument("scenario must be 'asymmetric' or 'symmetric'");
}

// Below this separation the sources are treated as exactly coincident: the
// Gram-Schmidt normalizers vanish at overlap 1 and the states reduce to a
// single point source.
inline constexpr double kCoincidentSeparation = 1e-9;

/// One full problem instance: scenario, separation k = d/sigma in units of
/// the point-spread width, brightness weighting q of the first source, and
/// prior probability p1 of the single-source hypothesis.
struct ScenarioParams {
  Scenario kind = Scenario::Asymmetric;
  double k = 1.0;
  double q = 0.5;
  double p1 = 0.5;

  double p2() const { return 1.0 - p1; }

  void validate() const {
    if (!std::isfinite(k) || k < 0.0)
      throw std::invalid_argument("k must be >= 0 and finite");
    if (!std::isfinite(q) || q < 0.0 || q > 1.0)
      throw std::invalid_argument("q must be in [0, 1]");
    if (!std::isfinite(p1) || p1 < 0.0 || p1 > 1.0)
      throw std::invalid_argument("p1 must be in [0, 1]");
  }
};

/// Real symmetric positive-semidefinite unit-trace matrix holding a
/// one-photon state in the orthonormalized basis (2x2 or 3x3).
struct DensityMatrix {
  Eigen::MatrixXd mat;

  Eigen::Index dim() const { return mat.rows(); }

  bool is_valid(double sym_tol = 1e-12, double trace_tol = 1e-12,
                double psd_tol = 1e-10) const {
    if (mat.rows() != mat.cols() || !mat.allFinite()) return false;
    if ((mat - mat.transpose()).cwiseAbs().maxCoeff() > sym_tol) return false;
    if (std::abs(mat.trace() - 1.0) > trace_tol) return false;
    return symmetric_eigenvalues(mat).minCoeff() >= -psd_tol;
  }
};

/// The (rho1, rho2) pair for one scenario. `overlap` is tau for the
/// asymmetric scenario and delta for the symmetric one; `delta3` is the
/// second-stage Gram-Schmidt coefficient (symmetric only, zero otherwise).
struct HypothesisPair {
  DensityMatrix rho1;
  DensityMatrix rho2;
  double overlap = 1.0;
  double delta3 = 0.0;
};

namespace detail {

inline void require_separation(double k) {
  if (!std::isfinite(k) || k < 0.0)
    throw std::invalid_argument("k must be >= 0 and finite");
}

}  // namespace detail

/// Overlap <psi_0|psi_d> of two unit-width Gaussian amplitudes separated by k.
inline double overlap_tau(double k) {
  detail::require_separation(k);
  return std::exp(-k * k / 8.0);
}

/// Overlap <psi_0|psi_{+-}> with half-shifted sources (separation k/2).
inline double overlap_delta(double k) {
  detail::require_separation(k);
  return std::exp(-k * k / 32.0);
}

/// Numerical-quadrature oracle for <psi_i|psi_j> with Gaussian amplitudes
/// centered at the given shifts (in units of sigma). The closed form is
/// exp(-(shift_i - shift_j)^2 / 8); the quadrature is kept independent of it
/// so it can cross-check the analytic overlaps. The Gaussian tails are below
/// 1e-30 at twelve widths, so the truncated domain loses nothing at double
/// precision.
inline double psf_overlap_oracle(double shift_i, double shift_j) {
  if (!std::isfinite(shift_i) || !std::isfinite(shift_j))
    throw std::invalid_argument("shifts must be finite");
  const double lo = std::min(shift_i, shift_j) - 12.0;
  const double hi = std::max(shift_i, shift_j) + 12.0;
  const double norm = std::pow(2.0 * M_PI, -0.25);
  auto amp = [norm](double x) { return norm * std::exp(-x * x / 4.0); };
  auto integrand = [&](double x) { return amp(x - shift_i) * amp(x - shift_j); };
  const int panels = std::max(24, static_cast<int>(std::ceil(hi - lo)));
  return integrate(integrand, lo, hi, panels);
}

/// Build the one-photon density matrices for a scenario. The basis is the
/// Gram-Schmidt orthonormalization of {psi_0, psi_d} (asymmetric) or
/// {psi_0, psi_+, psi_-} (symmetric); rho1 is always the projector onto the
/// first basis vector.
inline HypothesisPair build_states(const ScenarioParams& params) {
  params.validate();
  const double q = params.q;

  if (params.kind == Scenario::Asymmetric) {
    HypothesisPair pair;
    pair.rho1.mat = Eigen::MatrixXd::Zero(2, 2);
    pair.rho1.mat(0, 0) = 1.0;
    const double tau = overlap_tau(params.k);
    pair.overlap = tau;
    if (params.k < kCoincidentSeparation) {
      pair.rho2 = pair.rho1;
      return pair;
    }
    const double s = std::sqrt(std::max(0.0, 1.0 - tau * tau));
    Eigen::Vector2d v0(1.0, 0.0);
    Eigen::Vector2d vd(tau, s);
    pair.rho2.mat = q * v0 * v0.transpose() + (1.0 - q) * vd * vd.transpose();
    return pair;
  }

  HypothesisPair pair;
  pair.rho1.mat = Eigen::MatrixXd::Zero(3, 3);
  pair.rho1.mat(0, 0) = 1.0;
  const double delta = overlap_delta(params.k);
  pair.overlap = delta;
  if (params.k < kCoincidentSeparation) {
    pair.rho2 = pair.rho1;
    return pair;
  }
  const double d2 = delta * delta;
  const double s = std::sqrt(std::max(0.0, 1.0 - d2));
  const double delta3 = -d2 * s;
  pair.delta3 = delta3;
  // Components of psi_+ and psi_- in the orthonormal basis {|0>,|1>,|2>}.
  Eigen::Vector3d vp(delta, s, 0.0);
  const double rest = std::sqrt(std::max(0.0, 1.0 - d2 - delta3 * delta3));
  Eigen::Vector3d vm(delta, delta3, rest);
  pair.rho2.mat = q * vp * vp.transpose() + (1.0 - q) * vm * vm.transpose();
  return pair;
}

}  // namespace srcdisc
