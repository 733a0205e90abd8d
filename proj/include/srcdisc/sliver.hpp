#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "srcdisc/discrimination.hpp"
#include "srcdisc/model.hpp"
#include "srcdisc/quadrature.hpp"

namespace srcdisc {

enum class Hypothesis { OneSource, TwoSources };

/// Even/odd spatial-mode probabilities after image inversion about x = 0.
/// The protocol is derived for equal priors and equal brightness (q = 0.5);
/// the single H1 source sits at the inversion center, so its odd mode is
/// exactly dark.
struct ModeProbabilities {
  double pr_even_h1 = 1.0;
  double pr_odd_h1 = 0.0;
  double pr_even_h2 = 1.0;
  double pr_odd_h2 = 0.0;
};

inline ModeProbabilities mode_probabilities(Scenario kind, double k) {
  detail::require_separation(k);
  ModeProbabilities p;
  if (kind == Scenario::Asymmetric) {
    const double e = std::exp(-k * k / 2.0);
    p.pr_even_h2 = 0.25 * (3.0 + e);
    p.pr_odd_h2 = 0.25 * (1.0 - e);
  } else {
    const double e = std::exp(-k * k / 8.0);
    p.pr_even_h2 = 0.5 * (1.0 + e);
    p.pr_odd_h2 = 0.5 * (1.0 - e);
  }
  return p;
}

/// Decision rule: accept the two-source hypothesis as soon as the odd-mode
/// detector triggered in any shot; otherwise keep the single source.
inline Hypothesis decide(std::span<const bool> odd_triggered) {
  if (odd_triggered.empty())
    throw std::invalid_argument("decision requires at least one recorded shot");
  for (bool odd : odd_triggered)
    if (odd) return Hypothesis::TwoSources;
  return Hypothesis::OneSource;
}

/// Protocol performance after m shots with equal priors: the odd mode never
/// fires under H1 (alpha = 0) and the miss probability is Pr(even|H2)^m.
struct ProtocolReport {
  double alpha = 0.0;
  double beta = 1.0;
  double p_err = 0.5;
  double saturation = 1.0;
  double exponent = 0.0;
};

/// One-shot Helstrom bound at the protocol's operating point
/// (P1 = P2 = 0.5, q = 0.5) divided by the protocol's one-shot error.
/// At k = 0 both sides equal the blind guess, so the ratio is 1 by
/// convention.
inline double saturation(Scenario kind, double k) {
  detail::require_separation(k);
  if (k < kCoincidentSeparation) return 1.0;
  const double e_min = helstrom_one_shot({kind, k, 0.5, 0.5}).e_min;
  const double p_err = 0.5 * mode_probabilities(kind, k).pr_even_h2;
  return e_min / p_err;
}

inline ProtocolReport protocol_error(Scenario kind, double k, long m) {
  detail::require_separation(k);
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  const ModeProbabilities p = mode_probabilities(kind, k);
  ProtocolReport rep;
  rep.alpha = 0.0;
  rep.beta = std::pow(p.pr_even_h2, static_cast<double>(m));
  rep.p_err = 0.5 * rep.beta;
  rep.exponent = -std::log(p.pr_even_h2);
  rep.saturation = saturation(kind, k);
  return rep;
}

/// Semiclassical quadrature oracle for the mode probabilities: decompose the
/// image-plane field of each source into even and odd parts about x = 0,
/// integrate the mean intensities numerically, and normalize. Runs two panel
/// refinements and treats disagreement as quadrature failure.
inline ModeProbabilities semiclassical_oracle(Scenario kind, double k) {
  detail::require_separation(k);
  const double norm = std::pow(2.0 * M_PI, -0.25);
  auto amp = [norm](double x) { return norm * std::exp(-x * x / 4.0); };

  const double shifts_a[2] = {0.0, k};
  const double shifts_s[2] = {k / 2.0, -k / 2.0};
  const double* shifts = kind == Scenario::Asymmetric ? shifts_a : shifts_s;

  auto mean_intensities = [&](int panels, double& even, double& odd) {
    even = odd = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double c = shifts[i];
      auto even_part = [&](double x) {
        const double v = 0.5 * (amp(x - c) + amp(-x - c));
        return v * v;
      };
      auto odd_part = [&](double x) {
        const double v = 0.5 * (amp(x - c) - amp(-x - c));
        return v * v;
      };
      const double half_width = 12.0 + std::abs(c);
      even += integrate(even_part, -half_width, half_width, panels);
      odd += integrate(odd_part, -half_width, half_width, panels);
    }
  };

  double even1 = 0.0, odd1 = 0.0, even2 = 0.0, odd2 = 0.0;
  mean_intensities(32, even1, odd1);
  mean_intensities(48, even2, odd2);
  const double total = even2 + odd2;
  if (std::abs(even1 - even2) > 1e-10 || std::abs(odd1 - odd2) > 1e-10 ||
      std::abs(total - 2.0) > 1e-8)
    throw std::runtime_error("semiclassical quadrature did not converge");

  ModeProbabilities p;
  p.pr_even_h2 = even2 / total;
  p.pr_odd_h2 = odd2 / total;
  return p;
}

}  // namespace srcdisc
