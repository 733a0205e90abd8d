#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "srcdisc/linalg.hpp"
#include "srcdisc/model.hpp"
#include "srcdisc/parallel.hpp"

namespace srcdisc {

// Eigenvalues within this band of zero count as degenerate: the boundary of
// the forbidden region, where direct guessing ties the optimum.
inline constexpr double kSignTol = 1e-12;

// Largest matrix dimension the dense tensor-power path will accept.
inline constexpr Eigen::Index kDenseDimCap = 8192;

/// Result of one decision problem. `spectrum` holds the eigenvalues of
/// Omega = P2 rho2 - P1 rho1 (or its M-shot analogue) in descending order;
/// `multiplicity` is all ones except for the compressed M-shot fast path,
/// where degenerate tensor-power eigenvalues are grouped.
struct BoundReport {
  double e_min = 0.0;
  double e_guess = 0.0;
  double advantage = 1.0;  // e_guess / e_min; +inf in exact orthogonal limits
  bool forbidden = false;
  std::vector<double> spectrum;
  std::vector<double> multiplicity;
};

/// Sum of absolute eigenvalues of a real symmetric matrix.
inline double trace_norm_symmetric(const Eigen::MatrixXd& m) {
  require_symmetric(m, 1e-10);
  return symmetric_eigenvalues(m).cwiseAbs().sum();
}

/// Error probability of guessing the likelier hypothesis without measuring.
inline double direct_guess(double p1) {
  if (!std::isfinite(p1) || p1 < 0.0 || p1 > 1.0)
    throw std::invalid_argument("p1 must be in [0, 1]");
  return std::min(p1, 1.0 - p1);
}

namespace detail {

inline double advantage_ratio(double e_guess, double e_min) {
  if (e_min <= 0.0)
    return e_guess > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  return e_guess / e_min;
}

// Assemble a report from an explicit (weighted) eigenvalue multiset.
inline BoundReport report_from_spectrum(std::vector<double> values,
                                        std::vector<double> counts,
                                        double e_guess) {
  BoundReport rep;
  rep.e_guess = e_guess;

  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  rep.spectrum.reserve(values.size());
  rep.multiplicity.reserve(values.size());
  double abs_sum = 0.0;
  double min_ev = std::numeric_limits<double>::infinity();
  double max_ev = -min_ev;
  for (std::size_t idx : order) {
    rep.spectrum.push_back(values[idx]);
    rep.multiplicity.push_back(counts[idx]);
    abs_sum += counts[idx] * std::abs(values[idx]);
    min_ev = std::min(min_ev, values[idx]);
    max_ev = std::max(max_ev, values[idx]);
  }
  rep.e_min = std::max(0.0, 0.5 * (1.0 - abs_sum));
  rep.forbidden = (min_ev >= -kSignTol) || (max_ev <= kSignTol);
  rep.advantage = advantage_ratio(rep.e_guess, rep.e_min);
  return rep;
}

inline BoundReport report_from_omega(const Eigen::MatrixXd& omega, double e_guess) {
  const Eigen::VectorXd ev = symmetric_eigenvalues(omega);
  std::vector<double> values(ev.data(), ev.data() + ev.size());
  return report_from_spectrum(std::move(values),
                              std::vector<double>(ev.size(), 1.0), e_guess);
}

}  // namespace detail

/// Helstrom minimum-error probability for a one-shot decision:
/// E_min = (1 - ||P2 rho2 - P1 rho1||_1) / 2.
inline BoundReport helstrom_one_shot(const ScenarioParams& params) {
  params.validate();
  const HypothesisPair pair = build_states(params);
  const Eigen::MatrixXd omega =
      params.p2() * pair.rho2.mat - params.p1 * pair.rho1.mat;
  return detail::report_from_omega(omega, direct_guess(params.p1));
}

/// Closed-form forbidden-region test for the asymmetric scenario:
/// every eigenvalue of Omega is positive exactly when p1 < q/(1+q),
/// independent of the separation. Boundary ties (smallest eigenvalue within
/// kSignTol of zero) are classified forbidden by the eigenvalue test.
inline bool certify_forbidden_asymmetric(const ScenarioParams& params) {
  params.validate();
  if (params.kind != Scenario::Asymmetric)
    throw std::invalid_argument("certify_forbidden_asymmetric requires the asymmetric scenario");
  return params.p1 < params.q / (1.0 + params.q);
}

/// Grid certification that the symmetric scenario has no forbidden region.
struct SymmetricCertification {
  double max_det = -std::numeric_limits<double>::infinity();
  long all_positive_points = 0;  // full sign-definiteness certificates found
  long all_negative_points = 0;
  long forbidden_points = 0;     // eigenvalue-sign classification
  long total_points = 0;

  bool clean() const {
    return max_det < 0.0 && all_positive_points == 0 &&
           all_negative_points == 0 && forbidden_points == 0;
  }
};

/// Scan Omega over a (k, q, p1) grid: track the maximum determinant, count
/// points where the sequential-principal-minor certificate of all-positive
/// (m1 > 0, m2 > 0, det > 0) or all-negative (m1 < 0, m2 > 0, det < 0)
/// eigenvalues is satisfiable, and count eigenvalue-sign forbidden points.
inline SymmetricCertification certify_no_forbidden_symmetric(
    std::span<const double> k_grid, std::span<const double> q_grid,
    std::span<const double> p1_grid) {
  if (k_grid.empty() || q_grid.empty() || p1_grid.empty())
    throw std::invalid_argument("grids must be non-empty");
  for (double k : k_grid)
    if (k <= 0.0) throw std::invalid_argument("k grid must be positive");

  SymmetricCertification cert;
  for (double k : k_grid) {
    for (double q : q_grid) {
      const HypothesisPair pair = build_states({Scenario::Symmetric, k, q, 0.5});
      const Eigen::Matrix3d rho1 = pair.rho1.mat;
      const Eigen::Matrix3d rho2 = pair.rho2.mat;
      for (double p1 : p1_grid) {
        const Eigen::Matrix3d omega = (1.0 - p1) * rho2 - p1 * rho1;
        const double m1 = omega(0, 0);
        const double m2 = omega(0, 0) * omega(1, 1) - omega(0, 1) * omega(1, 0);
        const double det = omega.determinant();
        cert.max_det = std::max(cert.max_det, det);
        if (m1 > 0.0 && m2 > 0.0 && det > 0.0) ++cert.all_positive_points;
        if (m1 < 0.0 && m2 > 0.0 && det < 0.0) ++cert.all_negative_points;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(omega, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        if (ev.minCoeff() >= -kSignTol || ev.maxCoeff() <= kSignTol)
          ++cert.forbidden_points;
        ++cert.total_points;
      }
    }
  }
  return cert;
}

enum class MShotPath { Auto, Dense, Fast };

namespace detail {

// One degenerate eigenvalue group of rho2^{(x)M}: `value` is the eigenvalue,
// `count` the dimension of the eigenspace, `weight` the squared projection of
// psi0^{(x)M} onto it. Sorted by value descending after merging.
struct EigGroup {
  double value = 0.0;
  double weight = 0.0;
  double count = 0.0;
};

// Spectral data of rho2 as seen from rho1 = |e0><e0|.
struct Rank2Spectrum {
  std::vector<double> mu;  // nonzero eigenvalues of rho2, descending
  std::vector<double> w;   // squared overlaps <u_i|e0>^2 for those eigenvectors
  double w_kernel = 0.0;   // squared overlap with the kernel of rho2
  Eigen::Index dim = 0;
};

inline Rank2Spectrum rank2_spectrum(const DensityMatrix& rho2) {
  Eigen::VectorXd vals;
  Eigen::MatrixXd vecs;
  symmetric_eigen(rho2.mat, vals, vecs);
  Rank2Spectrum spec;
  spec.dim = rho2.dim();
  for (Eigen::Index i = vals.size() - 1; i >= 0; --i) {
    const double mu = std::max(0.0, vals(i));
    const double w = vecs(0, i) * vecs(0, i);
    if (mu < 1e-14) {
      spec.w_kernel += w;
    } else {
      spec.mu.push_back(mu);
      spec.w.push_back(w);
    }
  }
  return spec;
}

// Eigenvalue groups of rho2^{(x)M} with the projection weights of
// psi0^{(x)M}. Tensor products of the rank-<=2 eigenbasis give eigenvalues
// mu1^a mu2^b 0^c; (a,b) splits with c = 0 stay distinct, everything touching
// the kernel collapses into a single zero group. Weights are multinomial
// products evaluated in log space.
inline std::vector<EigGroup> tensor_power_groups(const Rank2Spectrum& spec, long m) {
  std::vector<EigGroup> groups;
  const bool has_kernel = spec.w_kernel > 0.0 || spec.mu.size() < static_cast<std::size_t>(spec.dim);
  double nonzero_weight = 0.0;
  double nonzero_count = 0.0;
  if (spec.mu.size() == 2) {
    const double lmu1 = std::log(spec.mu[0]);
    const double lmu2 = std::log(spec.mu[1]);
    const double lw1 = spec.w[0] > 0.0 ? std::log(spec.w[0]) : -std::numeric_limits<double>::infinity();
    const double lw2 = spec.w[1] > 0.0 ? std::log(spec.w[1]) : -std::numeric_limits<double>::infinity();
    groups.reserve(m + 2);
    for (long a = m; a >= 0; --a) {
      const long b = m - a;
      const double ln_n = std::lgamma(m + 1.0) - std::lgamma(a + 1.0) - std::lgamma(b + 1.0);
      double ln_w = ln_n;
      if (a > 0) ln_w += a * lw1;
      if (b > 0) ln_w += b * lw2;
      EigGroup g;
      g.value = std::exp(a * lmu1 + b * lmu2);
      g.count = std::exp(ln_n);
      g.weight = std::isfinite(ln_w) ? std::exp(ln_w) : 0.0;
      nonzero_weight += g.weight;
      nonzero_count += g.count;
      groups.push_back(g);
    }
  } else if (spec.mu.size() == 1) {
    EigGroup g;
    g.value = std::exp(m * std::log(spec.mu[0]));
    g.count = 1.0;
    g.weight = spec.w[0] > 0.0 ? std::exp(m * std::log(spec.w[0])) : 0.0;
    nonzero_weight = g.weight;
    nonzero_count = g.count;
    groups.push_back(g);
  } else {
    throw std::invalid_argument("rho2 must have rank 1 or 2");
  }
  if (has_kernel) {
    EigGroup zero;
    zero.value = 0.0;
    zero.weight = std::max(0.0, 1.0 - nonzero_weight);
    zero.count = std::pow(static_cast<double>(spec.dim), static_cast<double>(m)) - nonzero_count;
    groups.push_back(zero);
  }
  std::sort(groups.begin(), groups.end(),
            [](const EigGroup& a, const EigGroup& b) { return a.value > b.value; });
  // Deflate near-coincident eigenvalues so the secular poles stay distinct.
  std::vector<EigGroup> merged;
  for (const EigGroup& g : groups) {
    if (!merged.empty() && merged.back().value - g.value <= 1e-13 * merged.back().value) {
      merged.back().weight += g.weight;
      merged.back().count += g.count;
    } else {
      merged.push_back(g);
    }
  }
  return merged;
}

// Smallest eigenvalue of P2 D - P1 zz^T written as s = lambda_min + p1.
// The shifted secular function h(s) = sum_g W_g (s - d_g) / (d_g + p1 - s)
// is strictly increasing on [0, d_min + p1) with h' = sum W_g p1 / (.)^2,
// so a bisection bracket plus safeguarded Newton converges to full relative
// precision even when the root is at the 1e-14 scale.
inline double bottom_root_shifted(const std::vector<double>& d,
                                  const std::vector<double>& w, double p1) {
  const double d_min = *std::min_element(d.begin(), d.end());
  auto h = [&](double s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
      acc += w[i] * (s - d[i]) / (d[i] + p1 - s);
    return acc;
  };
  auto hp = [&](double s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double den = d[i] + p1 - s;
      acc += w[i] * p1 / (den * den);
    }
    return acc;
  };
  double lo = 0.0;
  double hi = d_min + p1;
  if (h(0.0) >= 0.0) return 0.0;
  double s = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double v = h(s);
    if (v < 0.0)
      lo = s;
    else
      hi = s;
    double s_next = s - v / hp(s);
    if (!(s_next > lo && s_next < hi)) s_next = 0.5 * (lo + hi);
    if (std::abs(s_next - s) <= 1e-16 * std::max(std::abs(s_next), 1e-300)) {
      s = s_next;
      break;
    }
    s = s_next;
  }
  return s;
}

// Interior secular root inside (d_lo, d_hi) by bisection on the secular
// function f(x) = 1 - p1 sum_g W_g / (d_g - x), which decreases from +inf to
// -inf across the interval.
inline double interior_root(const std::vector<double>& d, const std::vector<double>& w,
                            double p1, double d_lo, double d_hi) {
  auto f = [&](double x) {
    double acc = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) acc -= p1 * w[i] / (d[i] - x);
    return acc;
  };
  double lo = d_lo;
  double hi = d_hi;
  for (int iter = 0; iter < 120; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// E_min only, via the bottom secular root. Cheap enough for large m.
inline double mshot_e_min_fast(const ScenarioParams& params, long m) {
  const double p1 = params.p1;
  const double p2 = params.p2();
  if (p1 <= 1e-15 || p2 <= 1e-15) return std::min(p1, p2);
  const HypothesisPair pair = build_states(params);
  const Rank2Spectrum spec = rank2_spectrum(pair.rho2);
  const std::vector<EigGroup> groups = tensor_power_groups(spec, m);
  std::vector<double> d;
  std::vector<double> w;
  for (const EigGroup& g : groups) {
    if (g.weight >= 1e-15) {
      d.push_back(p2 * g.value);
      w.push_back(g.weight);
    }
  }
  const double s = bottom_root_shifted(d, w, p1);
  return std::min(s, p1);
}

// Full fast-path report with the compressed spectrum: spectator eigenvalues
// P2 d_g with multiplicity (count - 1), one secular root per interacting
// group, and whole groups left unperturbed when their weight is below 1e-15.
inline BoundReport helstrom_m_shot_fast(const ScenarioParams& params, long m) {
  const double p1 = params.p1;
  const double p2 = params.p2();
  const double e_guess = direct_guess(params.p1);
  const HypothesisPair pair = build_states(params);

  if (p1 <= 1e-15 || p2 <= 1e-15) {
    // Degenerate priors: Omega = +-rho^{(x)m}; report the compressed
    // tensor-power spectrum directly.
    const Rank2Spectrum spec = rank2_spectrum(p1 <= 1e-15 ? pair.rho2 : pair.rho1);
    const std::vector<EigGroup> groups = tensor_power_groups(spec, m);
    std::vector<double> values;
    std::vector<double> counts;
    const double sign = p1 <= 1e-15 ? 1.0 : -1.0;
    for (const EigGroup& g : groups) {
      values.push_back(sign * std::max(p1, p2) * g.value);
      counts.push_back(g.count);
    }
    return report_from_spectrum(std::move(values), std::move(counts), e_guess);
  }

  const Rank2Spectrum spec = rank2_spectrum(pair.rho2);
  const std::vector<EigGroup> groups = tensor_power_groups(spec, m);

  std::vector<double> d;
  std::vector<double> w;
  std::vector<double> values;
  std::vector<double> counts;
  for (const EigGroup& g : groups) {
    if (g.weight >= 1e-15) {
      d.push_back(p2 * g.value);
      w.push_back(g.weight);
      if (g.count > 1.0) {
        values.push_back(p2 * g.value);
        counts.push_back(g.count - 1.0);
      }
    } else if (g.count > 0.0) {
      values.push_back(p2 * g.value);
      counts.push_back(g.count);
    }
  }

  // One interlaced root per interacting interval, plus the bottom root.
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    values.push_back(interior_root(d, w, p1, d[i + 1], d[i]));
    counts.push_back(1.0);
  }
  const double s = bottom_root_shifted(d, w, p1);
  values.push_back(s - p1);
  counts.push_back(1.0);

  BoundReport rep = report_from_spectrum(std::move(values), std::move(counts), e_guess);
  // The identity E_min = p1 + min(lambda_min, 0) is exact here and avoids the
  // 1 - sum|ev| cancellation, so it survives down to E_min ~ 1e-14. The
  // forbidden flag follows the same value comparison; for huge m the
  // tolerance-banded sign test would misread spectator eigenvalues that decay
  // below kSignTol.
  rep.e_min = std::min(s, p1);
  rep.forbidden = rep.e_min >= e_guess - kSignTol;
  rep.advantage = advantage_ratio(e_guess, rep.e_min);
  return rep;
}

inline BoundReport helstrom_m_shot_dense(const ScenarioParams& params, long m) {
  const HypothesisPair pair = build_states(params);
  const Eigen::Index dim_base = pair.rho1.dim();
  double dim = 1.0;
  for (long i = 0; i < m; ++i) {
    dim *= static_cast<double>(dim_base);
    if (dim > static_cast<double>(kDenseDimCap))
      throw std::invalid_argument("m too large for the dense path (dimension cap 8192)");
  }
  Eigen::MatrixXd r1 = Eigen::MatrixXd::Identity(1, 1);
  Eigen::MatrixXd r2 = Eigen::MatrixXd::Identity(1, 1);
  for (long i = 0; i < m; ++i) {
    r1 = kronecker(r1, pair.rho1.mat);
    r2 = kronecker(r2, pair.rho2.mat);
  }
  const Eigen::MatrixXd omega = params.p2() * r2 - params.p1 * r1;
  return report_from_omega(omega, direct_guess(params.p1));
}

}  // namespace detail

/// Helstrom bound after an M-shot test:
/// E_min = (1 - ||P2 rho2^{(x)M} - P1 rho1^{(x)M}||_1) / 2.
/// The dense path eigendecomposes the full Kronecker power (dimension cap
/// 8192); the fast path solves the rank-one-downdate secular equation over
/// the O(M) distinct tensor-power eigenvalue groups. Auto uses the fast path.
inline BoundReport helstrom_m_shot(const ScenarioParams& params, long m,
                                   MShotPath path = MShotPath::Auto) {
  params.validate();
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  switch (path) {
    case MShotPath::Dense:
      return detail::helstrom_m_shot_dense(params, m);
    case MShotPath::Fast:
    case MShotPath::Auto:
      return detail::helstrom_m_shot_fast(params, m);
  }
  throw std::logic_error("unknown MShotPath");
}

/// Smallest shot count whose Helstrom bound beats direct guessing, or the
/// sentinel when the cap is reached first. E_min(m) is non-increasing in m,
/// so an exponential bracket plus binary search suffices.
struct MinimalMReport {
  long m_min = 0;        // meaningful only when !exceeded
  bool exceeded = false;
  double e_min_at_m = 0.0;
};

inline MinimalMReport minimal_m(const ScenarioParams& params, long m_cap) {
  params.validate();
  if (m_cap < 1) throw std::invalid_argument("m_cap must be >= 1");
  const double e_guess = direct_guess(params.p1);
  auto beats = [&](long m) { return detail::mshot_e_min_fast(params, m) < e_guess - 1e-12; };

  MinimalMReport rep;
  long hi = 1;
  long lo = 0;  // E_min(0) := E_guess never beats
  while (hi <= m_cap && !beats(hi)) {
    lo = hi;
    hi = std::min(m_cap, hi * 2);
    if (lo == m_cap) break;
  }
  if (lo >= m_cap || !beats(hi)) {
    rep.exceeded = true;
    rep.m_min = m_cap;
    rep.e_min_at_m = detail::mshot_e_min_fast(params, m_cap);
    return rep;
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (beats(mid))
      hi = mid;
    else
      lo = mid;
  }
  rep.m_min = hi;
  rep.e_min_at_m = detail::mshot_e_min_fast(params, hi);
  return rep;
}

/// One-shot bounds for every grid point, evaluated in parallel. Points are
/// independent, so the output order and values never depend on the worker
/// count.
struct SweepPoint {
  ScenarioParams params;
  BoundReport bound;
};

inline std::vector<SweepPoint> advantage_sweep(const std::vector<ScenarioParams>& grid,
                                               int workers = 1) {
  if (grid.empty()) throw std::invalid_argument("sweep grid must be non-empty");
  for (const ScenarioParams& p : grid) p.validate();
  std::vector<SweepPoint> out(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    out[i].params = grid[i];
    out[i].bound = helstrom_one_shot(grid[i]);
  });
  return out;
}

}  // namespace srcdisc
