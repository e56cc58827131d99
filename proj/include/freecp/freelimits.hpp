#pragma once

// Free-probability limit quantities of the random CP maps: the variational
// norm f(A) = min_x h(x, A), Marchenko-Pastur edges, the Haagerup bound, the
// limiting maximum output p-norm through the two-level eigenvalue reduction,
// closed-form violation bounds and the checks for 1 < p <= 1.5.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "freecp/matrixkit.hpp"

namespace freecp {

/// PSD k x k matrix A together with its cached spectrum.
struct CoefficientMatrix {
  CMat matrix;
  SpectralProfile spectrum;

  int k() const { return static_cast<int>(matrix.rows()); }

  static CoefficientMatrix from(const CMat& a) {
    require_hermitian(a, "CoefficientMatrix", 1e-10);
    SpectralProfile s = eigenvalues_herm(a);
    const double floor = -1e-10 * std::max(1.0, s.max());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s.values(i) < floor) throw NotPsdError("CoefficientMatrix", s.values(i));
      s.values(i) = std::max(0.0, s.values(i));
    }
    return CoefficientMatrix{0.5 * (a + a.adjoint()), std::move(s)};
  }
};

/// Eigenvalue levels with multiplicities; h(x) = 1/x + sum_j w_j l_j / (1 - l_j x).
struct WeightedLevels {
  std::vector<double> level;
  std::vector<double> weight;

  static WeightedLevels of(const SpectralProfile& s) {
    WeightedLevels w;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      w.level.push_back(s.values(i));
      w.weight.push_back(1.0);
    }
    return w;
  }
  double top() const {
    double t = 0.0;
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (weight[i] > 0.0) t = std::max(t, level[i]);
    }
    return t;
  }
};

namespace detail {

inline double h_levels(double x, const WeightedLevels& w) {
  double acc = 1.0 / x;
  for (std::size_t i = 0; i < w.level.size(); ++i) acc += w.weight[i] * w.level[i] / (1.0 - w.level[i] * x);
  return acc;
}

inline double h_prime_levels(double x, const WeightedLevels& w) {
  double acc = -1.0 / (x * x);
  for (std::size_t i = 0; i < w.level.size(); ++i) {
    const double d = 1.0 - w.level[i] * x;
    acc += w.weight[i] * w.level[i] * w.level[i] / (d * d);
  }
  return acc;
}

}  // namespace detail

/// Result of minimising h over (0, 1/lambda_max).
struct FLimit {
  double value = 0.0;
  double minimizer = 0.0;
};

/// Bisection on the strictly increasing h' over (0, 1/top).
inline FLimit minimize_h(const WeightedLevels& w) {
  const double top = w.top();
  if (!(top > 0.0)) throw DomainError("f_limit: coefficient matrix must be non-zero");
  double lo = 0.0;
  double hi = 1.0 / top;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double d = detail::h_prime_levels(mid, w);
    if (std::abs(d) <= 1e-12 / (mid * mid)) break;
    if (d < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return FLimit{detail::h_levels(mid, w), mid};
}

inline void require_h_domain(double x, double top) {
  if (!(x > 0.0) || (top > 0.0 && !(x < 1.0 / top))) {
    throw DomainError("h: x = " + std::to_string(x) + " outside (0, 1/lambda_max)");
  }
}

/// h(x, A) = 1/x + sum lambda_i / (1 - lambda_i x).
inline double h_value(double x, const SpectralProfile& s) {
  require_h_domain(x, s.max());
  return detail::h_levels(x, WeightedLevels::of(s));
}

inline double h_derivative(double x, const SpectralProfile& s) {
  require_h_domain(x, s.max());
  return detail::h_prime_levels(x, WeightedLevels::of(s));
}

/// f(A) = min_x h(x, A); depends on A only through its spectrum.
inline FLimit f_limit(const SpectralProfile& s) { return minimize_h(WeightedLevels::of(s)); }
inline FLimit f_limit(const CoefficientMatrix& a) { return f_limit(a.spectrum); }

/// Support edges ((sqrt k - 1)^2, (sqrt k + 1)^2) of Marchenko-Pastur rate k.
inline std::pair<double, double> mp_edges(int k) {
  if (k < 1) throw DomainError("mp_edges: k must be positive");
  const double s = std::sqrt(static_cast<double>(k));
  return {(s - 1.0) * (s - 1.0), (s + 1.0) * (s + 1.0)};
}

/// Window ((1 - 1/sqrt k)^2, (1 + 1/sqrt k)^2) of limiting channel traces.
inline std::pair<double, double> trace_window(int k) {
  const auto [lo, hi] = mp_edges(k);
  return {lo / k, hi / k};
}

/// 3 ||A||_2 + |Tr A|.
inline double haagerup_bound(const CMat& a) {
  require_square(a, "haagerup_bound");
  return 3.0 * a.norm() + std::abs(a.trace());
}

/// Power sums Tr[A^r], r = 1..r_max: the free cumulants of sum a_ij s_i s_j.
inline std::vector<double> quadratic_form_cumulants(const SpectralProfile& s, int r_max) {
  std::vector<double> out;
  for (int r = 1; r <= r_max; ++r) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s.values(i), r);
    out.push_back(acc);
  }
  return out;
}

/// Eigenvalue shape (alpha, beta, ..., beta) with alpha^q + (k-1) beta^q = 1.
struct TwoLevelProfile {
  double alpha = 1.0;
  double beta = 0.0;
  int k = 2;
  double q = 1.0;

  static TwoLevelProfile from_alpha(double alpha, int k, double q) {
    const double rest = std::max(0.0, 1.0 - std::pow(alpha, q));
    return TwoLevelProfile{alpha, std::pow(rest / (k - 1), 1.0 / q), k, q};
  }
  WeightedLevels levels() const { return WeightedLevels{{alpha, beta}, {1.0, static_cast<double>(k - 1)}}; }
  double constraint_residual() const { return std::pow(alpha, q) + (k - 1) * std::pow(beta, q) - 1.0; }
};

struct MopnLimit {
  double value = 0.0;         ///< (1/k) max f over the q-sphere
  TwoLevelProfile argmax;
  bool proven_regime = false; ///< q >= 3 (or p = inf); otherwise the reduction needs large k
  bool symbolic = false;      ///< p = inf handled exactly
};

/// max over alpha in [k^(-1/q), 1] of min_x h(x, diag(alpha, beta(alpha), ...)), divided by k.
/// Dense grid plus golden-section refinement on the best bracket.
inline MopnLimit limit_mopn(int k, const SchattenIndex& p, int grid_points = 2048) {
  if (k < 2) throw DomainError("limit_mopn: k must be at least 2");
  MopnLimit out;
  if (p.is_infinite()) {
    out.value = 4.0 / k;
    out.argmax = TwoLevelProfile{1.0, 0.0, k, 1.0};
    out.proven_regime = true;
    out.symbolic = true;
    return out;
  }
  const double q = p.conjugate();
  const double alpha_lo = std::pow(static_cast<double>(k), -1.0 / q);
  auto g = [&](double alpha) { return minimize_h(TwoLevelProfile::from_alpha(alpha, k, q).levels()).value; };

  grid_points = std::max(grid_points, 3);
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  std::vector<double> alphas(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) {
    alphas[i] = alpha_lo + (1.0 - alpha_lo) * i / (grid_points - 1);
    const double v = g(alphas[i]);
    if (v > best_val) {  // strict: lowest index wins ties
      best_val = v;
      best = i;
    }
  }
  double a = alphas[std::max(best - 1, 0)];
  double b = alphas[std::min(best + 1, grid_points - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 200 && (b - a) > 1e-15; ++it) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  double best_alpha = alphas[best];
  const double mid = 0.5 * (a + b);
  const double gmid = g(mid);
  if (gmid > best_val) {
    best_val = gmid;
    best_alpha = mid;
  }
  out.value = best_val / k;
  out.argmax = TwoLevelProfile::from_alpha(best_alpha, k, q);
  out.proven_regime = q >= 3.0;
  return out;
}

/// (k^(-1/q) I normalised) value k^(-2+1/p) (sqrt k + 1)^2, a lower bound on the limit.
inline double mopn_isotropic_lower_bound(int k, const SchattenIndex& p) {
  const double inv_p = p.is_infinite() ? 0.0 : 1.0 / p.p();
  const double s = std::sqrt(static_cast<double>(k));
  return std::pow(static_cast<double>(k), -2.0 + inv_p) * (s + 1.0) * (s + 1.0);
}

namespace detail {

/// (m_a a^p + m_b b^p)^(1/p) without under/overflow; max(a, b) for p = inf.
inline double two_level_norm(double a, double ma, double b, double mb, const SchattenIndex& p) {
  const double top = std::max(a, b);
  if (top <= 0.0) return 0.0;
  if (p.is_infinite()) return top;
  const double e = p.p();
  return top * std::pow(ma * std::pow(a / top, e) + mb * std::pow(b / top, e), 1.0 / e);
}

}  // namespace detail

/// Upper bound ((4/k)^p + (1/(k-1))^(p-1) [1 - 3/k + 2/sqrt k]^p)^(1/p) on the single-channel limit.
inline double single_channel_upper_bound(int k, const SchattenIndex& p) {
  if (k < 2) throw DomainError("single_channel_upper_bound: k must be at least 2");
  const double c = 1.0 - 3.0 / k + 2.0 / std::sqrt(static_cast<double>(k));
  return detail::two_level_norm(4.0 / k, 1.0, c / (k - 1), static_cast<double>(k - 1), p);
}

/// p-norm of (1/k^2) I + (1/k) |b_k><b_k|: ((1/k + 1/k^2)^p + (k^2-1) k^(-2p))^(1/p).
inline double bell_pair_lower_bound(int k, const SchattenIndex& p) {
  if (k < 2) throw DomainError("bell_pair_lower_bound: k must be at least 2");
  const double kk = static_cast<double>(k);
  return detail::two_level_norm(1.0 / kk + 1.0 / (kk * kk), 1.0, 1.0 / (kk * kk), kk * kk - 1.0, p);
}

/// Single-channel MOE lower bound log k - 9k/(sqrt k - 1)^4.
inline double moe_single_lower_bound(int k) {
  const double s = std::sqrt(static_cast<double>(k)) - 1.0;
  return std::log(static_cast<double>(k)) - 9.0 * k / (s * s * s * s);
}

/// Entropy ceiling 2 log k - (log k)/k + 2/k of the conjugate pair on the Bell state.
inline double moe_pair_ceiling(int k) {
  const double lk = std::log(static_cast<double>(k));
  return 2.0 * lk - lk / k + 2.0 / k;
}

/// 3 / (k + 1 - 2 sqrt k): limit bound on ||Psi^c(|x><x|) - I/k||_2.
inline double two_norm_bound(int k) { return 3.0 / (k + 1.0 - 2.0 * std::sqrt(static_cast<double>(k))); }

/// ((log k - 2) - 18 k^2/(sqrt k - 1)^4) / k.
inline double moe_gap_value(double k) {
  const double s = std::sqrt(k) - 1.0;
  const double s2 = s * s;
  return ((std::log(k) - 2.0) - 18.0 * k * k / (s2 * s2)) / k;
}

struct ViolationReport {
  enum class Form { mopn, moe };
  Form form = Form::mopn;
  int k = 0;
  std::optional<SchattenIndex> p;
  /// MOpN: single-channel upper bound. MOE: per-channel entropy lower bound.
  double single_upper = 0.0;
  /// MOpN: Bell-pair lower bound. MOE: pair entropy ceiling.
  double pair_lower = 0.0;
  bool violated = false;
  /// MOpN: pair_lower - single_upper^2. MOE: 2 single_upper - pair_lower.
  double margin = 0.0;
  /// MOpN only: k^(2p) pair_lower^p and k^(2p) single_upper^(2p) (k^2-scaled at p = inf).
  double scaled_pair = 0.0;
  double scaled_single = 0.0;
};

inline ViolationReport multiplicativity_verdict(int k, const SchattenIndex& p) {
  if (k < 2) throw DomainError("multiplicativity_verdict: k must be at least 2");
  ViolationReport r;
  r.form = ViolationReport::Form::mopn;
  r.k = k;
  r.p = p;
  const double kk = static_cast<double>(k);
  if (p.is_infinite()) {
    r.single_upper = 4.0 / kk;
    r.pair_lower = 1.0 / kk + 1.0 / (kk * kk);
    r.scaled_pair = kk + 1.0;  // k^2 (1/k + 1/k^2)
    r.scaled_single = 16.0;    // k^2 (4/k)^2
    r.violated = static_cast<std::int64_t>(k) + 1 > 16;
  } else {
    const double e = p.p();
    r.single_upper = single_channel_upper_bound(k, p);
    r.pair_lower = bell_pair_lower_bound(k, p);
    const double c = 1.0 - 3.0 / kk + 2.0 / std::sqrt(kk);
    r.scaled_pair = std::pow(kk + 1.0, e) + kk * kk - 1.0;
    const double root = std::pow(4.0, e) + kk * std::pow(kk / (kk - 1.0), e - 1.0) * std::pow(c, e);
    r.scaled_single = root * root;
    r.violated = std::isfinite(r.scaled_pair) && std::isfinite(r.scaled_single)
                     ? r.scaled_pair > r.scaled_single
                     : r.pair_lower > r.single_upper * r.single_upper;
  }
  r.margin = r.pair_lower - r.single_upper * r.single_upper;
  return r;
}

/// gap = 2 (log k - 9k/(sqrt k - 1)^4) - (2 log k - (log k)/k + 2/k), evaluated as
/// ((log k - 2) - 18 k^2/(sqrt k - 1)^4) / k.
inline ViolationReport moe_gap(int k) {
  if (k < 2) throw DomainError("moe_gap: k must be at least 2");
  ViolationReport r;
  r.form = ViolationReport::Form::moe;
  r.k = k;
  r.single_upper = moe_single_lower_bound(k);
  r.pair_lower = moe_pair_ceiling(k);
  r.margin = moe_gap_value(static_cast<double>(k));
  r.violated = r.margin > 0.0;
  return r;
}

/// Outcome of a k-scan of a verdict.
struct ViolationScan {
  std::optional<std::int64_t> first_violating;
  std::optional<std::int64_t> last_non_violating;
  bool violated_through_end = false;  ///< every k from first_violating to k_max violated
  std::int64_t k_min = 0;
  std::int64_t k_max = 0;
};

namespace detail {

template <class Pred>
ViolationScan scan_k(std::int64_t k_min, std::int64_t k_max, Pred&& violated) {
  if (k_min < 2 || k_max < k_min) throw DomainError("scan: need 2 <= k_min <= k_max");
  ViolationScan out;
  out.k_min = k_min;
  out.k_max = k_max;
  for (std::int64_t k = k_min; k <= k_max; ++k) {
    if (violated(k)) {
      if (!out.first_violating) out.first_violating = k;
    } else {
      out.last_non_violating = k;
    }
  }
  out.violated_through_end =
      out.first_violating && (!out.last_non_violating || *out.last_non_violating < *out.first_violating);
  return out;
}

}  // namespace detail

/// Scans multiplicativity_verdict over k_min..k_max.
inline ViolationScan scan_multiplicativity(const SchattenIndex& p, std::int64_t k_min, std::int64_t k_max) {
  if (k_max > std::numeric_limits<int>::max()) throw DomainError("scan_multiplicativity: k_max too large");
  return detail::scan_k(k_min, k_max, [&](std::int64_t k) {
    return multiplicativity_verdict(static_cast<int>(k), p).violated;
  });
}

/// Scans moe_gap over k_min..k_max; works directly on the gap so large ranges are cheap.
inline ViolationScan scan_moe_gap(std::int64_t k_min, std::int64_t k_max) {
  return detail::scan_k(k_min, k_max, [](std::int64_t k) { return moe_gap_value(static_cast<double>(k)) > 0.0; });
}

/// log k - k ||rho - I/k||_2^2.
inline double quadratic_entropy_bound(const CMat& rho) {
  require_square(rho, "quadratic_entropy_bound");
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > tol::trace_error) throw DomainError("quadratic_entropy_bound: trace must be 1");
  const auto k = rho.rows();
  const CMat centred = rho - CMat::Identity(k, k) / static_cast<double>(k);
  return std::log(static_cast<double>(k)) - static_cast<double>(k) * centred.squaredNorm();
}

/// One grid point of the small-p inequality checks.
struct AppendixDPoint {
  double p = 0.0;
  double k = 0.0;
  double g = 0.0;                 ///< 4 p k^(3/2) - (1+k)^p + 1
  double additivity_bracket = 0.0;  ///< k^2 (1 + k^(-1/2))^(4p) - (k+1)^p - k^2 + 1
  double additivity_difference = 0.0;  ///< k^(-2p) times the bracket
  double haar_contrast = 0.0;     ///< k^(-2p) [k^2 - k^p - k^2 + k]
  bool g_positive = false;
  bool additivity_positive = false;
  bool haar_negative = false;     ///< required for k >= 2; zero at k = 1
};

struct AppendixDReport {
  std::vector<AppendixDPoint> points;
  bool all_g_positive = true;
  bool all_additivity_positive = true;
  bool all_haar_negative = true;  ///< over k >= 2
  double min_g = std::numeric_limits<double>::infinity();
  double min_additivity_bracket = std::numeric_limits<double>::infinity();
  double max_haar_contrast = -std::numeric_limits<double>::infinity();
};

inline AppendixDPoint appendix_d_point(double p, double k) {
  if (!(p > 1.0 && p <= 1.5)) throw DomainError("appendix_d_checks: p must lie in (1, 1.5]");
  if (!(k >= 1.0)) throw DomainError("appendix_d_checks: k must be at least 1");
  AppendixDPoint pt;
  pt.p = p;
  pt.k = k;
  pt.g = 4.0 * p * std::pow(k, 1.5) - std::pow(1.0 + k, p) + 1.0;
  const double grow = k * k * std::expm1(4.0 * p * std::log1p(1.0 / std::sqrt(k)));
  pt.additivity_bracket = grow - std::expm1(p * std::log1p(k));
  pt.additivity_difference = std::pow(k, -2.0 * p) * pt.additivity_bracket;
  pt.haar_contrast = std::pow(k, -2.0 * p) * (k * k - std::pow(k, p) - k * k + k);
  pt.g_positive = pt.g > 0.0;
  pt.additivity_positive = pt.additivity_bracket > 0.0;
  pt.haar_negative = pt.haar_contrast < 0.0;
  return pt;
}

inline AppendixDReport appendix_d_checks(const std::vector<double>& p_grid, const std::vector<double>& k_grid) {
  AppendixDReport rep;
  for (double p : p_grid) {
    for (double k : k_grid) {
      AppendixDPoint pt = appendix_d_point(p, k);
      rep.all_g_positive = rep.all_g_positive && pt.g_positive;
      rep.all_additivity_positive = rep.all_additivity_positive && pt.additivity_positive;
      if (k >= 2.0) {
        rep.all_haar_negative = rep.all_haar_negative && pt.haar_negative;
        rep.max_haar_contrast = std::max(rep.max_haar_contrast, pt.haar_contrast);
      }
      rep.min_g = std::min(rep.min_g, pt.g);
      rep.min_additivity_bracket = std::min(rep.min_additivity_bracket, pt.additivity_bracket);
      rep.points.push_back(pt);
    }
  }
  return rep;
}

}  // namespace freecp
