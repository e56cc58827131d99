#pragma once

// Dense complex matrix substrate: Hermitian eigendecomposition, Schatten
// norms, von Neumann entropy, partial traces, Bell states and Hoelder duality
// for PSD matrices. Everything here is a pure function of its arguments.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "freecp/errors.hpp"

namespace freecp {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Tolerances shared by the PSD-facing operations.
namespace tol {
inline constexpr double hermitian = 1e-12;   ///< max-entry defect of m - m^*
inline constexpr double psd_error = 1e-8;    ///< eigenvalues below -psd_error are rejected
inline constexpr double trace_error = 1e-6;  ///< trace deviation rejected by entropy
}  // namespace tol

/// Schatten exponent p in (1, inf]. Infinity is a distinct state, not a large float.
class SchattenIndex {
 public:
  static SchattenIndex finite(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) {
      throw DomainError("Schatten index must satisfy 1 < p < inf, got " + std::to_string(p));
    }
    return SchattenIndex(p);
  }
  static SchattenIndex infinity() { return SchattenIndex(); }

  /// Accepts a decimal literal or "inf" / "infinity".
  static SchattenIndex parse(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "inf" || s == "infinity" || s == "+inf") return infinity();
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(s, &used);
    } catch (const std::exception&) {
      throw DomainError("cannot parse Schatten index '" + std::string(text) + "'");
    }
    if (used != s.size()) throw DomainError("cannot parse Schatten index '" + std::string(text) + "'");
    return finite(p);
  }

  bool is_infinite() const noexcept { return !p_.has_value(); }
  /// Finite exponent; throws for p = inf.
  double p() const {
    if (!p_) throw DomainError("p = inf has no finite value");
    return *p_;
  }
  /// Hoelder conjugate q with 1/p + 1/q = 1; q = 1 for p = inf.
  double conjugate() const noexcept { return p_ ? *p_ / (*p_ - 1.0) : 1.0; }

  std::string to_string() const {
    if (!p_) return "inf";
    std::string s = std::to_string(*p_);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  friend bool operator==(const SchattenIndex& a, const SchattenIndex& b) { return a.p_ == b.p_; }

 private:
  SchattenIndex() = default;
  explicit SchattenIndex(double p) : p_(p) {}
  std::optional<double> p_;
};

/// Real spectrum sorted non-increasing.
struct SpectralProfile {
  RVec values;

  Eigen::Index size() const noexcept { return values.size(); }
  double max() const { return values.size() ? values(0) : 0.0; }
  double min() const { return values.size() ? values(values.size() - 1) : 0.0; }

  static SpectralProfile from_values(RVec v) {
    std::sort(v.data(), v.data() + v.size(), std::greater<>());
    return SpectralProfile{std::move(v)};
  }
};

/// m = U diag(lambda) U^*, columns of U ordered like the spectrum.
struct Eigensystem {
  SpectralProfile spectrum;
  CMat vectors;
};

inline void require_square(const CMat& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline void require_finite(const CMat& m, const char* what) {
  if (!m.allFinite()) throw DomainError(std::string(what) + ": non-finite entry");
}

/// Max-entry norm of m - m^*.
inline double hermiticity_defect(const CMat& m) {
  return m.rows() == m.cols() ? (m - m.adjoint()).cwiseAbs().maxCoeff() : std::numeric_limits<double>::infinity();
}

inline void require_hermitian(const CMat& m, const char* what, double tolerance = tol::hermitian) {
  require_square(m, what);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double defect = hermiticity_defect(m);
  if (defect > tolerance * scale) {
    throw DomainError(std::string(what) + ": matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  }
}

inline Eigensystem eig_herm(const CMat& m) {
  require_hermitian(m, "eig_herm");
  // Eigen only reads the lower triangle; symmetrise so both halves count.
  const CMat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> solver(h);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("Hermitian eigensolver did not converge", h.rows());
  }
  Eigensystem out;
  out.spectrum.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

inline SpectralProfile eigenvalues_herm(const CMat& m) {
  require_hermitian(m, "eigenvalues_herm");
  const CMat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("Hermitian eigensolver did not converge", h.rows());
  }
  return SpectralProfile{solver.eigenvalues().reverse()};
}

/// Clamps values in [-psd_error, 0) to zero; throws below that.
inline SpectralProfile clamp_psd(SpectralProfile s, const char* what) {
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    double& v = s.values(i);
    if (v < -tol::psd_error) throw NotPsdError(what, v);
    if (v < 0.0) v = 0.0;
  }
  return s;
}

inline SpectralProfile psd_spectrum(const CMat& m, const char* what = "psd_spectrum") {
  return clamp_psd(eigenvalues_herm(m), what);
}

/// (sum lambda_i^p)^(1/p) of a non-negative profile; max for p = inf.
inline double schatten_norm(const SpectralProfile& s, const SchattenIndex& p) {
  if (s.size() == 0) return 0.0;
  const double top = s.values.cwiseAbs().maxCoeff();
  if (p.is_infinite() || top == 0.0) return top;
  const double e = p.p();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(std::abs(s.values(i)) / top, e);
  return top * std::pow(acc, 1.0 / e);
}

inline double schatten_norm(const CMat& m, const SchattenIndex& p) {
  return schatten_norm(psd_spectrum(m, "schatten_norm"), p);
}

/// Vector p-norm for an arbitrary real exponent p >= 1 (used for q-normalisation).
inline double lp_norm(const RVec& v, double p) {
  if (v.size() == 0) return 0.0;
  const double top = v.cwiseAbs().maxCoeff();
  if (top == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v(i)) / top, p);
  return top * std::pow(acc, 1.0 / p);
}

/// -sum lambda log lambda (nats), with 0 log 0 = 0.
inline double von_neumann_entropy(const SpectralProfile& s) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double v = s.values(i);
    if (v > 0.0) acc -= v * std::log(v);
  }
  return acc;
}

inline double von_neumann_entropy(const CMat& rho) {
  require_hermitian(rho, "von_neumann_entropy");
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > tol::trace_error) {
    throw DomainError("von_neumann_entropy: trace " + std::to_string(tr) + " is not 1");
  }
  return von_neumann_entropy(psd_spectrum(rho, "von_neumann_entropy"));
}

/// (1/sqrt n) sum_i e_i (x) e_i, index (i, j) stored at i*n + j.
inline CVec bell_state(Eigen::Index n) {
  if (n < 1) throw DomainError("bell_state: n must be positive");
  CVec b = CVec::Zero(n * n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index i = 0; i < n; ++i) b(i * n + i) = amp;
  return b;
}

inline CMat projector(const CVec& x) { return x * x.adjoint(); }

/// U f(Lambda) U^*.
template <class Fn>
CMat spectral_apply(const Eigensystem& es, Fn&& fn) {
  RVec mapped(es.spectrum.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped(i) = fn(es.spectrum.values(i));
  return es.vectors * mapped.asDiagonal() * es.vectors.adjoint();
}

/// The PSD B with ||B||_q = 1 maximising Tr[AB]; shares eigenvectors with A and
/// satisfies lambda_i(B)^q = lambda_i(A)^p / ||A||_p^p.
inline CMat holder_dual_maximizer(const CMat& a, const SchattenIndex& p) {
  if (p.is_infinite()) throw DomainError("holder_dual_maximizer: p must be finite");
  const Eigensystem es = eig_herm(a);
  const SpectralProfile s = clamp_psd(es.spectrum, "holder_dual_maximizer");
  const double top = s.max();
  if (top <= 0.0) throw DomainError("holder_dual_maximizer: zero matrix has no dual maximizer");
  const double e = p.p();
  const double norm_ratio = schatten_norm(s, p) / top;  // ||A||_p / lambda_max
  return spectral_apply(Eigensystem{s, es.vectors}, [&](double v) {
    return std::pow(v / top, e - 1.0) / std::pow(norm_ratio, e - 1.0);
  });
}

/// Projector onto a top eigenvector: a maximiser of Tr[AB] over ||B||_1 = 1, B >= 0.
inline CMat top_eigenprojector(const CMat& a) {
  const Eigensystem es = eig_herm(a);
  return projector(es.vectors.col(0));
}

/// Self-test of ||d(A)||_p <= ||lambda(A)||_p for p in {1.5, 2, 3, inf}.
inline bool majorization_check(const CMat& a) {
  require_hermitian(a, "majorization_check");
  const SpectralProfile eig = eigenvalues_herm(a);
  const SpectralProfile diag = SpectralProfile::from_values(a.diagonal().real());
  for (const auto& p : {SchattenIndex::finite(1.5), SchattenIndex::finite(2.0), SchattenIndex::finite(3.0),
                        SchattenIndex::infinity()}) {
    if (schatten_norm(diag, p) > schatten_norm(eig, p) + 1e-10) return false;
  }
  return true;
}

enum class Subsystem { first, second };

/// Partial trace of an operator on C^d1 (x) C^d2 (index i*d2 + j) over one factor.
inline CMat partial_trace(const CMat& m, Eigen::Index d1, Eigen::Index d2, Subsystem traced) {
  if (m.rows() != d1 * d2 || m.cols() != d1 * d2) throw DimensionError("partial_trace: size mismatch");
  if (traced == Subsystem::first) {
    CMat out = CMat::Zero(d2, d2);
    for (Eigen::Index i = 0; i < d1; ++i) out += m.block(i * d2, i * d2, d2, d2);
    return out;
  }
  CMat out(d1, d1);
  for (Eigen::Index a = 0; a < d1; ++a) {
    for (Eigen::Index b = 0; b < d1; ++b) out(a, b) = m.block(a * d2, b * d2, d2, d2).trace();
  }
  return out;
}

/// Frobenius distance.
inline double frobenius_distance(const CMat& a, const CMat& b) { return (a - b).norm(); }

}  // namespace freecp
