#pragma once

// Random CP maps Phi_n(rho) = (1/k) sum X_i rho X_i^*, their conjugates, the
// rectified channels Psi_n(rho) = Phi_n(R rho R), complementary maps and the
// Bell-pair output of Phi (x) conj(Phi) through the k^2 x k^2 trace formula.

#include <cmath>
#include <string>
#include <vector>

#include "freecp/ensembles.hpp"
#include "freecp/matrixkit.hpp"

namespace freecp {

struct ChannelKind {
  enum class Tag { raw, rectified };
  Tag tag = Tag::raw;
  bool conjugated = false;

  static ChannelKind raw(bool conjugated = false) { return {Tag::raw, conjugated}; }
  static ChannelKind rectified(bool conjugated = false) { return {Tag::rectified, conjugated}; }

  friend bool operator==(const ChannelKind&, const ChannelKind&) = default;
};

inline std::string to_string(const ChannelKind& kind) {
  std::string s = kind.tag == ChannelKind::Tag::raw ? "raw" : "rectified";
  return kind.conjugated ? s + "-conjugate" : s;
}

/// R = sqrt(k) (sum X_i^* X_i)^(-1/2) and the bracket it was checked against.
struct Rectifier {
  CMat matrix;
  double epsilon = 0.0;
  double lower_edge = 0.0;  ///< sqrt(k(1-eps)) / (sqrt k + 1)
  double upper_edge = 0.0;  ///< sqrt(k(1+eps)) / (sqrt k - 1)
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool bracket_holds = false;
  SpectralProfile frame_spectrum;  ///< eigenvalues of sum X_i^* X_i
};

inline constexpr double kFrameFloor = 1e-10;

inline CMat frame_operator(const KrausFamily& fam) {
  CMat w = CMat::Zero(fam.n, fam.n);
  for (const auto& x : fam.ops) w.noalias() += x.adjoint() * x;
  return 0.5 * (w + w.adjoint());
}

inline Rectifier build_rectifier(const KrausFamily& fam, double epsilon) {
  fam.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("build_rectifier: epsilon must lie in (0, 1)");
  const Eigensystem es = eig_herm(frame_operator(fam));
  const double wmin = es.spectrum.min();
  if (wmin < kFrameFloor) throw SingularFrameError(wmin, fam.n);

  const double sk = std::sqrt(static_cast<double>(fam.k));
  Rectifier r;
  r.epsilon = epsilon;
  r.lower_edge = std::sqrt(fam.k * (1.0 - epsilon)) / (sk + 1.0);
  r.upper_edge = std::sqrt(fam.k * (1.0 + epsilon)) / (sk - 1.0);
  r.matrix = spectral_apply(es, [sk](double w) { return sk / std::sqrt(w); });
  r.matrix = 0.5 * (r.matrix + r.matrix.adjoint());
  r.min_eigenvalue = sk / std::sqrt(es.spectrum.max());
  r.max_eigenvalue = sk / std::sqrt(wmin);
  r.bracket_holds = r.min_eigenvalue >= r.lower_edge && r.max_eigenvalue <= r.upper_edge;
  r.frame_spectrum = es.spectrum;
  return r;
}

/// A CP map in Kraus form with weight 1/k: rho -> (1/k) sum K_i rho K_i^*, where
/// K_i is X_i, conj(X_i), X_i R or conj(X_i R) depending on the kind.
class Channel {
 public:
  Channel(const KrausFamily& fam, ChannelKind kind, const Rectifier* rectifier = nullptr)
      : n_(fam.n), k_(fam.k), kind_(kind) {
    fam.validate();
    if (kind.tag == ChannelKind::Tag::rectified) {
      if (rectifier == nullptr) throw DomainError("rectified channel requires a rectifier");
      if (rectifier->matrix.rows() != fam.n) throw DimensionError("rectifier dimension differs from family");
    }
    kraus_.reserve(fam.ops.size());
    for (const auto& x : fam.ops) {
      CMat op = kind.tag == ChannelKind::Tag::rectified ? CMat(x * rectifier->matrix) : x;
      if (kind.conjugated) op = op.conjugate().eval();
      kraus_.push_back(std::move(op));
    }
  }

  Eigen::Index n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  ChannelKind kind() const noexcept { return kind_; }
  double scale() const noexcept { return 1.0 / k_; }
  /// Effective Kraus operators, without the 1/sqrt(k) weight.
  const std::vector<CMat>& kraus() const noexcept { return kraus_; }

  CMat apply(const CMat& rho) const {
    check_input(rho);
    CMat out = CMat::Zero(n_, n_);
    for (const auto& op : kraus_) out.noalias() += op * rho * op.adjoint();
    out *= scale();
    return 0.5 * (out + out.adjoint());
  }

  CMat apply_pure(const CVec& x) const {
    check_vector(x);
    CMat out = CMat::Zero(n_, n_);
    for (const auto& op : kraus_) {
      const CVec y = op * x;
      out.noalias() += y * y.adjoint();
    }
    return scale() * out;
  }

  /// (1/k) Tr[K_i rho K_j^*] |i><j|.
  CMat complementary(const CMat& rho) const {
    check_input(rho);
    std::vector<CMat> left;
    left.reserve(kraus_.size());
    for (const auto& op : kraus_) left.push_back(op * rho);
    CMat out(k_, k_);
    for (int i = 0; i < k_; ++i) {
      for (int j = 0; j < k_; ++j) out(i, j) = (left[i].cwiseProduct(kraus_[j].conjugate())).sum();
    }
    out *= scale();
    return 0.5 * (out + out.adjoint());
  }

  CMat complementary_pure(const CVec& x) const {
    check_vector(x);
    CMat y(n_, k_);
    for (int i = 0; i < k_; ++i) y.col(i) = kraus_[i] * x;
    // entry (i, j) = <K_j x, K_i x>
    CMat out = (y.adjoint() * y).transpose();
    out *= scale();
    return 0.5 * (out + out.adjoint());
  }

  /// Tr of the output on |x><x|: (1/k) sum ||K_i x||^2.
  double trace_pure(const CVec& x) const {
    check_vector(x);
    double acc = 0.0;
    for (const auto& op : kraus_) acc += (op * x).squaredNorm();
    return scale() * acc;
  }

  /// v -> (1/k) sum_ij a_ij K_i^* K_j v, so that <x| . |x> = Tr[Phi^c(|x><x|) A].
  CVec dual_form_apply(const CMat& a, const CVec& v) const {
    CMat y(n_, k_);
    for (int j = 0; j < k_; ++j) y.col(j) = kraus_[j] * v;
    const CMat z = y * a.transpose();  // z_i = sum_j a_ij y_j
    CVec out = CVec::Zero(n_);
    for (int i = 0; i < k_; ++i) out.noalias() += kraus_[i].adjoint() * z.col(i);
    return scale() * out;
  }

  /// The same operator for Hermitian A, factored as (1/k) sum_r s_r L_r^* L_r with
  /// L_r = sum_j conj(u_rj) K_j over the nonzero eigenpairs (s_r, u_r) of A.
  /// Cheaper than dual_form_apply when A has rank below k.
  class DualForm {
   public:
    CVec operator()(const CVec& v) const {
      CVec out = CVec::Zero(v.size());
      for (std::size_t r = 0; r < factors_.size(); ++r) out.noalias() += weights_[r] * (factors_[r].adjoint() * (factors_[r] * v));
      return out;
    }
    std::size_t rank() const noexcept { return factors_.size(); }

   private:
    friend class Channel;
    std::vector<CMat> factors_;
    std::vector<double> weights_;
  };

  DualForm dual_form(const CMat& a) const {
    if (a.rows() != k_ || a.cols() != k_) throw DimensionError("dual_form: coefficient matrix must be k x k");
    const Eigensystem es = eig_herm(a);
    const double top = es.spectrum.values.cwiseAbs().maxCoeff();
    DualForm d;
    for (Eigen::Index r = 0; r < es.spectrum.size(); ++r) {
      const double s = es.spectrum.values(r);
      if (std::abs(s) <= 1e-14 * top) continue;
      CMat l = CMat::Zero(n_, n_);
      for (int j = 0; j < k_; ++j) l += std::conj(es.vectors(j, r)) * kraus_[j];
      d.factors_.push_back(std::move(l));
      d.weights_.push_back(s * scale());
    }
    return d;
  }

 private:
  void check_input(const CMat& rho) const {
    if (rho.rows() != n_ || rho.cols() != n_) {
      throw DimensionError("channel input must be " + std::to_string(n_) + "x" + std::to_string(n_));
    }
  }
  void check_vector(const CVec& x) const {
    if (x.size() != n_) throw DimensionError("channel input vector must have length " + std::to_string(n_));
  }

  Eigen::Index n_;
  int k_;
  ChannelKind kind_;
  std::vector<CMat> kraus_;
};

inline CMat apply_cp(const Channel& ch, const CMat& rho) { return ch.apply(rho); }
inline CMat apply_complementary(const Channel& ch, const CMat& rho) { return ch.complementary(rho); }

/// Complementary output of Phi (x) conj(Phi) on the n-dimensional Bell state:
/// entry ((i,u),(j,v)) = (1/n) Tr[K_i K_u^* K_v K_j^*] with K_i the effective
/// Kraus operators scaled by 1/sqrt(k). Index (i, u) is stored at i*k + u.
/// Only the k^2 products K_i K_u^* are formed.
inline CMat pair_output_on_bell(const Channel& ch) {
  const Eigen::Index n = ch.n();
  const int k = ch.k();
  const auto& ops = ch.kraus();
  CMat stacked(n * n, static_cast<Eigen::Index>(k) * k);
  CMat product(n, n);
  for (int i = 0; i < k; ++i) {
    for (int u = i; u < k; ++u) {
      product.noalias() = ops[i] * ops[u].adjoint();
      stacked.col(i * k + u) = Eigen::Map<const CVec>(product.data(), n * n);
      if (u != i) {
        const CMat adj = product.adjoint();
        stacked.col(u * k + i) = Eigen::Map<const CVec>(adj.data(), n * n);
      }
    }
  }
  // Tr[P_a P_b^*]-type Gram matrix: M_ab = <vec P_b, vec P_a>.
  CMat out = stacked.transpose() * stacked.conjugate();
  out /= static_cast<double>(k) * k * static_cast<double>(n);
  return 0.5 * (out + out.adjoint());
}

/// <b_k| M |b_k> for a k^2 x k^2 pair output M.
inline double bell_overlap(const CMat& pair_out) {
  require_hermitian(pair_out, "bell_overlap", 1e-9);
  const auto k = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(pair_out.rows()))));
  if (k * k != pair_out.rows()) throw DimensionError("bell_overlap: dimension is not a perfect square");
  const CVec b = bell_state(k);
  return b.dot(pair_out * b).real();
}

/// (1/k^2) I + (1/k) |b_k><b_k|, the large-n limit of the raw pair output.
inline CMat bell_pair_limit_matrix(int k) {
  const Eigen::Index d = static_cast<Eigen::Index>(k) * k;
  const CVec b = bell_state(k);
  return CMat::Identity(d, d) / static_cast<double>(d) + projector(b) / static_cast<double>(k);
}

}  // namespace freecp
