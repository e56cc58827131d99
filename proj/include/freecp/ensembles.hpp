#pragma once

// Seeded GUE and Ginibre sampling at variance-1/n normalisation.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "freecp/matrixkit.hpp"
#include "freecp/random.hpp"

namespace freecp {

enum class EnsembleFlavor { gue, ginibre };

inline std::string to_string(EnsembleFlavor f) { return f == EnsembleFlavor::gue ? "gue" : "ge"; }

inline EnsembleFlavor parse_flavor(std::string_view s) {
  if (s == "gue" || s == "GUE") return EnsembleFlavor::gue;
  if (s == "ge" || s == "GE" || s == "ginibre" || s == "GINIBRE") return EnsembleFlavor::ginibre;
  throw DomainError("unknown ensemble flavor '" + std::string(s) + "' (expected gue or ge)");
}

/// Hermitian n x n: diagonal N(0, 1/n), off-diagonal real and imaginary parts
/// N(0, 1/(2n)). Draw order: row-major over the upper triangle, (re, im) per
/// off-diagonal entry.
inline CMat sample_gue(Eigen::Index n, SeedSpec seed) {
  if (n < 1) throw DomainError("sample_gue: n must be positive");
  RandomStream rng(seed);
  const double sd_diag = 1.0 / std::sqrt(static_cast<double>(n));
  const double sd_off = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  CMat s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, i) = Complex(sd_diag * rng.next_normal(), 0.0);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double re = sd_off * rng.next_normal();
      const double im = sd_off * rng.next_normal();
      s(i, j) = Complex(re, im);
      s(j, i) = Complex(re, -im);
    }
  }
  return s;
}

/// n x n with i.i.d. entries whose real and imaginary parts are N(0, 1/(2n)).
/// Draw order: row-major, (re, im) per entry.
inline CMat sample_ginibre(Eigen::Index n, SeedSpec seed) {
  if (n < 1) throw DomainError("sample_ginibre: n must be positive");
  RandomStream rng(seed);
  const double sd = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  CMat c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = sd * rng.next_normal();
      const double im = sd * rng.next_normal();
      c(i, j) = Complex(re, im);
    }
  }
  return c;
}

inline CMat sample_matrix(EnsembleFlavor f, Eigen::Index n, SeedSpec seed) {
  return f == EnsembleFlavor::gue ? sample_gue(n, seed) : sample_ginibre(n, seed);
}

/// The k Kraus generators X_1..X_k of Phi_n(rho) = (1/k) sum X_i rho X_i^*.
/// Stored unscaled; the 1/k weight belongs to the channel.
struct KrausFamily {
  Eigen::Index n = 0;
  int k = 0;
  std::vector<CMat> ops;
  EnsembleFlavor flavor = EnsembleFlavor::gue;

  double scale() const { return 1.0 / static_cast<double>(k); }

  /// Validates the invariants (k >= 2, every op n x n and finite).
  void validate() const {
    if (k < 2) throw DomainError("KrausFamily: k must be at least 2, got " + std::to_string(k));
    if (static_cast<int>(ops.size()) != k) throw DimensionError("KrausFamily: expected k operators");
    for (const auto& x : ops) {
      if (x.rows() != n || x.cols() != n) throw DimensionError("KrausFamily: operator is not n x n");
      require_finite(x, "KrausFamily");
    }
  }

  static KrausFamily from_ops(std::vector<CMat> ops, EnsembleFlavor flavor = EnsembleFlavor::gue) {
    KrausFamily fam;
    fam.k = static_cast<int>(ops.size());
    fam.n = ops.empty() ? 0 : ops.front().rows();
    fam.ops = std::move(ops);
    fam.flavor = flavor;
    fam.validate();
    return fam;
  }
};

/// k independent generators on streams 0..k-1 of `master_seed`.
inline KrausFamily sample_kraus_family(Eigen::Index n, int k, EnsembleFlavor flavor, std::uint64_t master_seed) {
  if (n < 1) throw DomainError("sample_kraus_family: n must be positive");
  if (k < 2) throw DomainError("sample_kraus_family: k must be at least 2, got " + std::to_string(k));
  std::vector<CMat> ops;
  ops.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) ops.push_back(sample_matrix(flavor, n, SeedSpec{master_seed, static_cast<std::uint64_t>(i)}));
  return KrausFamily::from_ops(std::move(ops), flavor);
}

/// Uniformly distributed unit vector in C^n (normalised complex Gaussian).
inline CVec random_unit_vector(Eigen::Index n, SeedSpec seed) {
  RandomStream rng(seed);
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = rng.next_normal();
    const double im = rng.next_normal();
    v(i) = Complex(re, im);
  }
  return v / v.norm();
}

/// G G^* for a k x rank complex Gaussian G: PSD of the requested rank a.s.
inline CMat random_psd(Eigen::Index k, Eigen::Index rank, SeedSpec seed) {
  RandomStream rng(seed);
  CMat g(k, rank);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < rank; ++j) {
      const double re = rng.next_normal();
      const double im = rng.next_normal();
      g(i, j) = Complex(re, im);
    }
  }
  return g * g.adjoint();
}

/// Random trace-one PSD matrix (density matrix) of full rank with probability one.
inline CMat random_state(Eigen::Index k, SeedSpec seed, Eigen::Index rank = -1) {
  CMat a = random_psd(k, rank < 0 ? k : rank, seed);
  return a / a.trace().real();
}

}  // namespace freecp
