#pragma once

// Brute-force free probability over non-crossing partitions: NC(n) and NC_2(n)
// enumeration, moments of words in semicircular and circular systems, moments
// of quadratic forms s_A and c_A, and moment-cumulant inversion.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "freecp/errors.hpp"
#include "freecp/matrixkit.hpp"

namespace freecp::nc {

inline constexpr int kMaxPartitionSize = 12;
inline constexpr int kMaxWordLength = 16;
inline constexpr int kMaxQuadraticPower = 4;
inline constexpr int kMaxQuadraticDim = 4;
inline constexpr int kMaxMoments = 8;

/// Partition of {0, ..., n-1}; blocks sorted internally and by their minimum.
struct SetPartition {
  int n = 0;
  std::vector<std::vector<int>> blocks;

  /// Canonical form from a block label per element.
  static SetPartition from_labels(const std::vector<int>& label) {
    SetPartition p;
    p.n = static_cast<int>(label.size());
    std::map<int, std::size_t> slot;
    for (int i = 0; i < p.n; ++i) {
      auto [it, fresh] = slot.try_emplace(label[i], p.blocks.size());
      if (fresh) p.blocks.emplace_back();
      p.blocks[it->second].push_back(i);
    }
    return p;
  }

  static SetPartition from_blocks(int n, std::vector<std::vector<int>> blocks) {
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (blocks[b].empty()) throw DomainError("SetPartition: empty block");
      for (int e : blocks[b]) {
        if (e < 0 || e >= n) throw DomainError("SetPartition: element out of range");
        if (label[e] != -1) throw DomainError("SetPartition: blocks are not disjoint");
        label[e] = static_cast<int>(b);
      }
    }
    if (std::find(label.begin(), label.end(), -1) != label.end()) throw DomainError("SetPartition: blocks do not cover");
    return from_labels(label);
  }

  std::vector<int> labels() const {
    std::vector<int> label(static_cast<std::size_t>(n));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (int e : blocks[b]) label[e] = static_cast<int>(b);
    }
    return label;
  }

  /// True iff some a < c < b < d has a, b in one block and c, d in another.
  bool is_crossing() const {
    const auto label = labels();
    for (int a = 0; a < n; ++a) {
      for (int c = a + 1; c < n; ++c) {
        if (label[c] == label[a]) continue;
        for (int b = c + 1; b < n; ++b) {
          if (label[b] != label[a]) continue;
          for (int d = b + 1; d < n; ++d) {
            if (label[d] == label[c]) return true;
          }
        }
      }
    }
    return false;
  }

  bool is_pairing() const {
    return std::all_of(blocks.begin(), blocks.end(), [](const auto& b) { return b.size() == 2; });
  }

  friend bool operator==(const SetPartition&, const SetPartition&) = default;
};

namespace detail {

inline void grow_nc(int n, std::vector<int>& label, std::vector<int>& last, std::vector<int>& first,
                    std::vector<SetPartition>& out) {
  const int i = static_cast<int>(label.size());
  if (i == n) {
    out.push_back(SetPartition::from_labels(label));
    return;
  }
  const int nblocks = static_cast<int>(last.size());
  for (int b = 0; b < nblocks; ++b) {
    // joining b pairs i with last[b]; any element strictly between them whose
    // block started before last[b] would cross
    bool ok = true;
    for (int c = last[b] + 1; c < i && ok; ++c) {
      if (label[c] != b && first[label[c]] < last[b]) ok = false;
    }
    if (!ok) continue;
    const int saved = last[b];
    label.push_back(b);
    last[b] = i;
    grow_nc(n, label, last, first, out);
    last[b] = saved;
    label.pop_back();
  }
  label.push_back(nblocks);
  last.push_back(i);
  first.push_back(i);
  grow_nc(n, label, last, first, out);
  first.pop_back();
  last.pop_back();
  label.pop_back();
}

inline void grow_nc2(std::vector<int>& positions, std::vector<int>& partner, std::vector<std::vector<int>>& acc) {
  if (positions.empty()) {
    acc.push_back(partner);
    return;
  }
  // the first open position pairs with one at even offset inside the range,
  // leaving both the inner and the outer stretch of even length
  const std::vector<int> pos = positions;
  for (std::size_t j = 1; j < pos.size(); j += 2) {
    partner[pos[0]] = pos[j];
    partner[pos[j]] = pos[0];
    std::vector<int> inner(pos.begin() + 1, pos.begin() + static_cast<std::ptrdiff_t>(j));
    std::vector<int> outer(pos.begin() + static_cast<std::ptrdiff_t>(j) + 1, pos.end());
    std::vector<std::vector<int>> inner_acc;
    grow_nc2(inner, partner, inner_acc);
    for (const auto& with_inner : inner_acc) {
      std::vector<int> copy = with_inner;
      grow_nc2(outer, copy, acc);
    }
    partner[pos[0]] = partner[pos[j]] = -1;
  }
  positions = pos;
}

}  // namespace detail

/// All of NC(n); |NC(n)| is the n-th Catalan number.
inline std::vector<SetPartition> enumerate_nc(int n) {
  if (n < 1) throw DomainError("enumerate_nc: n must be positive");
  if (n > kMaxPartitionSize) throw DomainError("enumerate_nc: n = " + std::to_string(n) + " exceeds the size guard 12");
  std::vector<SetPartition> out;
  std::vector<int> label, last, first;
  detail::grow_nc(n, label, last, first, out);
  return out;
}

/// Partner array of every non-crossing pairing of {0, ..., n-1}.
inline std::vector<std::vector<int>> enumerate_nc2_partners(int n) {
  if (n < 0 || n % 2 != 0) throw DomainError("enumerate_nc2: n must be even, got " + std::to_string(n));
  if (n > kMaxWordLength) throw DomainError("enumerate_nc2: n = " + std::to_string(n) + " exceeds the size guard 16");
  std::vector<int> positions(static_cast<std::size_t>(n));
  std::iota(positions.begin(), positions.end(), 0);
  std::vector<int> partner(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> acc;
  detail::grow_nc2(positions, partner, acc);
  return acc;
}

/// All of NC_2(n); |NC_2(2m)| is the m-th Catalan number.
inline std::vector<SetPartition> enumerate_nc2(int n) {
  std::vector<SetPartition> out;
  for (const auto& partner : enumerate_nc2_partners(n)) {
    std::vector<std::vector<int>> blocks;
    for (int i = 0; i < n; ++i) {
      if (partner[i] > i) blocks.push_back({i, partner[i]});
    }
    out.push_back(SetPartition::from_blocks(n, std::move(blocks)));
  }
  return out;
}

/// Cached partner arrays, shared by all moment computations.
inline const std::vector<std::vector<int>>& nc2_partners_cached(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<std::vector<int>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, enumerate_nc2_partners(n)).first;
  return it->second;
}

/// Every pair of a non-crossing pairing joins an odd and an even position.
inline bool pairs_odd_even(const SetPartition& p) {
  return std::all_of(p.blocks.begin(), p.blocks.end(), [](const auto& b) {
    return b.size() == 2 && (b[0] + b[1]) % 2 == 1;
  });
}

/// pi v sigma == 1_n, with sigma the consecutive interval partition of the given block sizes.
inline bool joins_to_one(const SetPartition& pi, const std::vector<int>& interval_sizes) {
  const int n = pi.n;
  if (std::accumulate(interval_sizes.begin(), interval_sizes.end(), 0) != n) {
    throw DimensionError("joins_to_one: interval sizes do not sum to n");
  }
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (const auto& b : pi.blocks) {
    for (std::size_t j = 1; j < b.size(); ++j) unite(b[0], b[j]);
  }
  int start = 0;
  for (int s : interval_sizes) {
    for (int j = 1; j < s; ++j) unite(start, start + j);
    start += s;
  }
  const int root = n > 0 ? find(0) : 0;
  for (int i = 1; i < n; ++i) {
    if (find(i) != root) return false;
  }
  return true;
}

enum class LetterKind { semicircular, circular };

/// s_i, c_i or c_i^*. Semicircular letters are self-adjoint, so the star is dropped.
struct Letter {
  int index = 0;
  bool starred = false;
  LetterKind kind = LetterKind::semicircular;

  Letter() = default;
  Letter(int idx, bool star, LetterKind kd) : index(idx), starred(kd == LetterKind::circular && star), kind(kd) {}

  static Letter s(int i) { return Letter(i, false, LetterKind::semicircular); }
  static Letter c(int i) { return Letter(i, false, LetterKind::circular); }
  static Letter c_star(int i) { return Letter(i, true, LetterKind::circular); }

  Letter adjoint() const { return Letter(index, !starred, kind); }

  friend auto operator<=>(const Letter&, const Letter&) = default;
};

using Word = std::vector<Letter>;

/// kappa_2[s_i, s_j] = delta_ij, kappa_2[c_i, c_j^*] = kappa_2[c_i^*, c_j] = delta_ij, all else 0.
inline int pair_covariance(const Letter& a, const Letter& b) {
  if (a.index != b.index || a.kind != b.kind) return 0;
  if (a.kind == LetterKind::semicircular) return 1;
  return a.starred != b.starred ? 1 : 0;
}

/// phi(word) = number of non-crossing pairings whose pairs all have covariance 1.
inline std::int64_t word_moment(const Word& w) {
  const int n = static_cast<int>(w.size());
  if (n > kMaxWordLength) throw DomainError("word_moment: length " + std::to_string(n) + " exceeds the guard 16");
  if (n % 2 != 0) return 0;
  if (n == 0) return 1;
  std::int64_t total = 0;
  for (const auto& partner : nc2_partners_cached(n)) {
    bool all = true;
    for (int i = 0; i < n && all; ++i) {
      if (partner[i] > i && pair_covariance(w[i], w[partner[i]]) == 0) all = false;
    }
    if (all) ++total;
  }
  return total;
}

/// kappa_r[w_1, ..., w_r] for products w_j of letters: sum over NC_2 pairings of the
/// concatenation that connect all r groups.
inline std::int64_t product_cumulant(const std::vector<Word>& groups) {
  Word flat;
  std::vector<int> sizes;
  for (const auto& g : groups) {
    flat.insert(flat.end(), g.begin(), g.end());
    sizes.push_back(static_cast<int>(g.size()));
  }
  const int n = static_cast<int>(flat.size());
  if (n > kMaxWordLength) throw DomainError("product_cumulant: total length exceeds the guard 16");
  if (n % 2 != 0) return 0;
  std::int64_t total = 0;
  for (const auto& pi : enumerate_nc2(n)) {
    bool all = true;
    for (const auto& b : pi.blocks) {
      if (pair_covariance(flat[b[0]], flat[b[1]]) == 0) {
        all = false;
        break;
      }
    }
    if (all && joins_to_one(pi, sizes)) ++total;
  }
  return total;
}

template <class Scalar>
Scalar conj_scalar(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, std::complex<double>>) {
    return std::conj(x);
  } else {
    return x;
  }
}

/// Non-commutative polynomial: words with coefficients. Exact when Scalar is a rational type.
template <class Scalar>
class NcPolynomial {
 public:
  NcPolynomial() = default;

  static NcPolynomial constant(const Scalar& c) {
    NcPolynomial p;
    p.add(Word{}, c);
    return p;
  }
  static NcPolynomial monomial(Word w, const Scalar& c) {
    NcPolynomial p;
    p.add(std::move(w), c);
    return p;
  }

  void add(Word w, const Scalar& c) {
    if (c == Scalar(0)) return;
    auto [it, fresh] = terms_.try_emplace(std::move(w), c);
    if (!fresh) {
      it->second += c;
      if (it->second == Scalar(0)) terms_.erase(it);
    }
  }

  const std::map<Word, Scalar>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  NcPolynomial operator*(const NcPolynomial& other) const {
    NcPolynomial out;
    for (const auto& [wa, ca] : terms_) {
      for (const auto& [wb, cb] : other.terms_) {
        Word w = wa;
        w.insert(w.end(), wb.begin(), wb.end());
        out.add(std::move(w), ca * cb);
      }
    }
    return out;
  }

  NcPolynomial operator+(const NcPolynomial& other) const {
    NcPolynomial out = *this;
    for (const auto& [w, c] : other.terms_) out.add(w, c);
    return out;
  }

  /// Reverses each word, adjoins each letter and conjugates each coefficient.
  NcPolynomial adjoint() const {
    NcPolynomial out;
    for (const auto& [w, c] : terms_) {
      Word r;
      r.reserve(w.size());
      for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(it->adjoint());
      out.add(std::move(r), conj_scalar(c));
    }
    return out;
  }

  NcPolynomial pow(int r) const {
    NcPolynomial out = constant(Scalar(1));
    for (int i = 0; i < r; ++i) out = out * *this;
    return out;
  }

  /// phi of the polynomial in the free semicircular / circular system.
  Scalar phi() const {
    Scalar acc(0);
    for (const auto& [w, c] : terms_) {
      const std::int64_t m = word_moment(w);
      if (m != 0) acc += c * Scalar(m);
    }
    return acc;
  }

 private:
  std::map<Word, Scalar> terms_;
};

/// Quadratic form x_A: s_A = sum a_ij s_i s_j, or c_A = sum a_ij c_i^* c_j.
template <class Scalar, class Coeff>
NcPolynomial<Scalar> quadratic_form(const Coeff& a, int k, LetterKind kind) {
  NcPolynomial<Scalar> p;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const Word w = kind == LetterKind::semicircular ? Word{Letter::s(i), Letter::s(j)}
                                                      : Word{Letter::c_star(i), Letter::c(j)};
      p.add(w, Scalar(a(i, j)));
    }
  }
  return p;
}

inline void check_quadratic_guards(Eigen::Index k, int r) {
  if (r < 1 || r > kMaxQuadraticPower) throw DomainError("quadratic_form_moment: r must lie in 1..4");
  if (k < 1 || k > kMaxQuadraticDim) throw DomainError("quadratic_form_moment: k must lie in 1..4");
}

/// phi((x_A)^r) for x_A = s_A (semicircular) or c_A (circular).
inline Complex quadratic_form_moment(const CMat& a, int r, LetterKind kind) {
  require_square(a, "quadratic_form_moment");
  check_quadratic_guards(a.rows(), r);
  const auto x = quadratic_form<Complex>(a, static_cast<int>(a.rows()), kind);
  return x.pow(r).phi();
}

/// phi((x_A^* x_A)^r): the *-moments compared between s_A and c_A.
inline Complex quadratic_form_star_moment(const CMat& a, int r, LetterKind kind) {
  require_square(a, "quadratic_form_star_moment");
  check_quadratic_guards(a.rows(), r);
  if (r > 3) throw DomainError("quadratic_form_star_moment: r must lie in 1..3");
  const auto x = quadratic_form<Complex>(a, static_cast<int>(a.rows()), kind);
  return (x.adjoint() * x).pow(r).phi();
}

/// Free cumulants kappa_r[x_A] through the connected-pairing formula (no moment inversion).
inline Complex quadratic_form_cumulant(const CMat& a, int r, LetterKind kind) {
  require_square(a, "quadratic_form_cumulant");
  check_quadratic_guards(a.rows(), r);
  const int k = static_cast<int>(a.rows());
  Complex acc(0.0, 0.0);
  std::vector<int> idx(static_cast<std::size_t>(2 * r), 0);
  const auto total = static_cast<std::int64_t>(std::pow(k, 2 * r));
  for (std::int64_t code = 0; code < total; ++code) {
    std::int64_t c = code;
    for (auto& v : idx) {
      v = static_cast<int>(c % k);
      c /= k;
    }
    Complex coeff(1.0, 0.0);
    std::vector<Word> groups;
    for (int j = 0; j < r; ++j) {
      const int u = idx[2 * j], v = idx[2 * j + 1];
      coeff *= a(u, v);
      groups.push_back(kind == LetterKind::semicircular ? Word{Letter::s(u), Letter::s(v)}
                                                        : Word{Letter::c_star(u), Letter::c(v)});
    }
    if (coeff == Complex(0.0, 0.0)) continue;
    const std::int64_t m = product_cumulant(groups);
    if (m != 0) acc += coeff * static_cast<double>(m);
  }
  return acc;
}

/// phi(a^n) = sum_{pi in NC(n)} prod_B kappa_|B|, for n = 1..size.
template <class Scalar>
std::vector<Scalar> moments_from_cumulants(const std::vector<Scalar>& kappa) {
  if (kappa.size() > static_cast<std::size_t>(kMaxPartitionSize)) throw DomainError("moments_from_cumulants: too many");
  std::vector<Scalar> out;
  for (int n = 1; n <= static_cast<int>(kappa.size()); ++n) {
    Scalar acc(0);
    for (const auto& pi : enumerate_nc(n)) {
      Scalar term(1);
      for (const auto& b : pi.blocks) term *= kappa[b.size() - 1];
      acc += term;
    }
    out.push_back(acc);
  }
  return out;
}

/// Inverts the moment-cumulant relation triangularly: kappa_n = m_n - sum over pi != 1_n.
template <class Scalar>
std::vector<Scalar> cumulant_from_moments(const std::vector<Scalar>& moments) {
  if (moments.size() > static_cast<std::size_t>(kMaxMoments)) {
    throw DomainError("cumulant_from_moments: at most 8 moments are supported");
  }
  std::vector<Scalar> kappa;
  for (int n = 1; n <= static_cast<int>(moments.size()); ++n) {
    Scalar rest(0);
    for (const auto& pi : enumerate_nc(n)) {
      if (pi.blocks.size() == 1) continue;
      Scalar term(1);
      for (const auto& b : pi.blocks) term *= kappa[b.size() - 1];
      rest += term;
    }
    kappa.push_back(moments[n - 1] - rest);
  }
  return kappa;
}

}  // namespace freecp::nc
