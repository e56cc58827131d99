#include <catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "freecp/verify.hpp"

using namespace freecp;
using namespace freecp::nc;
using Catch::Approx;

namespace {

// every set partition of n elements as a restricted growth string, no pruning
void all_partitions(int n, std::vector<int>& rgs, int max_label, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(rgs.size()) == n) {
    out.push_back(rgs);
    return;
  }
  for (int b = 0; b <= max_label + 1; ++b) {
    rgs.push_back(b);
    all_partitions(n, rgs, std::max(max_label, b), out);
    rgs.pop_back();
  }
}

bool crossing_naive(const std::vector<int>& l) {
  const int n = static_cast<int>(l.size());
  for (int a = 0; a < n; ++a)
    for (int c = a + 1; c < n; ++c)
      for (int b = c + 1; b < n; ++b)
        for (int d = b + 1; d < n; ++d)
          if (l[a] == l[b] && l[c] == l[d] && l[a] != l[c]) return true;
  return false;
}

}  // namespace

TEST_CASE("NC(n) equals the non-crossing subset of all partitions") {
  for (int n = 1; n <= 9; ++n) {
    std::vector<std::vector<int>> all;
    std::vector<int> rgs;
    all_partitions(n, rgs, -1, all);
    std::set<std::vector<int>> expect;
    for (const auto& l : all)
      if (!crossing_naive(l)) expect.insert(l);
    std::set<std::vector<int>> got;
    for (const auto& pi : enumerate_nc(n)) {
      CHECK_FALSE(pi.is_crossing());
      got.insert(pi.labels());
    }
    CHECK(got == expect);
    CHECK(static_cast<std::int64_t>(got.size()) == catalan(n));
  }
  CHECK(enumerate_nc(12).size() == 208012u);
  CHECK_THROWS_AS(enumerate_nc(13), DomainError);
  CHECK_THROWS_AS(enumerate_nc(0), DomainError);
}

TEST_CASE("Non-crossing pairings") {
  for (int m = 1; m <= 8; ++m) {
    const auto pairs = enumerate_nc2(2 * m);
    CHECK(static_cast<std::int64_t>(pairs.size()) == catalan(m));
    for (const auto& p : pairs) {
      CHECK(p.is_pairing());
      CHECK(pairs_odd_even(p));
    }
  }
  CHECK_THROWS_AS(enumerate_nc2(5), DomainError);
  CHECK_THROWS_AS(enumerate_nc2(18), DomainError);
}

TEST_CASE("SetPartition construction") {
  const SetPartition p = SetPartition::from_blocks(4, {{2, 0}, {3}, {1}});
  CHECK(p.blocks == std::vector<std::vector<int>>{{0, 2}, {1}, {3}});
  CHECK(p.is_crossing() == false);
  CHECK(SetPartition::from_blocks(4, {{0, 2}, {1, 3}}).is_crossing());
  CHECK(SetPartition::from_labels({5, 5, 1, 1}) == SetPartition::from_blocks(4, {{0, 1}, {2, 3}}));
  CHECK_THROWS_AS(SetPartition::from_blocks(3, {{0, 1}, {1, 2}}), DomainError);
  CHECK_THROWS_AS(SetPartition::from_blocks(3, {{0, 1}}), DomainError);
  CHECK_THROWS_AS(SetPartition::from_blocks(3, {{0, 5}, {1, 2}}), DomainError);
}

TEST_CASE("Join with interval partitions") {
  const SetPartition p = SetPartition::from_blocks(4, {{0, 3}, {1, 2}});
  CHECK(joins_to_one(p, {2, 2}));
  CHECK_FALSE(joins_to_one(p, {1, 2, 1}));
  CHECK_FALSE(joins_to_one(SetPartition::from_blocks(4, {{0, 1}, {2, 3}}), {2, 2}));
  CHECK_THROWS_AS(joins_to_one(p, {3}), DimensionError);
}

TEST_CASE("Word moments") {
  using L = Letter;
  for (int m = 1; m <= 8; ++m) {
    Word semi(2 * m, L::s(0));
    CHECK(word_moment(semi) == catalan(m));
    Word circ;
    for (int i = 0; i < m; ++i) {
      circ.push_back(L::c(0));
      circ.push_back(L::c_star(0));
    }
    CHECK(word_moment(circ) == catalan(m));
  }
  CHECK(word_moment({L::c(0), L::c(0), L::c_star(0), L::c_star(0)}) == 1);
  CHECK(word_moment({L::c(0), L::c_star(0), L::c_star(0), L::c(0)}) == 1);
  CHECK(word_moment({L::c(0), L::c(0)}) == 0);
  CHECK(word_moment({L::s(0), L::s(1), L::s(0), L::s(1)}) == 0);
  CHECK(word_moment({L::s(0), L::s(1), L::s(1), L::s(0)}) == 1);
  CHECK(word_moment({L::s(0), L::s(0), L::s(0)}) == 0);
  CHECK(Letter(0, true, LetterKind::semicircular) == L::s(0));
  CHECK(L::c(2).adjoint() == L::c_star(2));

  for (LetterKind kind : {LetterKind::semicircular, LetterKind::circular})
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int u = 0; u < 3; ++u)
          for (int v = 0; v < 3; ++v) {
            const Word w{Letter(i, false, kind), Letter(j, true, kind), Letter(u, false, kind), Letter(v, true, kind)};
            CHECK(word_moment(w) == fourth_moment_table(i, j, u, v));
          }
  CHECK_THROWS_AS(word_moment(Word(18, L::s(0))), DomainError);
}

TEST_CASE("Product cumulants") {
  using L = Letter;
  CHECK(product_cumulant({{L::s(0)}, {L::s(0)}}) == 1);
  CHECK(product_cumulant({{L::s(0), L::s(0)}}) == 1);
  // kappa_2[s^2, s^2] = phi(s^4) - phi(s^2)^2 = 1
  CHECK(product_cumulant({{L::s(0), L::s(0)}, {L::s(0), L::s(0)}}) == 1);
  CHECK(product_cumulant({{L::s(0), L::s(1)}, {L::s(1), L::s(0)}}) == 1);
  CHECK(product_cumulant({{L::s(0)}, {L::s(0)}, {L::s(0)}}) == 0);
}

TEST_CASE("Quadratic forms") {
  // A = I_k gives Marchenko-Pastur rate k
  for (int k = 1; k <= 3; ++k) {
    const auto mp = mp_moments(k, 4);
    for (int r = 1; r <= 4; ++r) {
      const Complex m = quadratic_form_moment(CMat::Identity(k, k), r, LetterKind::semicircular);
      CHECK(m.real() == Approx(mp[r - 1]).epsilon(1e-12));
      CHECK(std::abs(m.imag()) < 1e-12);
      CHECK(quadratic_form_moment(CMat::Identity(k, k), r, LetterKind::circular).real() ==
            Approx(mp[r - 1]).epsilon(1e-12));
    }
  }
  for (std::uint64_t s = 0; s < 10; ++s) {
    const int k = 1 + static_cast<int>(s % 3);
    const CMat a = random_psd(k, k, SeedSpec{s, 2});
    for (int r = 1; r <= 4; ++r) {
      const Complex m = quadratic_form_moment(a, r, LetterKind::semicircular);
      CHECK(std::abs(m - nc_power_sum_moment(a, r)) < 1e-10 * std::max(1.0, std::abs(m)));
    }
    CMat power = a;
    for (int r = 1; r <= 3; ++r) {
      CHECK(std::abs(quadratic_form_cumulant(a, r, LetterKind::circular) - power.trace()) < 1e-10);
      power = power * a;
    }
  }
  CHECK_THROWS_AS(quadratic_form_moment(CMat::Identity(5, 5), 2, LetterKind::semicircular), DomainError);
  CHECK_THROWS_AS(quadratic_form_moment(CMat::Identity(2, 2), 5, LetterKind::semicircular), DomainError);
  CHECK_THROWS_AS(quadratic_form_star_moment(CMat::Identity(2, 2), 4, LetterKind::circular), DomainError);
}

TEST_CASE("Moment-cumulant transforms") {
  const std::vector<double> kappa{0.3, 1.2, -0.4, 0.7, 0.1, 2.0};
  const auto m = moments_from_cumulants(kappa);
  CHECK(m[0] == Approx(0.3));
  CHECK(m[1] == Approx(1.2 + 0.09));
  // m3 = k3 + 3 k1 k2 + k1^3
  CHECK(m[2] == Approx(-0.4 + 3 * 0.3 * 1.2 + 0.027));
  const auto back = cumulant_from_moments(m);
  for (std::size_t i = 0; i < kappa.size(); ++i) CHECK(back[i] == Approx(kappa[i]).margin(1e-12));
  CHECK_THROWS_AS(cumulant_from_moments(std::vector<double>(9, 1.0)), DomainError);
}

TEST_CASE("Exact rational arithmetic") {
  using Rational = boost::multiprecision::cpp_rational;
  auto coeff = [](int i, int j) { return Rational(i == j ? 1 : 0, 2); };
  const auto x = quadratic_form<Rational>(coeff, 2, LetterKind::semicircular);
  // (1/2) I_2: rate-2 law scaled by 1/2, moments 1, 3/2, 11/4
  CHECK(x.phi() == Rational(1));
  CHECK(x.pow(2).phi() == Rational(3, 2));
  CHECK(x.pow(3).phi() == Rational(11, 4));
}

TEST_CASE("Self-verification passes") {
  for (const auto& c : self_verify(7)) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.passed);
  }
}
