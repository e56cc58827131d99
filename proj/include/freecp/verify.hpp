#pragma once

// Self-test of the non-crossing oracle against closed forms.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "freecp/ensembles.hpp"
#include "freecp/nc_oracle.hpp"

namespace freecp::nc {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline std::int64_t catalan(int m) {
  std::int64_t c = 1;
  for (int i = 0; i < m; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

inline std::int64_t binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  std::int64_t c = 1;
  for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return c;
}

/// Marchenko-Pastur rate-lambda moments through Narayana numbers.
inline std::vector<double> mp_moments(double lambda, int count) {
  std::vector<double> m;
  for (int n = 1; n <= count; ++n) {
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) acc += static_cast<double>(binomial(n, j) * binomial(n, j - 1)) / n * std::pow(lambda, j);
    m.push_back(acc);
  }
  return m;
}

/// phi(x_i x_j^* x_u x_v^*) predicted for circular or semicircular letters.
inline std::int64_t fourth_moment_table(int i, int j, int u, int v) {
  if (i == j && j == u && u == v) return 2;
  if ((i == j && u == v) || (i == v && j == u)) return 1;
  return 0;
}

/// sum over NC(r) of prod_B Tr[A^|B|].
inline Complex nc_power_sum_moment(const CMat& a, int r) {
  std::vector<Complex> traces;
  CMat power = CMat::Identity(a.rows(), a.cols());
  for (int j = 0; j < r; ++j) {
    power = power * a;
    traces.push_back(power.trace());
  }
  return moments_from_cumulants(traces).back();
}

inline std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

inline std::vector<CheckResult> self_verify(std::uint64_t seed, int random_matrices = 5) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, bool ok, std::string detail = {}) {
    out.push_back(CheckResult{std::move(name), ok, std::move(detail)});
  };

  bool ok = true;
  for (int n = 1; n <= 10; ++n) ok = ok && static_cast<std::int64_t>(enumerate_nc(n).size()) == catalan(n);
  add("catalan_nc", ok, "|NC(n)| = Catalan(n), n = 1..10");
  ok = true;
  for (int m = 1; m <= 8; ++m) ok = ok && static_cast<std::int64_t>(enumerate_nc2(2 * m).size()) == catalan(m);
  add("catalan_nc2", ok, "|NC_2(2m)| = Catalan(m), m = 1..8");
  ok = true;
  for (int n = 2; n <= 16; n += 2) {
    for (const auto& pi : enumerate_nc2(n)) ok = ok && pairs_odd_even(pi) && !pi.is_crossing();
  }
  add("pairing_parity", ok, "every non-crossing pairing joins odd and even positions, n <= 16");

  ok = true;
  for (LetterKind kind : {LetterKind::semicircular, LetterKind::circular}) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int u = 0; u < 3; ++u)
          for (int v = 0; v < 3; ++v) {
            const Word w{Letter(i, false, kind), Letter(j, true, kind), Letter(u, false, kind), Letter(v, true, kind)};
            ok = ok && word_moment(w) == fourth_moment_table(i, j, u, v);
          }
  }
  add("fourth_moment_table", ok, "phi(x_i x_j^* x_u x_v^*) in {2, 1, 0}");

  {
    const auto semi = cumulant_from_moments(std::vector<double>{0, 1, 0, 2, 0, 5});
    const std::vector<double> expect{0, 1, 0, 0, 0, 0};
    double err = 0.0;
    for (std::size_t i = 0; i < semi.size(); ++i) err = std::max(err, std::abs(semi[i] - expect[i]));
    add("semicircle_cumulants", err < 1e-12, "cumulants of (0,1,0,2,0,5)");
    const auto mp = cumulant_from_moments(mp_moments(2.5, 8));
    err = 0.0;
    for (double c : mp) err = std::max(err, std::abs(c - 2.5));
    add("marchenko_pastur_cumulants", err < 1e-10, "all cumulants equal the rate 2.5");
  }

  double moment_err = 0.0, cumulant_err = 0.0, direct_err = 0.0;
  for (int t = 0; t < random_matrices; ++t) {
    const int k = 1 + t % 3;
    const CMat a = random_psd(k, k, SeedSpec{seed, static_cast<std::uint64_t>(t)});
    std::vector<Complex> moments;
    for (int r = 1; r <= 4; ++r) {
      const Complex m = quadratic_form_moment(a, r, LetterKind::semicircular);
      const Complex expect = nc_power_sum_moment(a, r);
      moment_err = std::max(moment_err, std::abs(m - expect) / std::max(1.0, std::abs(expect)));
      moments.push_back(m);
    }
    const auto kappa = cumulant_from_moments(moments);
    CMat power = CMat::Identity(k, k);
    for (int r = 1; r <= 4; ++r) {
      power = power * a;
      const Complex tr = power.trace();
      cumulant_err = std::max(cumulant_err, std::abs(kappa[r - 1] - tr) / std::max(1.0, std::abs(tr)));
      if (r <= 3) {
        const Complex direct = quadratic_form_cumulant(a, r, LetterKind::semicircular);
        direct_err = std::max(direct_err, std::abs(direct - tr) / std::max(1.0, std::abs(tr)));
      }
    }
  }
  add("quadratic_moments", moment_err < 1e-10, "phi(s_A^r) vs sum over NC(r), rel err " + sci(moment_err));
  add("quadratic_cumulants", cumulant_err < 1e-10, "kappa_r[s_A] vs Tr A^r, rel err " + sci(cumulant_err));
  add("connected_pairings", direct_err < 1e-10, "connected-pairing cumulants vs Tr A^r, rel err " + sci(direct_err));

  double star_err = 0.0;
  for (int t = 0; t < 2; ++t) {
    const CMat a = random_psd(2, 2, SeedSpec{seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(t)});
    for (int r = 1; r <= 3; ++r) {
      const Complex s = quadratic_form_star_moment(a, r, LetterKind::semicircular);
      const Complex c = quadratic_form_star_moment(a, r, LetterKind::circular);
      star_err = std::max(star_err, std::abs(s - c) / std::max(1.0, std::abs(s)));
    }
  }
  add("star_moments", star_err < 1e-10, "s_A^* s_A vs c_A^* c_A, r <= 3, rel err " + sci(star_err));

  {
    using Rational = boost::multiprecision::cpp_rational;
    const int a_int[2][2] = {{2, 1}, {1, 3}};
    auto coeff = [&](int i, int j) { return Rational(a_int[i][j]); };
    const auto x = quadratic_form<Rational>(coeff, 2, LetterKind::circular);
    // Tr A = 5, Tr A^2 = 15, Tr A^3 = 50
    const std::vector<Rational> expect{Rational(5), Rational(5 * 5 + 15), Rational(5 * 5 * 5 + 3 * 5 * 15 + 50)};
    bool exact = true;
    for (int r = 1; r <= 3; ++r) exact = exact && x.pow(r).phi() == expect[r - 1];
    add("exact_rational_moments", exact, "integer A, c_A moments in exact rationals");
  }
  return out;
}

}  // namespace freecp::nc
