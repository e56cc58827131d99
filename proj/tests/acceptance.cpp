// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "freecp/freecp.hpp"
#include "freecp/verify.hpp"

using namespace freecp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Independent NC(r) enumeration: every restricted growth string, crossing ones dropped.
void partitions(int n, std::vector<int>& l, int top, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(l.size()) == n) {
    for (int a = 0; a < n; ++a)
      for (int c = a + 1; c < n; ++c)
        for (int b = c + 1; b < n; ++b)
          for (int d = b + 1; d < n; ++d)
            if (l[a] == l[b] && l[c] == l[d] && l[a] != l[c]) return;
    out.push_back(l);
    return;
  }
  for (int b = 0; b <= top + 1; ++b) {
    l.push_back(b);
    partitions(n, l, std::max(top, b), out);
    l.pop_back();
  }
}

double nc_trace_sum(const CMat& a, int r) {
  std::vector<std::vector<int>> all;
  std::vector<int> l;
  partitions(r, l, -1, all);
  std::vector<double> tr;
  CMat pw = CMat::Identity(a.rows(), a.cols());
  for (int j = 0; j < r; ++j) {
    pw = pw * a;
    tr.push_back(pw.trace().real());
  }
  double acc = 0.0;
  for (const auto& lab : all) {
    std::vector<int> sizes(static_cast<std::size_t>(r), 0);
    for (int x : lab) ++sizes[x];
    double term = 1.0;
    for (int s : sizes)
      if (s > 0) term *= tr[s - 1];
    acc += term;
  }
  return acc;
}

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

Outcome criterion1() {
  Outcome o;
  double worst = 0.0;
  for (int k = 2; k <= 64; ++k) {
    const double expect = std::pow(1.0 + std::sqrt(static_cast<double>(k)), 2);
    worst = std::max(worst, std::abs(f_limit(CoefficientMatrix::from(CMat::Identity(k, k))).value - expect));
    const auto [lo, hi] = mp_edges(k);
    o.require(std::abs(lo - std::pow(std::sqrt(k) - 1.0, 2)) < 1e-10 && std::abs(hi - expect) < 1e-10,
              "mp_edges k=" + std::to_string(k));
    o.require(std::abs(limit_mopn(k, SchattenIndex::infinity()).value - 4.0 / k) < 1e-10,
              "limit_mopn inf k=" + std::to_string(k));
  }
  o.require(worst < 1e-10, "f(I_k) error " + fmt(worst));
  double rank_one = 0.0;
  for (int k = 1; k <= 8; ++k) {
    CMat a = CMat::Zero(k, k);
    a(k - 1, k - 1) = 1.0;
    rank_one = std::max(rank_one, std::abs(f_limit(CoefficientMatrix::from(a)).value - 4.0));
  }
  o.require(rank_one < 1e-10, "rank-one error " + fmt(rank_one));
  o.note("max |f(I_k) - (1+sqrt k)^2| = " + fmt(worst) + ", rank-one " + fmt(rank_one));
  return o;
}

Outcome criterion2() {
  Outcome o;
  double moment_err = 0.0, cumulant_err = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int k = 1 + t % 3;
    const CMat a = random_psd(k, 1 + (t / 3) % k, SeedSpec{20240601, static_cast<std::uint64_t>(t)});
    std::vector<Complex> moments;
    CMat pw = CMat::Identity(k, k);
    for (int r = 1; r <= 4; ++r) {
      const Complex m = nc::quadratic_form_moment(a, r, nc::LetterKind::semicircular);
      moment_err = std::max(moment_err, rel(m.real(), nc_trace_sum(a, r)) + std::abs(m.imag()));
      moments.push_back(m);
    }
    const auto kappa = nc::cumulant_from_moments(moments);
    for (int r = 1; r <= 4; ++r) {
      pw = pw * a;
      cumulant_err = std::max(cumulant_err, std::abs(kappa[r - 1] - pw.trace()) / std::max(1.0, std::abs(pw.trace())));
    }
  }
  o.require(moment_err < 1e-10, "moment error " + fmt(moment_err));
  o.require(cumulant_err < 1e-10, "cumulant error " + fmt(cumulant_err));

  double star_err = 0.0;
  for (int t = 0; t < 6; ++t) {
    const int k = 1 + t % 2;
    const CMat a = random_psd(k, k, SeedSpec{777, static_cast<std::uint64_t>(t)});
    for (int r = 1; r <= 3; ++r) {
      const Complex s = nc::quadratic_form_star_moment(a, r, nc::LetterKind::semicircular);
      const Complex c = nc::quadratic_form_star_moment(a, r, nc::LetterKind::circular);
      star_err = std::max(star_err, std::abs(s - c) / std::max(1.0, std::abs(s)));
    }
  }
  o.require(star_err < 1e-10, "star-moment error " + fmt(star_err));

  int table_mismatch = 0;
  for (nc::LetterKind kind : {nc::LetterKind::semicircular, nc::LetterKind::circular})
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int u = 0; u < 3; ++u)
          for (int v = 0; v < 3; ++v) {
            const int expect = (i == j && j == u && u == v) ? 2 : ((i == j && u == v) || (i == v && j == u)) ? 1 : 0;
            const nc::Word w{nc::Letter(i, false, kind), nc::Letter(j, true, kind), nc::Letter(u, false, kind),
                             nc::Letter(v, true, kind)};
            if (nc::word_moment(w) != expect) ++table_mismatch;
          }
  o.require(table_mismatch == 0, std::to_string(table_mismatch) + " fourth-moment mismatches");
  o.note("moments " + fmt(moment_err) + ", cumulants " + fmt(cumulant_err) + ", star " + fmt(star_err) +
         ", 2/1/0 table exact over 162 words");
  return o;
}

bool violated_reference(int k, long double p) {
  const long double kk = k;
  const long double c = 1.0L - 3.0L / kk + 2.0L / std::sqrt(kk);
  const long double single =
      std::pow(std::pow(4.0L / kk, p) + std::pow(1.0L / (kk - 1.0L), p - 1.0L) * std::pow(c, p), 1.0L / p);
  const long double pair =
      std::pow(std::pow(1.0L / kk + 1.0L / (kk * kk), p) + (kk * kk - 1.0L) * std::pow(kk, -2.0L * p), 1.0L / p);
  return pair > single * single;
}

Outcome criterion3() {
  Outcome o;
  for (int k = 2; k <= 15; ++k)
    o.require(!multiplicativity_verdict(k, SchattenIndex::infinity()).violated, "p=inf violated at k=" + std::to_string(k));
  o.require(multiplicativity_verdict(16, SchattenIndex::infinity()).violated, "p=inf not violated at k=16");

  const std::pair<double, std::int64_t> pinned[] = {{2.0, 153}, {3.0, 23}};
  for (const auto& [p, expect] : pinned) {
    const ViolationScan s = scan_multiplicativity(SchattenIndex::finite(p), 2, 1000000);
    const bool ref = violated_reference(static_cast<int>(expect), p) && !violated_reference(static_cast<int>(expect) - 1, p);
    o.require(s.first_violating && *s.first_violating == expect && ref,
              "p=" + fmt(p) + " first violating " + (s.first_violating ? std::to_string(*s.first_violating) : "none"));
    o.note("p=" + fmt(p) + ": k*=" + (s.first_violating ? std::to_string(*s.first_violating) : "none") +
           (s.violated_through_end ? " (violated through 1e6)" : ""));
  }

  const ViolationScan early = scan_moe_gap(2, 1000000);
  const ViolationScan wide = scan_moe_gap(2, 600000000);
  o.require(!early.first_violating, "moe gap positive below 1e6");
  // sign of k * gap = (log k - 2) - 18 k^2 / (sqrt k - 1)^4 in long double
  auto numerator = [](long double k) {
    const long double s = std::sqrt(k) - 1.0L;
    return (std::log(k) - 2.0L) - 18.0L * k * k / (s * s * s * s);
  };
  o.require(numerator(486751281.0L) < 0.0L && numerator(486751282.0L) > 0.0L, "long double reference disagrees");
  o.require(wide.first_violating && *wide.first_violating == 486751282,
            "moe gap first positive at " + (wide.first_violating ? std::to_string(*wide.first_violating) : "none"));
  o.note("moe gap: none up to 1e6, first positive k=" +
         (wide.first_violating ? std::to_string(*wide.first_violating) : std::string("none")) + " (scan to 6e8)");
  return o;
}

Outcome criterion4() {
  Outcome o;
  // rank-one A attains equality, so the margin is compared against rounding of the bound
  double min_margin = std::numeric_limits<double>::infinity();
  int equality_cases = 0;
  for (int t = 0; t < 10000; ++t) {
    const int k = 1 + t % 12;
    const CMat a = random_psd(k, 1 + (t / 12) % k, SeedSpec{4242, static_cast<std::uint64_t>(t)});
    const double bound = haagerup_bound(a);
    const double margin = (bound - f_limit(CoefficientMatrix::from(a)).value) / bound;
    if (margin < 1e-12) ++equality_cases;
    min_margin = std::min(min_margin, margin);
  }
  o.require(min_margin >= -1e-12, "negative relative margin " + fmt(min_margin));
  o.note("min relative margin " + fmt(min_margin) + " over 1e4 matrices, " + std::to_string(equality_cases) +
         " at equality (rank one)");
  return o;
}

Outcome criterion5() {
  Outcome o;
  ExperimentPlan plan;
  plan.k = 4;
  plan.n_grid = {1000};
  plan.trials = 20;
  plan.master_seed = 5;
  const auto recs = convergence_study(plan, ConvergenceOptions{true, true, false, false, 0});
  double wmax = 0.0, wmin = 0.0;
  double tmin = std::numeric_limits<double>::infinity(), tmax = 0.0;
  int nmax = 0, nmin = 0;
  for (const auto& r : recs) {
    if (r.quantity == "w_max") wmax += r.abs_err, ++nmax;
    if (r.quantity == "w_min") wmin += r.abs_err, ++nmin;
    if (r.quantity == "trace_max") tmax = std::max(tmax, r.observed);
    if (r.quantity == "trace_min") tmin = std::min(tmin, r.observed);
  }
  wmax /= nmax;
  wmin /= nmin;
  const auto [lo, hi] = trace_window(4);
  o.require(wmax < 0.2, "mean |lambda_max - 9| = " + fmt(wmax));
  o.require(wmin < 0.2, "mean |lambda_min - 1| = " + fmt(wmin));
  o.require(tmin >= lo - 0.1 && tmax <= hi + 0.1, "traces outside window");

  const KrausFamily fam = sample_kraus_family(600, 8, EnsembleFlavor::gue, 600);
  MopnOptions opt;
  opt.seed = derive_seed(600, seed_tag::mopn);
  const MopnEstimate est = estimate_mopn(Channel(fam, ChannelKind::raw()), SchattenIndex::infinity(), opt);
  const double relerr = std::abs(est.value - 0.5) / 0.5;
  o.require(relerr < 0.15, "MOinfN relative error " + fmt(relerr));
  o.note("edges " + fmt(wmax) + "/" + fmt(wmin) + ", traces [" + fmt(tmin) + ", " + fmt(tmax) + "] in [" + fmt(lo) +
         ", " + fmt(hi) + "] +- 0.1, MOinfN " + fmt(est.value) + " vs 0.5 (rel " + fmt(relerr) + ")");
  return o;
}

Outcome criterion6() {
  Outcome o;
  ExperimentPlan plan;
  plan.k = 4;
  plan.n_grid = {800};
  plan.trials = 10;
  plan.master_seed = 6;
  plan.p_list = {SchattenIndex::infinity()};
  const auto recs = bell_pair_experiment(plan);
  double dist = 0.0, min_rect = std::numeric_limits<double>::infinity();
  for (const auto& r : recs) {
    dist += r.frobenius_distance;
    o.require(r.rectifier_ok, "rectifier failed: " + r.error);
    if (r.rectifier_ok) min_rect = std::min(min_rect, r.rectified_overlap);
  }
  dist /= static_cast<double>(recs.size());
  o.require(dist < 0.1, "mean distance " + fmt(dist));
  o.require(min_rect >= 0.25 - 0.02, "rectified overlap " + fmt(min_rect));
  o.note("mean distance " + fmt(dist) + ", min rectified overlap " + fmt(min_rect));
  return o;
}

Outcome criterion7() {
  Outcome o;
  double min_slack = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 10000; ++t) {
    const int k = 1 + t % 16;
    const CMat rho = random_state(k, SeedSpec{7777, static_cast<std::uint64_t>(t)}, 1 + (t / 16) % k);
    min_slack = std::min(min_slack, von_neumann_entropy(rho) - quadratic_entropy_bound(rho));
  }
  o.require(min_slack >= -1e-12, "entropy below quadratic bound by " + fmt(-min_slack));

  ExperimentPlan plan;
  plan.k = 8;
  plan.n_grid = {600};
  plan.trials = 1;
  plan.master_seed = 7;
  plan.restarts = 4;
  plan.max_iters = 100;
  const auto recs = moe_experiment(plan);
  const double bound = two_norm_bound(8) + 0.1;
  double worst = 0.0;
  for (const auto& r : recs) {
    o.require(r.rectifier_ok, "rectifier failed: " + r.error);
    worst = std::max(worst, r.max_two_norm);
  }
  o.require(worst <= bound, "two-norm " + fmt(worst) + " above " + fmt(bound));
  o.note("min entropy slack " + fmt(min_slack) + ", max two-norm " + fmt(worst) + " <= " + fmt(bound));
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::vector<double> ps, ks;
  for (int i = 1; i <= 10; ++i) ps.push_back(1.0 + 0.05 * i);
  for (int k = 1; k <= 10000; ++k) ks.push_back(k);
  const AppendixDReport rep = appendix_d_checks(ps, ks);
  o.require(rep.all_g_positive, "g(k) not positive, min " + fmt(rep.min_g));

  double holder_err = 0.0;
  const double exps[] = {1.5, 2.0, 3.0, 4.5};
  for (int t = 0; t < 1000; ++t) {
    const int k = 1 + t % 8;
    const CMat a = random_psd(k, 1 + (t / 8) % k, SeedSpec{8888, static_cast<std::uint64_t>(t)});
    const SchattenIndex p = SchattenIndex::finite(exps[t % 4]);
    const CMat b = holder_dual_maximizer(a, p);
    const double norm = schatten_norm(a, p);
    holder_err = std::max(holder_err, std::abs((a * b).trace().real() - norm) / norm);
    holder_err = std::max(holder_err, std::abs(schatten_norm(b, SchattenIndex::finite(p.conjugate())) - 1.0));
  }
  o.require(holder_err < 1e-9, "Hoelder error " + fmt(holder_err));

  std::string shapes;
  for (int k : {2, 3, 4}) {
    for (double q : {3.0, 4.0}) {
      const ShapeResult s = validate_optimal_shape(k, q);
      o.require(s.two_level_shape && s.value_matches,
                "shape k=" + std::to_string(k) + " q=" + fmt(q) + " spread " + fmt(s.tail_spread));
      shapes += (shapes.empty() ? "" : ",") + fmt(s.tail_spread);
    }
  }
  o.note("min g " + fmt(rep.min_g) + ", Hoelder " + fmt(holder_err) + ", tail spreads " + shapes);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8}};
  bool all = true;
  for (const auto& [id, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", id, secs, o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
