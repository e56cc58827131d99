#pragma once

// Monte Carlo harness: MOpN estimation by alternating dual ascent, convergence
// studies against the free limits, the Bell-pair experiment, MOE estimation for
// the rectified channel and brute-force validation of the two-level shape.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "freecp/channels.hpp"
#include "freecp/ensembles.hpp"
#include "freecp/freelimits.hpp"
#include "freecp/krylov.hpp"
#include "freecp/matrixkit.hpp"
#include "freecp/plan.hpp"
#include "freecp/random.hpp"

namespace freecp {

namespace seed_tag {
inline constexpr std::uint64_t family = 1;
inline constexpr std::uint64_t mopn = 2;
inline constexpr std::uint64_t probe = 3;
inline constexpr std::uint64_t input = 4;
inline constexpr std::uint64_t lanczos = 5;
}  // namespace seed_tag

/// max(c_bulk n^(-1/2), c_edge n^(-2/3)).
inline double mc_tolerance(Eigen::Index n, double c_bulk, double c_edge) {
  const double nn = static_cast<double>(n);
  return std::max(c_bulk / std::sqrt(nn), c_edge * std::pow(nn, -2.0 / 3.0));
}

/// Evaluates fn(0..count-1) on worker threads; results keep index order and the
/// lowest-index exception, if any, is rethrown.
template <class Fn>
auto parallel_map(std::size_t count, Fn&& fn, unsigned threads = 0) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out(count);
  std::vector<std::exception_ptr> errors(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// MOpN by alternating dual ascent

struct MopnOptions {
  int restarts = 8;
  int max_iters = 200;
  double tolerance = 1e-10;  ///< relative increase regarded as a stall
  int stall_rounds = 3;
  std::uint64_t seed = 0;
  LanczosOptions lanczos{12, 0, 1e-12};
};

struct MopnEstimate {
  double value = 0.0;
  CVec witness_state;
  CMat witness_A;
  CMat witness_output;  ///< Phi^c(|x><x|) at the witness
  bool converged = false;
  int rounds = 0;
  std::vector<double> history;  ///< objective after every half-step of the winning restart
  std::vector<double> restart_values;
  SchattenIndex p = SchattenIndex::infinity();
};

/// The A maximising Tr[BA] over the unit q-ball of PSD matrices.
inline CMat dual_maximizer(const CMat& b, const SchattenIndex& p) {
  return p.is_infinite() ? top_eigenprojector(b) : holder_dual_maximizer(b, p);
}

/// Top eigenpair of v -> (1/k) sum a_ij K_i^* K_j v, through the factored form when A is rank deficient.
inline TopEigenpair top_of_dual_form(const Channel& ch, const CMat& a, const CVec& start, const LanczosOptions& opt) {
  const Channel::DualForm form = ch.dual_form(a);
  if (static_cast<int>(form.rank()) < ch.k()) return lanczos_top(form, start, opt);
  return lanczos_top([&](const CVec& v) { return ch.dual_form_apply(a, v); }, start, opt);
}

/// Estimates max_x ||Phi^c(|x><x|)||_p, which equals the maximum output p-norm.
inline MopnEstimate estimate_mopn(const Channel& ch, const SchattenIndex& p, const MopnOptions& opt = {}) {
  if (opt.restarts < 4) throw DomainError("estimate_mopn: restarts must be at least 4");
  if (opt.max_iters < 1) throw DomainError("estimate_mopn: max_iters must be positive");
  MopnEstimate best;
  best.p = p;
  best.value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < opt.restarts; ++r) {
    CVec x = random_unit_vector(ch.n(), SeedSpec{derive_seed(opt.seed, seed_tag::mopn, static_cast<std::uint64_t>(r)), 0});
    CMat b = ch.complementary_pure(x);
    CMat a = dual_maximizer(b, p);
    double obj = (b * a).trace().real();
    std::vector<double> history{obj};
    int stall = 0;
    bool converged = false;
    int rounds = 0;
    for (; rounds < opt.max_iters; ++rounds) {
      const TopEigenpair top = top_of_dual_form(ch, a, x, opt.lanczos);
      x = top.vector.normalized();
      history.push_back(top.value);
      b = ch.complementary_pure(x);
      a = dual_maximizer(b, p);
      const double next = (b * a).trace().real();
      history.push_back(next);
      stall = next - obj <= opt.tolerance * std::max(1.0, std::abs(obj)) ? stall + 1 : 0;
      obj = next;
      if (stall >= opt.stall_rounds) {
        converged = true;
        ++rounds;
        break;
      }
    }
    best.restart_values.push_back(obj);
    if (obj > best.value) {  // strict: earliest restart wins ties
      best.value = obj;
      best.witness_state = x;
      best.witness_A = a;
      best.witness_output = b;
      best.converged = converged;
      best.rounds = rounds;
      best.history = std::move(history);
    }
  }
  return best;
}

inline MopnEstimate estimate_mopn(const KrausFamily& fam, ChannelKind kind, const SchattenIndex& p,
                                  const MopnOptions& opt = {}, double epsilon = 0.5) {
  if (kind.tag == ChannelKind::Tag::rectified) {
    const Rectifier r = build_rectifier(fam, epsilon);
    return estimate_mopn(Channel(fam, kind, &r), p, opt);
  }
  return estimate_mopn(Channel(fam, kind), p, opt);
}

/// f_n(A) = lambda_max(sum a_ji X_j^* X_i) = k lambda_max(M(A)).
inline double finite_f(const Channel& ch, const CMat& a, std::uint64_t seed) {
  const CVec start = random_unit_vector(ch.n(), SeedSpec{derive_seed(seed, seed_tag::lanczos), 0});
  const TopEigenpair top = top_of_dual_form(ch, a, start, LanczosOptions{40, 60, 1e-10});
  return ch.k() * top.value;
}

// ---------------------------------------------------------------------------
// Convergence study

/// Eight fixed PSD probes with unit Frobenius norm: I/sqrt k, then random ones of ranks 1..k.
inline std::vector<CMat> probe_set(int k) {
  std::vector<CMat> probes;
  probes.push_back(CMat::Identity(k, k) / std::sqrt(static_cast<double>(k)));
  for (int j = 1; j < 8; ++j) {
    const Eigen::Index rank = 1 + (j - 1) % k;
    CMat a = random_psd(k, rank, SeedSpec{derive_seed(0x70726F6265ULL, seed_tag::probe, static_cast<std::uint64_t>(k)),
                                          static_cast<std::uint64_t>(j)});
    a = 0.5 * (a + a.adjoint());
    probes.push_back(a / a.norm());
  }
  return probes;
}

struct ConvergenceRecord {
  std::string quantity;
  Eigen::Index n = 0;
  int trial = 0;
  double observed = 0.0;
  double limit = 0.0;
  double abs_err = 0.0;
  SeedSpec seed;
  double tolerance = 0.0;  ///< mc_tolerance(n); an engineering band, not a theorem
  bool converged = true;
};

inline std::uint64_t trial_seed(const ExperimentPlan& plan, Eigen::Index n, int trial) {
  return derive_seed(plan.master_seed, seed_tag::family, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial));
}

inline ConvergenceRecord make_record(std::string quantity, Eigen::Index n, int trial, double observed, double limit,
                                     SeedSpec seed, double tolerance, bool converged = true) {
  return ConvergenceRecord{std::move(quantity), n, trial, observed, limit, std::abs(observed - limit),
                           seed, tolerance, converged};
}

inline MopnOptions mopn_options_for(const ExperimentPlan& plan, std::uint64_t seed) {
  MopnOptions opt;
  opt.restarts = plan.restarts;
  opt.max_iters = plan.max_iters;
  opt.tolerance = plan.tolerances.count("ascent") ? plan.tolerances.at("ascent") : 1e-10;
  opt.seed = derive_seed(seed, seed_tag::mopn);
  return opt;
}

struct ConvergenceOptions {
  bool edges = true;
  bool traces = true;
  bool mopn = true;
  bool probes = true;
  unsigned threads = 0;
};

inline std::vector<ConvergenceRecord> convergence_study(const ExperimentPlan& plan, const ConvergenceOptions& copt = {}) {
  plan.validate();
  const int k = plan.k;
  const auto [w_lo, w_hi] = mp_edges(k);
  const auto [t_lo, t_hi] = trace_window(k);
  const auto probes = probe_set(k);
  std::vector<double> probe_limits;
  for (const auto& a : probes) probe_limits.push_back(f_limit(eigenvalues_herm(a)).value);
  std::vector<double> mopn_limits;
  for (const auto& p : plan.p_list) mopn_limits.push_back(limit_mopn(k, p).value);
  const double c_bulk = plan.tolerances.count("mc_bulk") ? plan.tolerances.at("mc_bulk") : 1.0;
  const double c_edge = plan.tolerances.count("mc_edge") ? plan.tolerances.at("mc_edge") : 1.0;

  const std::size_t trials = static_cast<std::size_t>(plan.trials);
  auto task = [&](std::size_t idx) {
    const Eigen::Index n = plan.n_grid[idx / trials];
    const int trial = static_cast<int>(idx % trials);
    const std::uint64_t s = trial_seed(plan, n, trial);
    const SeedSpec seed{s, 0};
    const double band = mc_tolerance(n, c_bulk, c_edge);
    std::vector<ConvergenceRecord> out;
    const KrausFamily fam = sample_kraus_family(n, k, plan.flavor, s);
    if (copt.edges || copt.traces) {
      const SpectralProfile w = eigenvalues_herm(frame_operator(fam));
      if (copt.edges) {
        out.push_back(make_record("w_max", n, trial, w.max(), w_hi, seed, band));
        out.push_back(make_record("w_min", n, trial, w.min(), w_lo, seed, band));
      }
      if (copt.traces) {
        out.push_back(make_record("trace_max", n, trial, w.max() / k, t_hi, seed, band));
        out.push_back(make_record("trace_min", n, trial, w.min() / k, t_lo, seed, band));
      }
    }
    const Channel ch(fam, ChannelKind::raw());
    if (copt.mopn) {
      for (std::size_t i = 0; i < plan.p_list.size(); ++i) {
        const MopnEstimate est = estimate_mopn(ch, plan.p_list[i], mopn_options_for(plan, s));
        out.push_back(make_record("mopn_p=" + plan.p_list[i].to_string(), n, trial, est.value, mopn_limits[i], seed,
                                  band, est.converged));
      }
    }
    if (copt.probes) {
      for (std::size_t j = 0; j < probes.size(); ++j) {
        const double fn = finite_f(ch, probes[j], derive_seed(s, seed_tag::probe, j));
        out.push_back(make_record("f_probe_" + std::to_string(j), n, trial, fn, probe_limits[j], seed, band));
      }
    }
    return out;
  };
  const auto parts = parallel_map(plan.n_grid.size() * trials, task, copt.threads);
  std::vector<ConvergenceRecord> records;
  for (const auto& part : parts) records.insert(records.end(), part.begin(), part.end());
  return records;
}

// ---------------------------------------------------------------------------
// Bell pair

struct BellPairRecord {
  Eigen::Index n = 0;
  int trial = 0;
  SeedSpec seed;
  EnsembleFlavor flavor = EnsembleFlavor::gue;
  double trace = 0.0;
  double frobenius_distance = 0.0;  ///< to (1/k^2) I + (1/k) |b_k><b_k|
  double overlap = 0.0;             ///< <b_k| pair output |b_k>
  std::vector<double> p_norms;      ///< of the pair output, one per plan p
  std::vector<double> limit_p_norms;  ///< bell_pair_lower_bound, one per plan p
  bool rectifier_ok = false;
  bool bracket_holds = false;
  double rectified_overlap = std::numeric_limits<double>::quiet_NaN();
  double rectified_frobenius_distance = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

inline std::vector<BellPairRecord> bell_pair_experiment(const ExperimentPlan& plan, unsigned threads = 0) {
  plan.validate();
  const int k = plan.k;
  const CMat limit = bell_pair_limit_matrix(k);
  std::vector<double> limit_norms;
  for (const auto& p : plan.p_list) limit_norms.push_back(bell_pair_lower_bound(k, p));
  const std::size_t trials = static_cast<std::size_t>(plan.trials);
  auto task = [&](std::size_t idx) {
    BellPairRecord rec;
    rec.n = plan.n_grid[idx / trials];
    rec.trial = static_cast<int>(idx % trials);
    const std::uint64_t s = trial_seed(plan, rec.n, rec.trial);
    rec.seed = SeedSpec{s, 0};
    rec.flavor = plan.flavor;
    const KrausFamily fam = sample_kraus_family(rec.n, k, plan.flavor, s);
    const CMat out = pair_output_on_bell(Channel(fam, ChannelKind::raw()));
    rec.trace = out.trace().real();
    rec.frobenius_distance = frobenius_distance(out, limit);
    rec.overlap = bell_overlap(out);
    const SpectralProfile spec = psd_spectrum(out, "bell_pair_experiment");
    for (const auto& p : plan.p_list) rec.p_norms.push_back(schatten_norm(spec, p));
    rec.limit_p_norms = limit_norms;
    try {
      const Rectifier r = build_rectifier(fam, plan.epsilon);
      rec.rectifier_ok = true;
      rec.bracket_holds = r.bracket_holds;
      const CMat rect = pair_output_on_bell(Channel(fam, ChannelKind::rectified(), &r));
      rec.rectified_overlap = bell_overlap(rect);
      rec.rectified_frobenius_distance = frobenius_distance(rect, limit);
    } catch (const SingularFrameError& e) {
      rec.error = e.what();
    }
    return rec;
  };
  return parallel_map(plan.n_grid.size() * trials, task, threads);
}

// ---------------------------------------------------------------------------
// MOE of the rectified channel

struct EntropyDescent {
  CVec state;
  double entropy = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

/// Majorise-minimise descent on S(Psi^c(|x><x|)): x <- top eigenvector of M(log B).
/// Needs a trace-preserving channel, so that M(I) = I.
inline EntropyDescent entropy_descent(const Channel& ch, CVec x, int max_iters, double tolerance = 1e-12) {
  EntropyDescent out;
  x.normalize();
  auto entropy_of = [&](const CVec& v) {
    const CMat b = ch.complementary_pure(v);
    return std::pair<CMat, double>{b, von_neumann_entropy(psd_spectrum(b / b.trace().real(), "entropy_descent"))};
  };
  auto [b, s] = entropy_of(x);
  out.state = x;
  out.entropy = s;
  out.history.push_back(s);
  int stall = 0;
  for (int it = 0; it < max_iters; ++it) {
    const Eigensystem es = eig_herm(b);
    const CMat log_b = spectral_apply(es, [](double v) { return std::log(std::max(v, 1e-15)); });
    const TopEigenpair top =
        lanczos_top([&](const CVec& v) { return ch.dual_form_apply(log_b, v); }, x, LanczosOptions{12, 0, 1e-12});
    x = top.vector.normalized();
    auto [b_next, s_next] = entropy_of(x);
    out.history.push_back(s_next);
    out.iterations = it + 1;
    stall = out.entropy - s_next <= tolerance * std::max(1.0, std::abs(out.entropy)) ? stall + 1 : 0;
    if (s_next < out.entropy) {
      out.entropy = s_next;
      out.state = x;
    }
    b = b_next;
    if (stall >= 3) break;
  }
  return out;
}

struct MoeRecord {
  Eigen::Index n = 0;
  int trial = 0;
  SeedSpec seed;
  bool rectifier_ok = false;
  bool bracket_holds = false;
  double surrogate_entropy = 0.0;    ///< entropy at the p = 1.05 ascent witness
  double min_entropy_estimate = 0.0; ///< after entropy descent; heuristic, not certified
  double single_lower_prediction = 0.0;  ///< log k - 9k/(sqrt k - 1)^4
  double min_entropy_slack = 0.0;    ///< min over probes of S - quadratic_entropy_bound
  double pair_entropy = 0.0;
  double pair_ceiling = 0.0;         ///< 2 log k - (log k)/k + 2/k
  double pair_overlap = 0.0;
  double max_two_norm = 0.0;         ///< max over probes of ||Psi^c(|x><x|) - I/k||_2
  double two_norm_bound = 0.0;       ///< 3/(k + 1 - 2 sqrt k)
  int probes = 0;
  std::string error;
};

inline constexpr int kMoeRandomProbes = 16;

inline std::vector<MoeRecord> moe_experiment(const ExperimentPlan& plan, unsigned threads = 0) {
  plan.validate();
  const int k = plan.k;
  const CMat centre = CMat::Identity(k, k) / static_cast<double>(k);
  const std::size_t trials = static_cast<std::size_t>(plan.trials);
  auto task = [&](std::size_t idx) {
    MoeRecord rec;
    rec.n = plan.n_grid[idx / trials];
    rec.trial = static_cast<int>(idx % trials);
    const std::uint64_t s = trial_seed(plan, rec.n, rec.trial);
    rec.seed = SeedSpec{s, 0};
    rec.single_lower_prediction = moe_single_lower_bound(k);
    rec.pair_ceiling = moe_pair_ceiling(k);
    rec.two_norm_bound = two_norm_bound(k);
    const KrausFamily fam = sample_kraus_family(rec.n, k, plan.flavor, s);
    Rectifier r;
    try {
      r = build_rectifier(fam, plan.epsilon);
    } catch (const SingularFrameError& e) {
      rec.error = e.what();
      return rec;
    }
    rec.rectifier_ok = true;
    rec.bracket_holds = r.bracket_holds;
    const Channel psi(fam, ChannelKind::rectified(), &r);

    const MopnEstimate surrogate = estimate_mopn(psi, SchattenIndex::finite(1.05), mopn_options_for(plan, s));
    rec.surrogate_entropy = von_neumann_entropy(psd_spectrum(surrogate.witness_output, "moe_experiment"));
    const EntropyDescent polished = entropy_descent(psi, surrogate.witness_state, plan.max_iters);
    rec.min_entropy_estimate = std::min(rec.surrogate_entropy, polished.entropy);

    std::vector<CVec> inputs{surrogate.witness_state, polished.state};
    for (int j = 0; j < kMoeRandomProbes; ++j) {
      inputs.push_back(random_unit_vector(rec.n, SeedSpec{derive_seed(s, seed_tag::input), static_cast<std::uint64_t>(j)}));
    }
    rec.min_entropy_slack = std::numeric_limits<double>::infinity();
    for (const auto& x : inputs) {
      CMat b = psi.complementary_pure(x);
      b /= b.trace().real();
      rec.max_two_norm = std::max(rec.max_two_norm, frobenius_distance(b, centre));
      const double ent = von_neumann_entropy(psd_spectrum(b, "moe_experiment"));
      rec.min_entropy_slack = std::min(rec.min_entropy_slack, ent - quadratic_entropy_bound(b));
    }
    rec.probes = static_cast<int>(inputs.size());

    CMat pair = pair_output_on_bell(psi);
    pair /= pair.trace().real();
    rec.pair_entropy = von_neumann_entropy(psd_spectrum(pair, "moe_experiment"));
    rec.pair_overlap = bell_overlap(pair);
    return rec;
  };
  return parallel_map(plan.n_grid.size() * trials, task, threads);
}

// ---------------------------------------------------------------------------
// Optimal eigenvalue shape

struct ShapeResult {
  int k = 0;
  double q = 0.0;
  RVec lambda;                  ///< brute-force maximiser, sorted non-increasing, ||lambda||_q = 1
  double value = 0.0;           ///< f at the maximiser
  double two_level_value = 0.0; ///< k * limit_mopn(k, p)
  double tail_spread = 0.0;     ///< max - min of lambda_2..lambda_k
  bool two_level_shape = false; ///< tail_spread <= tolerance
  bool value_matches = false;   ///< |value - two_level_value| <= tolerance * max(1, value)
  bool asserted = false;        ///< q >= 3: shape required by the theory
  int grid_points = 0;
};

namespace detail {

inline double f_on_simplex(const std::vector<double>& mu, double q) {
  RVec lam(static_cast<Eigen::Index>(mu.size()));
  for (std::size_t i = 0; i < mu.size(); ++i) lam(static_cast<Eigen::Index>(i)) = std::pow(std::max(mu[i], 0.0), 1.0 / q);
  return f_limit(SpectralProfile::from_values(lam)).value;
}

inline void sorted_compositions(int total, int parts, int cap, std::vector<int>& cur,
                                const std::function<void(const std::vector<int>&)>& visit) {
  if (parts == 1) {
    if (total <= cap) {
      cur.push_back(total);
      visit(cur);
      cur.pop_back();
    }
    return;
  }
  for (int v = std::min(total, cap); v * parts >= total && v >= 0; --v) {
    cur.push_back(v);
    sorted_compositions(total - v, parts - 1, v, cur, visit);
    cur.pop_back();
  }
}

}  // namespace detail

/// Brute-force maximisation of f over lambda >= 0, ||lambda||_q = 1: every sorted
/// grid point of the simplex in mu = lambda^q, then pattern-search polish.
inline ShapeResult validate_optimal_shape(int k, double q, int resolution = 0, double tolerance = 1e-3) {
  if (k < 2 || k > 4) throw DomainError("validate_optimal_shape: k must lie in 2..4");
  if (!(q > 1.0)) throw DomainError("validate_optimal_shape: q must exceed 1");
  if (resolution <= 0) resolution = k == 2 ? 4000 : (k == 3 ? 800 : 200);
  ShapeResult res;
  res.k = k;
  res.q = q;
  std::vector<double> best_mu;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> cur;
  detail::sorted_compositions(resolution, k, resolution, cur, [&](const std::vector<int>& c) {
    std::vector<double> mu(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) mu[i] = static_cast<double>(c[i]) / resolution;
    const double v = detail::f_on_simplex(mu, q);
    ++res.grid_points;
    if (v > best) {
      best = v;
      best_mu = mu;
    }
  });
  for (double step = 1.0 / resolution; step > 1e-13; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          if (i == j || best_mu[j] < step) continue;
          std::vector<double> trial = best_mu;
          trial[i] += step;
          trial[j] -= step;
          const double v = detail::f_on_simplex(trial, q);
          if (v > best) {
            best = v;
            best_mu = trial;
            improved = true;
          }
        }
      }
    }
  }
  RVec lam(k);
  for (int i = 0; i < k; ++i) lam(i) = std::pow(std::max(best_mu[i], 0.0), 1.0 / q);
  res.lambda = SpectralProfile::from_values(lam).values;
  res.value = best;
  const SchattenIndex p = SchattenIndex::finite(q / (q - 1.0));
  res.two_level_value = k * limit_mopn(k, p).value;
  res.tail_spread = res.lambda.tail(k - 1).maxCoeff() - res.lambda.tail(k - 1).minCoeff();
  res.two_level_shape = res.tail_spread <= tolerance;
  res.value_matches = std::abs(res.value - res.two_level_value) <= tolerance * std::max(1.0, res.value);
  res.asserted = q >= 3.0;
  return res;
}

}  // namespace freecp
