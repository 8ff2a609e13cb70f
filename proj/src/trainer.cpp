#include "schmm/trainer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include "schmm/kernels.hpp"
#include "schmm/markov.hpp"

namespace schmm {

const char* guard_policy_name(GuardPolicy p) {
  switch (p) {
    case GuardPolicy::uniform: return "uniform";
    case GuardPolicy::stationary: return "stationary";
    case GuardPolicy::stored: return "stored";
  }
  return "?";
}

GuardPolicy parse_guard_policy(const std::string& name) {
  if (name == "uniform") return GuardPolicy::uniform;
  if (name == "stationary") return GuardPolicy::stationary;
  if (name == "stored") return GuardPolicy::stored;
  fail(ErrorKind::invalid_argument, "unknown guard policy: " + name);
}

void TrainConfig::validate() const {
  if (L < 2) fail(ErrorKind::invalid_argument, "TrainConfig: L must be >= 2");
  if (M < 1) fail(ErrorKind::invalid_argument, "TrainConfig: M must be >= 1");
  if (!(kappa >= 0.5 && kappa <= 1.0)) {
    fail(ErrorKind::invalid_argument,
         "TrainConfig: kappa must lie in [0.5, 1], got " + std::to_string(kappa));
  }
  if (iterations < 0) fail(ErrorKind::invalid_argument, "TrainConfig: iterations < 0");
  if (!(init_scale > 0.0)) {
    fail(ErrorKind::invalid_argument, "TrainConfig: init_scale must be > 0");
  }
  if (threads < 1) fail(ErrorKind::invalid_argument, "TrainConfig: threads must be >= 1");
  if (eval_every < 0) fail(ErrorKind::invalid_argument, "TrainConfig: eval_every < 0");
}

double step_size(int64_t n, double kappa) {
  if (n < 0) fail(ErrorKind::invalid_argument, "step_size: n must be >= 0");
  return std::pow(1.0 + static_cast<double>(n), -kappa);
}

uint64_t uniform_index(std::mt19937_64& rng, uint64_t n) {
  if (n == 0) fail(ErrorKind::invalid_argument, "uniform_index: empty range");
  // Lemire's multiply-then-reject method; unbiased and engine-only.
  __uint128_t m = static_cast<__uint128_t>(rng()) * n;
  auto lo = static_cast<uint64_t>(m);
  if (lo < n) {
    const uint64_t threshold = (0 - n) % n;
    while (lo < threshold) {
      m = static_cast<__uint128_t>(rng()) * n;
      lo = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

GlobalStats init_global_stats(const ModelConfig& cfg, int64_t T, uint64_t seed,
                              double init_scale) {
  cfg.validate();
  if (T < 1) fail(ErrorKind::invalid_argument, "init_global_stats: T must be >= 1");
  if (!(init_scale > 0.0)) {
    fail(ErrorKind::invalid_argument, "init_global_stats: init_scale must be > 0");
  }
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  GlobalStats stats(cfg.K, cfg.W);
  const double target = init_scale * static_cast<double>(T);
  for (Mat* m : {&stats.trans, &stats.emit}) {
    double total = 0.0;
    for (double& v : m->a) {
      v = expo(rng);
      total += v;
    }
    kernels::active().scale(m->data(), m->size(), target / total);
  }
  return stats;
}

std::vector<int64_t> sample_minibatch(std::mt19937_64& rng, int64_t N, int M) {
  if (N < 1) fail(ErrorKind::data, "sample_minibatch: no subchains to sample");
  if (M < 1) fail(ErrorKind::invalid_argument, "sample_minibatch: M must be >= 1");
  std::vector<int64_t> idx(M);
  for (int i = 0; i < M; ++i) {
    idx[i] = static_cast<int64_t>(uniform_index(rng, static_cast<uint64_t>(N)));
  }
  return idx;
}

void update_global(GlobalStats& stats, const std::vector<LocalStats>& batch,
                   double rho, int64_t T, int L, int64_t N) {
  if (batch.empty()) fail(ErrorKind::invalid_argument, "update_global: empty batch");
  if (!(rho > 0.0 && rho <= 1.0)) {
    fail(ErrorKind::invalid_argument, "update_global: rho must be in (0,1]");
  }
  if (L < 2) fail(ErrorKind::invalid_argument, "update_global: L must be >= 2");
  const int K = stats.trans.rows;
  const int W = stats.emit.cols;

  Mat acc_trans(K, K);
  Mat acc_emit(K, W);
  for (const auto& ls : batch) {
    if (ls.trans.rows != K || ls.trans.cols != K) {
      fail(ErrorKind::invalid_argument, "update_global: local trans shape mismatch");
    }
    for (size_t i = 0; i < acc_trans.size(); ++i) acc_trans.a[i] += ls.trans.a[i];
    for (const auto& [w, vec] : ls.emit) {
      if (w >= static_cast<uint32_t>(W) || vec.size() != static_cast<size_t>(K)) {
        fail(ErrorKind::invalid_argument, "update_global: local emit shape mismatch");
      }
      for (int k = 0; k < K; ++k) acc_emit(k, static_cast<int>(w)) += vec[k];
    }
  }

  const auto M = static_cast<double>(batch.size());
  const auto& ops = kernels::active();
  ops.axpby(stats.trans.data(), acc_trans.data(), stats.trans.size(), 1.0 - rho,
            rho * static_cast<double>(T) / (static_cast<double>(L - 1) * M));
  ops.axpby(stats.emit.data(), acc_emit.data(), stats.emit.size(), 1.0 - rho,
            rho * static_cast<double>(N) / M);
}

void BoundaryBeliefStore::init(int64_t N_, int K_) {
  N = N_;
  K = K_;
  first.assign(static_cast<size_t>(N) * K, 1.0 / K);
  last.assign(static_cast<size_t>(N) * K, 1.0 / K);
}

std::span<const double> BoundaryBeliefStore::first_of(int64_t n) const {
  if (n < 0 || n >= N) fail(ErrorKind::invalid_argument, "boundary store: bad subchain index");
  return {first.data() + static_cast<size_t>(n) * K, static_cast<size_t>(K)};
}

std::span<const double> BoundaryBeliefStore::last_of(int64_t n) const {
  if (n < 0 || n >= N) fail(ErrorKind::invalid_argument, "boundary store: bad subchain index");
  return {last.data() + static_cast<size_t>(n) * K, static_cast<size_t>(K)};
}

void BoundaryBeliefStore::update(int64_t n, const SubchainPosterior& post) {
  update_edges(n, {post.unary_at(1), static_cast<size_t>(post.K)},
               {post.unary_at(post.L), static_cast<size_t>(post.K)});
}

void BoundaryBeliefStore::update_edges(int64_t n, std::span<const double> first_marginal,
                                       std::span<const double> last_marginal) {
  if (n < 0 || n >= N) fail(ErrorKind::invalid_argument, "boundary store: bad subchain index");
  if (first_marginal.size() != static_cast<size_t>(K) ||
      last_marginal.size() != static_cast<size_t>(K)) {
    fail(ErrorKind::invalid_argument, "boundary store: marginal dimension mismatch");
  }
  std::copy(first_marginal.begin(), first_marginal.end(),
            first.begin() + static_cast<size_t>(n) * K);
  std::copy(last_marginal.begin(), last_marginal.end(),
            last.begin() + static_cast<size_t>(n) * K);
}

TrainerState init_trainer_state(const ModelConfig& mconf, const TrainConfig& tconf,
                                int64_t T_train) {
  mconf.validate();
  tconf.validate();
  TrainerState state;
  state.iteration = 0;
  state.stats = init_global_stats(mconf, T_train, tconf.seed, tconf.init_scale);
  state.rng.seed(tconf.seed);
  if (tconf.guard_policy == GuardPolicy::stored) {
    const int64_t N = T_train / tconf.L;
    if (N < 1) fail(ErrorKind::data, "training stream shorter than one subchain");
    state.store.init(N, mconf.K);
  }
  return state;
}

namespace {

struct InferResult {
  LocalStats stats;
  std::vector<double> first;  // q(z_1)
  std::vector<double> last;   // q(z_L)
};

InferResult infer_one(const Subchain& sub, const SurrogateContext& ctx) {
  auto [post, ls] = infer_subchain(sub, ctx);
  InferResult r;
  r.stats = std::move(ls);
  r.first.assign(post.unary_at(1), post.unary_at(1) + post.K);
  r.last.assign(post.unary_at(post.L), post.unary_at(post.L) + post.K);
  return r;
}

}  // namespace

void train_scvi(std::span<const uint32_t> train, std::span<const uint32_t> test,
                const ModelConfig& mconf, const TrainConfig& tconf,
                TrainerState& state, MetricsTrace& trace, const MetricsSink& on_row) {
  mconf.validate();
  tconf.validate();
  if (tconf.kappa == 0.5) {
    static bool warned = false;
    if (!warned) {
      warned = true;
      std::fprintf(stderr,
                   "warning: kappa=0.5 is the boundary of the step-size conditions; "
                   "convergence guarantees are marginal\n");
    }
  }

  const auto T = static_cast<int64_t>(train.size());
  const int64_t N = T / tconf.L;
  if (N < 1) fail(ErrorKind::data, "training stream shorter than one subchain");
  if (tconf.guard_policy == GuardPolicy::stored &&
      (state.store.N != N || state.store.K != mconf.K)) {
    fail(ErrorKind::invalid_argument, "boundary store does not match stream/config");
  }

  const std::vector<double> uniform_guard(mconf.K, 1.0 / mconf.K);
  const double wall_offset = trace.empty() ? 0.0 : trace.back().wall_seconds;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  auto evaluate = [&](int64_t iter, double rho) {
    if (test.empty()) return;
    PointParams params = point_estimates(state.stats, mconf);
    MetricsRow row{iter, wall_offset + elapsed(), rho,
                   predictive_log_likelihood(params, test)};
    trace.push_back(row);
    if (on_row) on_row(row);
  };

  if (tconf.eval_every > 0 && state.iteration == 0) evaluate(0, 0.0);

  std::vector<double> stationary_guard;
  std::vector<int64_t> indices;
  std::vector<InferResult> results;

  for (int64_t n = state.iteration; n < tconf.iterations; ++n) {
    const double rho = step_size(n, tconf.kappa);
    indices = sample_minibatch(state.rng, N, tconf.M);

    SurrogateContext ctx(state.stats, mconf, tconf.normalize_inner_rows);
    if (tconf.guard_policy == GuardPolicy::stationary) {
      stationary_guard = stationary_distribution(
          surrogate_theta_inner(state.stats, mconf, /*normalize_rows=*/true));
    }

    auto guard_left = [&](int64_t sc) -> std::span<const double> {
      switch (tconf.guard_policy) {
        case GuardPolicy::uniform: return uniform_guard;
        case GuardPolicy::stationary: return stationary_guard;
        case GuardPolicy::stored:
          return sc == 0 ? std::span<const double>(uniform_guard)
                         : state.store.last_of(sc - 1);
      }
      return uniform_guard;
    };
    auto guard_right = [&](int64_t sc) -> std::span<const double> {
      switch (tconf.guard_policy) {
        case GuardPolicy::uniform: return uniform_guard;
        case GuardPolicy::stationary: return stationary_guard;
        case GuardPolicy::stored:
          return sc == N - 1 ? std::span<const double>(uniform_guard)
                             : state.store.first_of(sc + 1);
      }
      return uniform_guard;
    };

    auto subchain_at = [&](int64_t sc) {
      return Subchain{sc, train.subspan(static_cast<size_t>(sc) * tconf.L, tconf.L),
                      guard_left(sc), guard_right(sc)};
    };

    results.assign(tconf.M, {});
    try {
      if (tconf.threads == 1) {
        for (int i = 0; i < tconf.M; ++i) {
          results[i] = infer_one(subchain_at(indices[i]), ctx);
        }
      } else {
        // Workers pull batch slots; no writes to shared state happen until
        // after the join, and results are merged in slot order, so the
        // arithmetic is identical to the serial path.
        std::atomic<int> cursor{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(tconf.threads);
        for (int w = 0; w < tconf.threads; ++w) {
          pool.emplace_back([&, w] {
            try {
              for (int i = cursor.fetch_add(1); i < tconf.M; i = cursor.fetch_add(1)) {
                results[i] = infer_one(subchain_at(indices[i]), ctx);
              }
            } catch (...) {
              errors[w] = std::current_exception();
            }
          });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
          if (e) std::rethrow_exception(e);
        }
      }
    } catch (const Error& e) {
      fail(e.kind(), "iteration " + std::to_string(n) + ": " + e.what());
    }

    std::vector<LocalStats> batch;
    batch.reserve(results.size());
    for (auto& r : results) batch.push_back(std::move(r.stats));
    update_global(state.stats, batch, rho, T, tconf.L, N);

    const double tt = state.stats.trans_total();
    const double et = state.stats.emit_total();
    if (!std::isfinite(tt) || !std::isfinite(et)) {
      fail(ErrorKind::numerical,
           "non-finite global statistics at iteration " + std::to_string(n));
    }

    if (tconf.guard_policy == GuardPolicy::stored) {
      for (size_t i = 0; i < results.size(); ++i) {
        state.store.update_edges(indices[i], results[i].first, results[i].last);
      }
    }

    state.iteration = n + 1;
    if (tconf.eval_every > 0 &&
        ((n + 1) % tconf.eval_every == 0 || n + 1 == tconf.iterations)) {
      evaluate(n + 1, rho);
    }
  }
}

}  // namespace schmm
