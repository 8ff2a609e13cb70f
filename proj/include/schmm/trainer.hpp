#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "schmm/common.hpp"
#include "schmm/eval.hpp"
#include "schmm/model.hpp"
#include "schmm/subchain.hpp"

namespace schmm {

// Source of the guard-variable beliefs that buffer each subchain:
//   uniform    - flat 1/K at both ends (buffering off)
//   stationary - stationary distribution of the current point-estimate
//                transition matrix, recomputed each iteration
//   stored     - each subchain's first/last marginals from the last time it
//                was inferred, read by its neighbors (buffering on)
enum class GuardPolicy { uniform, stationary, stored };

const char* guard_policy_name(GuardPolicy p);
GuardPolicy parse_guard_policy(const std::string& name);

struct TrainConfig {
  int L = 10;                // subchain length (>= 2: the update scales by 1/(L-1))
  int M = 100;               // minibatch size
  double kappa = 0.5;        // forgetting rate; rho_n = (1+n)^(-kappa)
  int64_t iterations = 5000;
  uint64_t seed = 1;
  GuardPolicy guard_policy = GuardPolicy::stored;
  double init_scale = 1.0;   // initial stats mass = init_scale * T

  // Divide each inner transition factor row by (E[C_{k.}] + K*alpha) before
  // message passing. With raw E[C]+alpha weights a path's weight picks up the
  // occupancy mass of every state it visits, so the most-occupied state soaks
  // up the whole chain (observable as state death even with exact batch
  // statistics). The normalized form is the default; the raw form remains
  // available for side-by-side study.
  bool normalize_inner_rows = true;
  int threads = 1;
  int64_t eval_every = 50;   // held-out evaluation cadence; 0 disables

  // kappa must lie in [0.5, 1]. Values in (0.5, 1] satisfy the usual
  // stochastic-approximation conditions; exactly 0.5 sits on the boundary
  // but is accepted (the experiments use it) and warned about at train time.
  void validate() const;
};

// rho_n = (1+n)^(-kappa)
double step_size(int64_t n, double kappa);

// Unbiased uniform draw from [0, n) consuming whole engine outputs, so resume
// restores sampling exactly (no distribution-object state involved).
uint64_t uniform_index(std::mt19937_64& rng, uint64_t n);

// Unit-rate exponential entries, then each matrix rescaled so its total mass
// is init_scale * T — the fixed point of the stochastic update.
GlobalStats init_global_stats(const ModelConfig& cfg, int64_t T, uint64_t seed,
                              double init_scale = 1.0);

// M iid uniform subchain ordinals in [0, N), with replacement.
std::vector<int64_t> sample_minibatch(std::mt19937_64& rng, int64_t N, int M);

// Online average toward the scaled minibatch mean:
//   trans <- (1-rho) trans + rho * (T/(L-1)) * mean(batch trans)
//   emit  <- (1-rho) emit  + rho * N * mean(batch emit)
void update_global(GlobalStats& stats, const std::vector<LocalStats>& batch,
                   double rho, int64_t T, int L, int64_t N);

// Per-subchain first/last-position marginals, serving as the neighbors' guard
// beliefs. Initialized uniform; 2*N*K doubles total.
struct BoundaryBeliefStore {
  int64_t N = 0;
  int K = 0;
  std::vector<double> first;
  std::vector<double> last;

  void init(int64_t N_, int K_);
  bool empty() const { return N == 0; }
  std::span<const double> first_of(int64_t n) const;
  std::span<const double> last_of(int64_t n) const;
  void update(int64_t n, const SubchainPosterior& post);
  void update_edges(int64_t n, std::span<const double> first_marginal,
                    std::span<const double> last_marginal);
};

// Everything the optimization loop mutates; checkpoints capture exactly this.
struct TrainerState {
  int64_t iteration = 0;
  GlobalStats stats;
  std::mt19937_64 rng;
  BoundaryBeliefStore store;  // populated only under the stored policy
};

TrainerState init_trainer_state(const ModelConfig& mconf, const TrainConfig& tconf,
                                int64_t T_train);

using MetricsSink = std::function<void(const MetricsRow&)>;

// Runs minibatch updates from state.iteration to tconf.iterations, appending
// held-out evaluations to trace (wall clock continues from the last row).
// Deterministic given the seed; worker results are combined in batch order,
// so thread count does not change the arithmetic.
void train_scvi(std::span<const uint32_t> train, std::span<const uint32_t> test,
                const ModelConfig& mconf, const TrainConfig& tconf,
                TrainerState& state, MetricsTrace& trace,
                const MetricsSink& on_row = {});

}  // namespace schmm
