#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "schmm/common.hpp"
#include "schmm/eval.hpp"
#include "schmm/model.hpp"
#include "schmm/trainer.hpp"

namespace schmm {

// Variational Dirichlet parameters over transition and emission rows — the
// natural-parameter state that stochastic VI updates directly.
struct SviState {
  Mat trans_dirichlet;  // K x K
  Mat emit_dirichlet;   // K x W

  void validate(const ModelConfig& cfg) const;  // positivity + shape
};

// Geometric-mean parameters exp(E[log theta]) etc. in log space:
// entry[k][k'] = digamma(lambda[k][k']) - digamma(sum_j lambda[k][j]).
// Rows are sub-normalized after exponentiation; the forward-pass scaling
// absorbs the deficit.
std::pair<Mat, Mat> expected_natural_params(const SviState& state,
                                            const ModelConfig& cfg);

// Posterior-mean point parameters (normalized Dirichlet means) with the
// stationary initial distribution, for held-out evaluation.
PointParams svi_point_estimates(const SviState& state, const ModelConfig& cfg);

// Prior plus exponential-noise counts of total mass init_scale * T per
// matrix, mirroring the collapsed trainer's initialization.
SviState init_svi_state(const ModelConfig& cfg, int64_t T, uint64_t seed,
                        double init_scale = 1.0);

// Window [n*L - b, n*L + L + b) clipped to [0, T), with the center span
// [n*L, n*L + L) marked. Offsets are into the training view.
struct BufferedWindow {
  int64_t begin = 0;         // window start
  int64_t end = 0;           // window end (exclusive)
  int64_t center_begin = 0;  // harvest start
  int64_t center_end = 0;    // harvest end (exclusive)
};
BufferedWindow buffered_subchain(int64_t T, int64_t n, int L, int b);

// One stochastic natural-gradient update from a minibatch of buffered
// subchains: forward-backward under expected natural params (initial
// distribution = stationary of the row-normalized transition factor),
// counts harvested from center spans only, scaled by T/(L-1) and N, averaged
// over the batch, then blended with weight rho toward prior + scaled counts.
void svi_step(SviState& state, std::span<const uint32_t> train,
              const std::vector<int64_t>& minibatch, const ModelConfig& cfg,
              double rho, int64_t T, int L, int64_t N, int b);

struct SviTrainerState {
  int64_t iteration = 0;
  SviState state;
  std::mt19937_64 rng;
};

SviTrainerState init_svi_trainer_state(const ModelConfig& mconf,
                                       const TrainConfig& tconf, int64_t T_train);

// Optimization loop mirroring train_scvi: same sampler, same step sizes, same
// evaluation cadence; only the update rule differs. guard_policy is ignored
// (buffering here means b extra observations on each side).
void train_svi(std::span<const uint32_t> train, std::span<const uint32_t> test,
               const ModelConfig& mconf, const TrainConfig& tconf, int b,
               SviTrainerState& state, MetricsTrace& trace,
               const MetricsSink& on_row = {});

}  // namespace schmm
