#pragma once

#include <span>
#include <vector>

#include "schmm/common.hpp"

namespace schmm {

struct ModelConfig {
  int K = 12;          // hidden states
  int W = 2;           // vocabulary size
  double alpha = 0.1;  // symmetric transition Dirichlet concentration
  double beta = 0.1;   // symmetric emission Dirichlet concentration

  void validate() const;
};

// Whole-chain expected transition counts E[C] (K x K) and expected emission
// statistics E[t] (K x W). Row/column reductions are computed on demand.
struct GlobalStats {
  Mat trans;
  Mat emit;

  GlobalStats() = default;
  GlobalStats(int K, int W) : trans(K, K), emit(K, W) {}

  std::vector<double> trans_row_sums() const;  // E[C_{k.}]
  std::vector<double> trans_col_sums() const;  // E[C_{.k}]
  double trans_total() const;
  double emit_total() const;

  // Throws ErrorKind::numerical on any non-finite or negative entry.
  void validate(const ModelConfig& cfg) const;
};

// Point-estimated HMM parameters used for held-out evaluation: row-stochastic
// transition and emission matrices plus the starting distribution.
struct PointParams {
  Mat theta;                 // K x K
  Mat phi;                   // K x W
  std::vector<double> init;  // K
};

// Inner transition factor weights: theta_hat[k][k'] = E[C_{kk'}] + alpha,
// unnormalized. normalize_rows divides each row by (E[C_{k.}] + K*alpha).
Mat surrogate_theta_inner(const GlobalStats& stats, const ModelConfig& cfg,
                          bool normalize_rows = false);

// Collapsed categorical predictive:
// phi_hat[k][w] = (E[t_{k,w}] + beta) / (E[C_{.k}] + W*beta).
Mat surrogate_phi(const GlobalStats& stats, const ModelConfig& cfg);

// Left edge factor weights, with the alpha/(K q) terms summed analytically:
// v[z1] = sum_z0 belief[z0]*E[C_{z0,z1}] + alpha.
std::vector<double> edge_in_weight(const GlobalStats& stats,
                                   std::span<const double> left_belief,
                                   const ModelConfig& cfg);

// Right edge factor weights:
// v[zL] = (sum_z' belief[z']*E[C_{zL,z'}] + alpha) / (E[C_{zL,.}] + K*alpha).
std::vector<double> edge_out_weight(const GlobalStats& stats,
                                    std::span<const double> right_belief,
                                    const ModelConfig& cfg);

// Per-iteration snapshot of the surrogate quantities. The emission factor is
// exposed column-wise so the trainer never materializes the K x W phi_hat
// matrix; everything else is precomputed once per snapshot.
class SurrogateContext {
 public:
  SurrogateContext(const GlobalStats& stats, const ModelConfig& cfg,
                   bool normalize_inner_rows = false);

  int K() const { return cfg_.K; }
  int W() const { return cfg_.W; }
  double alpha() const { return cfg_.alpha; }
  const ModelConfig& config() const { return cfg_; }
  const Mat& theta_inner() const { return theta_inner_; }
  const GlobalStats& stats() const { return *stats_; }

  // out[k] = (E[t_{k,w}] + beta) / (E[C_{.k}] + W*beta)
  void phi_col(uint32_t w, double* out) const;

  // Same collapsed edge weights as the free functions, writing into out.
  void edge_in(std::span<const double> left_belief, double* out) const;
  void edge_out(std::span<const double> right_belief, double* out) const;

  // 1 / (E[C_{k.}] + K*alpha), the right edge factor denominator.
  const std::vector<double>& out_den_inv() const { return out_den_inv_; }

 private:
  const GlobalStats* stats_;
  ModelConfig cfg_;
  Mat theta_inner_;
  std::vector<double> col_den_inv_;  // 1 / (E[C_{.k}] + W*beta)
  std::vector<double> out_den_inv_;
};

}  // namespace schmm
