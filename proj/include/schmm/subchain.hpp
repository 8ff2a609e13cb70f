#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "schmm/common.hpp"
#include "schmm/model.hpp"

namespace schmm {

// One window of the long observation sequence, plus beliefs over the two
// hidden guard variables that buffer it from its neighbors.  Tokens and
// guards are views: the stream / belief store keeps ownership.
struct Subchain {
  int64_t index = 0;
  std::span<const uint32_t> tokens;
  std::span<const double> left_guard;
  std::span<const double> right_guard;

  int length() const { return static_cast<int>(tokens.size()); }
  void validate(const ModelConfig& cfg) const;
};

// Scaled factor-to-variable messages for one subchain.  Positions follow the
// factor graph: variables z_0 (left guard), z_1..z_L (subchain), z_{L+1}
// (right guard).
//
//   fwd(l), l=1..L+1  = message from factor l into z_l
//   bwd(l), l=0..L    = message from factor l+1 into z_l
//
// Every stored message is rescaled to sum 1, with the log of the discarded
// magnitude recorded per step; the total over a full pass is the log
// normalizer of the joint.  The two boundary messages (fwd(L+1), bwd(0))
// are stored with the guard's own belief factor folded in, i.e. as the
// unnormalized guard marginal, evaluating the alpha/(K*q) edge terms in
// product form (q*E[C] + alpha/K) so zero-probability guard states never
// divide.
struct MessageSet {
  int K = 0;
  int L = 0;
  std::vector<double> forward;   // (L+1) x K, row l-1 holds fwd(l)
  std::vector<double> backward;  // (L+1) x K, row l holds bwd(l)
  std::vector<double> forward_log_scale;   // entry l-1 for fwd(l)
  std::vector<double> backward_log_scale;  // entry l for bwd(l)

  void resize(int K_, int L_);

  double* fwd(int l);
  const double* fwd(int l) const;
  double* bwd(int l);
  const double* bwd(int l) const;

  // Log normalizer of the subchain joint, accumulated over the forward pass.
  double log_evidence() const;
  // Same quantity from the backward pass; agrees with log_evidence() up to
  // roundoff and is only used as a consistency check.
  double log_evidence_backward() const;
};

// Variational posterior of one subchain: per-position state marginals and
// the L-1 inner pairwise tables (edges l=2..L; guard edges are excluded).
struct SubchainPosterior {
  int K = 0;
  int L = 0;
  std::vector<double> unary;     // L x K, row l-1 is q(z_l)
  std::vector<double> pairwise;  // (L-1) x K x K, block l-2 is q(z_{l-1}, z_l)
  double log_evidence = 0.0;

  const double* unary_at(int l) const;     // l in [1, L]
  const double* pairwise_at(int l) const;  // l in [2, L]
};

// Expected sufficient statistics harvested from one subchain posterior.
// trans sums the inner pairwise tables (total mass L-1); emit accumulates
// unary marginals per distinct observed token (total mass L), kept sparse
// because a subchain touches at most L of the W vocabulary columns.
struct LocalStats {
  Mat trans;
  std::vector<std::pair<uint32_t, std::vector<double>>> emit;  // token -> K-vector, sorted

  double trans_mass() const;
  double emit_mass() const;
};

// Emission factor columns phi_col(x_l) for every position, as an L x K
// buffer (row l-1).  Both passes and the pairwise tables reuse it.
std::vector<double> emission_columns(const Subchain& sub, const SurrogateContext& ctx);

void forward_pass(const Subchain& sub, const SurrogateContext& ctx, MessageSet& msgs);
void backward_pass(const Subchain& sub, const SurrogateContext& ctx, MessageSet& msgs);

// q(z_l) for l=1..L as an L x K matrix; row l-1 is the normalized product
// fwd(l) * bwd(l).
Mat unary_marginals(const MessageSet& msgs);

// Inner pairwise tables q(z_{l-1}, z_l) for l=2..L, each K x K and
// normalized.
std::vector<Mat> pairwise_marginals(const MessageSet& msgs, const Subchain& sub,
                                    const SurrogateContext& ctx);

// Pairwise marginals across the guard edges, q(z_0, z_1) and q(z_L, z_{L+1}).
// Not accumulated into LocalStats; exposed for consistency checks.
Mat edge_pairwise_left(const MessageSet& msgs, const Subchain& sub,
                       const SurrogateContext& ctx);
Mat edge_pairwise_right(const MessageSet& msgs, const Subchain& sub,
                        const SurrogateContext& ctx);

LocalStats local_stats(const SubchainPosterior& post, const Subchain& sub);

// Full pipeline for one subchain: both passes, marginals, local statistics.
std::pair<SubchainPosterior, LocalStats> infer_subchain(const Subchain& sub,
                                                        const SurrogateContext& ctx);
std::pair<SubchainPosterior, LocalStats> infer_subchain(const Subchain& sub,
                                                        const GlobalStats& stats,
                                                        const ModelConfig& cfg);

}  // namespace schmm
