#include "schmm/subchain.hpp"

#include <cmath>
#include <map>

#include "schmm/kernels.hpp"

namespace schmm {

void Subchain::validate(const ModelConfig& cfg) const {
  if (tokens.empty()) {
    fail(ErrorKind::invalid_argument, "subchain must contain at least one token");
  }
  for (uint32_t w : tokens) {
    if (w >= static_cast<uint32_t>(cfg.W)) {
      fail(ErrorKind::invalid_argument,
           "subchain token " + std::to_string(w) + " out of vocabulary (W=" +
               std::to_string(cfg.W) + ")");
    }
  }
  if (left_guard.size() != static_cast<size_t>(cfg.K) ||
      right_guard.size() != static_cast<size_t>(cfg.K)) {
    fail(ErrorKind::invalid_argument, "guard belief has wrong dimension");
  }
  require_simplex(left_guard, "left guard belief");
  require_simplex(right_guard, "right guard belief");
}

void MessageSet::resize(int K_, int L_) {
  K = K_;
  L = L_;
  forward.assign(static_cast<size_t>(L + 1) * K, 0.0);
  backward.assign(static_cast<size_t>(L + 1) * K, 0.0);
  forward_log_scale.assign(L + 1, 0.0);
  backward_log_scale.assign(L + 1, 0.0);
}

double* MessageSet::fwd(int l) {
  return forward.data() + static_cast<size_t>(l - 1) * K;
}
const double* MessageSet::fwd(int l) const {
  return forward.data() + static_cast<size_t>(l - 1) * K;
}
double* MessageSet::bwd(int l) {
  return backward.data() + static_cast<size_t>(l) * K;
}
const double* MessageSet::bwd(int l) const {
  return backward.data() + static_cast<size_t>(l) * K;
}

double MessageSet::log_evidence() const {
  return kernels::active().sum(forward_log_scale.data(), forward_log_scale.size());
}

double MessageSet::log_evidence_backward() const {
  return kernels::active().sum(backward_log_scale.data(), backward_log_scale.size());
}

const double* SubchainPosterior::unary_at(int l) const {
  return unary.data() + static_cast<size_t>(l - 1) * K;
}

const double* SubchainPosterior::pairwise_at(int l) const {
  return pairwise.data() + static_cast<size_t>(l - 2) * K * K;
}

double LocalStats::trans_mass() const {
  return kernels::active().sum(trans.data(), trans.size());
}

double LocalStats::emit_mass() const {
  double m = 0.0;
  for (const auto& [w, vec] : emit) {
    m += kernels::active().sum(vec.data(), vec.size());
  }
  return m;
}

std::vector<double> emission_columns(const Subchain& sub, const SurrogateContext& ctx) {
  const int K = ctx.K();
  const int L = sub.length();
  std::vector<double> cols(static_cast<size_t>(L) * K);
  for (int l = 1; l <= L; ++l) {
    ctx.phi_col(sub.tokens[l - 1], cols.data() + static_cast<size_t>(l - 1) * K);
  }
  return cols;
}

namespace {

// fwd(L+1)[z'] = sum_z fwd(L)[z] * (q_R(z') E[C_{z,z'}] + a/K) / (E[C_{z,.}] + Ka)
// expanded so the right-guard belief multiplies E[C] before any division.
void fold_right_guard(const SurrogateContext& ctx, const double* fwd_L,
                      std::span<const double> right_guard, double* out) {
  const int K = ctx.K();
  const auto& ops = kernels::active();
  std::vector<double> t(K);
  for (int k = 0; k < K; ++k) t[k] = fwd_L[k] * ctx.out_den_inv()[k];
  ops.vec_mat(t.data(), ctx.stats().trans.data(), K, out);
  const double spill = ops.sum(t.data(), K) * ctx.alpha() / K;
  for (int k = 0; k < K; ++k) out[k] = right_guard[k] * out[k] + spill;
}

// bwd(0)[z0] = sum_z1 (q_L(z0) E[C_{z0,z1}] + a/K) * phi_col(x_1)[z1] * bwd(1)[z1]
void fold_left_guard(const SurrogateContext& ctx, const double* bwd_1,
                     const double* emit_col_1, std::span<const double> left_guard,
                     double* out) {
  const int K = ctx.K();
  const auto& ops = kernels::active();
  std::vector<double> g(K);
  for (int k = 0; k < K; ++k) g[k] = emit_col_1[k] * bwd_1[k];
  ops.mat_vec(ctx.stats().trans.data(), g.data(), K, out);
  const double spill = ops.sum(g.data(), K) * ctx.alpha() / K;
  for (int k = 0; k < K; ++k) out[k] = left_guard[k] * out[k] + spill;
}

void forward_pass_impl(const Subchain& sub, const SurrogateContext& ctx,
                       std::span<const double> emit_cols, MessageSet& msgs) {
  const int K = ctx.K();
  const int L = sub.length();
  msgs.resize(K, L);
  const auto& ops = kernels::active();

  ctx.edge_in(sub.left_guard, msgs.fwd(1));
  ops.mul(msgs.fwd(1), emit_cols.data(), K);
  msgs.forward_log_scale[0] = std::log(kernels::normalize(msgs.fwd(1), K));

  for (int l = 2; l <= L; ++l) {
    double* cur = msgs.fwd(l);
    ops.vec_mat(msgs.fwd(l - 1), ctx.theta_inner().data(), K, cur);
    ops.mul(cur, emit_cols.data() + static_cast<size_t>(l - 1) * K, K);
    msgs.forward_log_scale[l - 1] = std::log(kernels::normalize(cur, K));
  }

  fold_right_guard(ctx, msgs.fwd(L), sub.right_guard, msgs.fwd(L + 1));
  msgs.forward_log_scale[L] = std::log(kernels::normalize(msgs.fwd(L + 1), K));
}

void backward_pass_impl(const Subchain& sub, const SurrogateContext& ctx,
                        std::span<const double> emit_cols, MessageSet& msgs) {
  const int K = ctx.K();
  const int L = sub.length();
  if (msgs.K != K || msgs.L != L) msgs.resize(K, L);
  const auto& ops = kernels::active();

  ctx.edge_out(sub.right_guard, msgs.bwd(L));
  msgs.backward_log_scale[L] = std::log(kernels::normalize(msgs.bwd(L), K));

  std::vector<double> g(K);
  for (int l = L - 1; l >= 1; --l) {
    const double* ecol = emit_cols.data() + static_cast<size_t>(l) * K;  // x_{l+1}
    for (int k = 0; k < K; ++k) g[k] = ecol[k] * msgs.bwd(l + 1)[k];
    ops.mat_vec(ctx.theta_inner().data(), g.data(), K, msgs.bwd(l));
    msgs.backward_log_scale[l] = std::log(kernels::normalize(msgs.bwd(l), K));
  }

  fold_left_guard(ctx, msgs.bwd(1), emit_cols.data(), sub.left_guard, msgs.bwd(0));
  msgs.backward_log_scale[0] = std::log(kernels::normalize(msgs.bwd(0), K));
}

void pairwise_table(const MessageSet& msgs, const SurrogateContext& ctx,
                    std::span<const double> emit_cols, int l, double* table) {
  const int K = msgs.K;
  const auto& ops = kernels::active();
  std::vector<double> right(K);
  const double* ecol = emit_cols.data() + static_cast<size_t>(l - 1) * K;
  for (int k = 0; k < K; ++k) right[k] = ecol[k] * msgs.bwd(l)[k];
  ops.scaled_outer(msgs.fwd(l - 1), ctx.theta_inner().data(), right.data(), K, table);
  kernels::normalize(table, static_cast<size_t>(K) * K);
}

}  // namespace

void forward_pass(const Subchain& sub, const SurrogateContext& ctx, MessageSet& msgs) {
  forward_pass_impl(sub, ctx, emission_columns(sub, ctx), msgs);
}

void backward_pass(const Subchain& sub, const SurrogateContext& ctx, MessageSet& msgs) {
  backward_pass_impl(sub, ctx, emission_columns(sub, ctx), msgs);
}

Mat unary_marginals(const MessageSet& msgs) {
  const int K = msgs.K;
  Mat u(msgs.L, K);
  for (int l = 1; l <= msgs.L; ++l) {
    double* row = u.row(l - 1);
    const double* f = msgs.fwd(l);
    const double* b = msgs.bwd(l);
    for (int k = 0; k < K; ++k) row[k] = f[k] * b[k];
    kernels::normalize(row, K);
  }
  return u;
}

std::vector<Mat> pairwise_marginals(const MessageSet& msgs, const Subchain& sub,
                                    const SurrogateContext& ctx) {
  std::vector<double> cols = emission_columns(sub, ctx);
  std::vector<Mat> tables;
  tables.reserve(msgs.L > 0 ? msgs.L - 1 : 0);
  for (int l = 2; l <= msgs.L; ++l) {
    Mat t(msgs.K, msgs.K);
    pairwise_table(msgs, ctx, cols, l, t.data());
    tables.push_back(std::move(t));
  }
  return tables;
}

Mat edge_pairwise_left(const MessageSet& msgs, const Subchain& sub,
                       const SurrogateContext& ctx) {
  const int K = msgs.K;
  std::vector<double> ecol(K);
  ctx.phi_col(sub.tokens[0], ecol.data());
  // q(z0, z1) ~ (q_L(z0) E[C] + a/K) * phi_col(x_1)[z1] * bwd(1)[z1]
  Mat t(K, K);
  const double spill = ctx.alpha() / K;
  for (int i = 0; i < K; ++i) {
    const double* c = ctx.stats().trans.row(i);
    for (int j = 0; j < K; ++j) {
      t(i, j) = (sub.left_guard[i] * c[j] + spill) * ecol[j] * msgs.bwd(1)[j];
    }
  }
  kernels::normalize(t.data(), t.size());
  return t;
}

Mat edge_pairwise_right(const MessageSet& msgs, const Subchain& sub,
                        const SurrogateContext& ctx) {
  const int K = msgs.K;
  const int L = msgs.L;
  // q(zL, z') ~ fwd(L)[zL] * (q_R(z') E[C] + a/K) / (E[C_{zL,.}] + Ka)
  Mat t(K, K);
  const double spill = ctx.alpha() / K;
  for (int i = 0; i < K; ++i) {
    const double* c = ctx.stats().trans.row(i);
    const double scale = msgs.fwd(L)[i] * ctx.out_den_inv()[i];
    for (int j = 0; j < K; ++j) {
      t(i, j) = scale * (sub.right_guard[j] * c[j] + spill);
    }
  }
  kernels::normalize(t.data(), t.size());
  return t;
}

LocalStats local_stats(const SubchainPosterior& post, const Subchain& sub) {
  const int K = post.K;
  const int L = post.L;
  LocalStats out{Mat(K, K), {}};
  for (int l = 2; l <= L; ++l) {
    const double* tab = post.pairwise_at(l);
    for (int i = 0; i < K * K; ++i) out.trans.a[i] += tab[i];
  }
  std::map<uint32_t, std::vector<double>> acc;
  for (int l = 1; l <= L; ++l) {
    auto& vec = acc[sub.tokens[l - 1]];
    if (vec.empty()) vec.assign(K, 0.0);
    const double* u = post.unary_at(l);
    for (int k = 0; k < K; ++k) vec[k] += u[k];
  }
  out.emit.reserve(acc.size());
  for (auto& [w, vec] : acc) out.emit.emplace_back(w, std::move(vec));
  return out;
}

std::pair<SubchainPosterior, LocalStats> infer_subchain(const Subchain& sub,
                                                        const SurrogateContext& ctx) {
  sub.validate(ctx.config());
  const int K = ctx.K();
  const int L = sub.length();

  std::vector<double> cols = emission_columns(sub, ctx);
  MessageSet msgs;
  forward_pass_impl(sub, ctx, cols, msgs);
  backward_pass_impl(sub, ctx, cols, msgs);

  SubchainPosterior post;
  post.K = K;
  post.L = L;
  post.log_evidence = msgs.log_evidence();
  Mat u = unary_marginals(msgs);
  post.unary = std::move(u.a);
  post.pairwise.resize(static_cast<size_t>(L - 1) * K * K);
  for (int l = 2; l <= L; ++l) {
    pairwise_table(msgs, ctx, cols, l,
                   post.pairwise.data() + static_cast<size_t>(l - 2) * K * K);
  }

  LocalStats stats = local_stats(post, sub);
  return {std::move(post), std::move(stats)};
}

std::pair<SubchainPosterior, LocalStats> infer_subchain(const Subchain& sub,
                                                        const GlobalStats& stats,
                                                        const ModelConfig& cfg) {
  SurrogateContext ctx(stats, cfg);
  return infer_subchain(sub, ctx);
}

}  // namespace schmm
