#include "schmm/model.hpp"

#include <cmath>

#include "schmm/kernels.hpp"

namespace schmm {

void ModelConfig::validate() const {
  if (K < 2) fail(ErrorKind::invalid_argument, "ModelConfig: K must be >= 2");
  if (W < 2) fail(ErrorKind::invalid_argument, "ModelConfig: W must be >= 2");
  if (!(alpha > 0.0)) fail(ErrorKind::invalid_argument, "ModelConfig: alpha must be > 0");
  if (!(beta > 0.0)) fail(ErrorKind::invalid_argument, "ModelConfig: beta must be > 0");
}

std::vector<double> GlobalStats::trans_row_sums() const {
  std::vector<double> s(trans.rows);
  for (int k = 0; k < trans.rows; ++k) {
    s[k] = kernels::active().sum(trans.row(k), trans.cols);
  }
  return s;
}

std::vector<double> GlobalStats::trans_col_sums() const {
  std::vector<double> s(trans.cols, 0.0);
  for (int k = 0; k < trans.rows; ++k) {
    const double* row = trans.row(k);
    for (int j = 0; j < trans.cols; ++j) s[j] += row[j];
  }
  return s;
}

double GlobalStats::trans_total() const {
  return kernels::active().sum(trans.data(), trans.size());
}

double GlobalStats::emit_total() const {
  return kernels::active().sum(emit.data(), emit.size());
}

void GlobalStats::validate(const ModelConfig& cfg) const {
  if (trans.rows != cfg.K || trans.cols != cfg.K || emit.rows != cfg.K ||
      emit.cols != cfg.W) {
    fail(ErrorKind::invalid_argument, "GlobalStats: shape mismatch with config");
  }
  for (double v : trans.a) {
    if (!std::isfinite(v) || v < 0.0) {
      fail(ErrorKind::numerical, "invalid stats: transition entry " + std::to_string(v));
    }
  }
  for (double v : emit.a) {
    if (!std::isfinite(v) || v < 0.0) {
      fail(ErrorKind::numerical, "invalid stats: emission entry " + std::to_string(v));
    }
  }
}

Mat surrogate_theta_inner(const GlobalStats& stats, const ModelConfig& cfg,
                          bool normalize_rows) {
  stats.validate(cfg);
  Mat th(cfg.K, cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    const double* c = stats.trans.row(k);
    double* t = th.row(k);
    for (int j = 0; j < cfg.K; ++j) t[j] = c[j] + cfg.alpha;
    if (normalize_rows) {
      double den = kernels::active().sum(c, cfg.K) + cfg.K * cfg.alpha;
      kernels::active().scale(t, cfg.K, 1.0 / den);
    }
  }
  return th;
}

Mat surrogate_phi(const GlobalStats& stats, const ModelConfig& cfg) {
  stats.validate(cfg);
  std::vector<double> col = stats.trans_col_sums();
  Mat phi(cfg.K, cfg.W);
  for (int k = 0; k < cfg.K; ++k) {
    const double inv = 1.0 / (col[k] + cfg.W * cfg.beta);
    const double* e = stats.emit.row(k);
    double* p = phi.row(k);
    for (int w = 0; w < cfg.W; ++w) p[w] = (e[w] + cfg.beta) * inv;
  }
  return phi;
}

std::vector<double> edge_in_weight(const GlobalStats& stats,
                                   std::span<const double> left_belief,
                                   const ModelConfig& cfg) {
  stats.validate(cfg);
  SurrogateContext ctx(stats, cfg);
  std::vector<double> v(cfg.K);
  ctx.edge_in(left_belief, v.data());
  return v;
}

std::vector<double> edge_out_weight(const GlobalStats& stats,
                                    std::span<const double> right_belief,
                                    const ModelConfig& cfg) {
  stats.validate(cfg);
  SurrogateContext ctx(stats, cfg);
  std::vector<double> v(cfg.K);
  ctx.edge_out(right_belief, v.data());
  return v;
}

SurrogateContext::SurrogateContext(const GlobalStats& stats,
                                   const ModelConfig& cfg,
                                   bool normalize_inner_rows)
    : stats_(&stats), cfg_(cfg) {
  cfg.validate();
  stats.validate(cfg);
  theta_inner_ = surrogate_theta_inner(stats, cfg, normalize_inner_rows);

  std::vector<double> col = stats.trans_col_sums();
  col_den_inv_.resize(cfg.K);
  for (int k = 0; k < cfg.K; ++k) col_den_inv_[k] = 1.0 / (col[k] + cfg.W * cfg.beta);

  std::vector<double> row = stats.trans_row_sums();
  out_den_inv_.resize(cfg.K);
  for (int k = 0; k < cfg.K; ++k) out_den_inv_[k] = 1.0 / (row[k] + cfg.K * cfg.alpha);
}

void SurrogateContext::phi_col(uint32_t w, double* out) const {
  if (w >= static_cast<uint32_t>(cfg_.W)) {
    fail(ErrorKind::invalid_argument, "token id " + std::to_string(w) + " >= W");
  }
  const double* e = stats_->emit.data() + w;
  for (int k = 0; k < cfg_.K; ++k) {
    out[k] = (e[static_cast<size_t>(k) * cfg_.W] + cfg_.beta) * col_den_inv_[k];
  }
}

void SurrogateContext::edge_in(std::span<const double> left_belief,
                               double* out) const {
  require_simplex(left_belief, "left guard belief");
  kernels::active().vec_mat(left_belief.data(), stats_->trans.data(), cfg_.K, out);
  for (int k = 0; k < cfg_.K; ++k) out[k] += cfg_.alpha;
}

void SurrogateContext::edge_out(std::span<const double> right_belief,
                                double* out) const {
  require_simplex(right_belief, "right guard belief");
  kernels::active().mat_vec(stats_->trans.data(), right_belief.data(), cfg_.K, out);
  for (int k = 0; k < cfg_.K; ++k) out[k] = (out[k] + cfg_.alpha) * out_den_inv_[k];
}

}  // namespace schmm
