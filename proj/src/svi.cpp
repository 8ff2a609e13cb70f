#include "schmm/svi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <boost/math/special_functions/digamma.hpp>

#include "schmm/kernels.hpp"
#include "schmm/markov.hpp"

namespace schmm {

void SviState::validate(const ModelConfig& cfg) const {
  if (trans_dirichlet.rows != cfg.K || trans_dirichlet.cols != cfg.K ||
      emit_dirichlet.rows != cfg.K || emit_dirichlet.cols != cfg.W) {
    fail(ErrorKind::invalid_argument, "SviState: shape mismatch with config");
  }
  for (const Mat* m : {&trans_dirichlet, &emit_dirichlet}) {
    for (double v : m->a) {
      if (!std::isfinite(v) || v <= 0.0) {
        fail(ErrorKind::numerical,
             "SviState: nonpositive Dirichlet parameter " + std::to_string(v));
      }
    }
  }
}

namespace {

Mat digamma_rows(const Mat& lambda) {
  Mat out(lambda.rows, lambda.cols);
  for (int k = 0; k < lambda.rows; ++k) {
    const double* row = lambda.row(k);
    const double psi_total =
        boost::math::digamma(kernels::active().sum(row, lambda.cols));
    double* o = out.row(k);
    for (int j = 0; j < lambda.cols; ++j) {
      o[j] = boost::math::digamma(row[j]) - psi_total;
    }
  }
  return out;
}

Mat exp_mat(const Mat& m) {
  Mat out(m.rows, m.cols);
  for (size_t i = 0; i < m.size(); ++i) out.a[i] = std::exp(m.a[i]);
  return out;
}

Mat row_normalized(const Mat& m) {
  Mat out = m;
  for (int k = 0; k < out.rows; ++k) kernels::normalize(out.row(k), out.cols);
  return out;
}

}  // namespace

std::pair<Mat, Mat> expected_natural_params(const SviState& state,
                                            const ModelConfig& cfg) {
  state.validate(cfg);
  return {digamma_rows(state.trans_dirichlet), digamma_rows(state.emit_dirichlet)};
}

PointParams svi_point_estimates(const SviState& state, const ModelConfig& cfg) {
  state.validate(cfg);
  PointParams p{row_normalized(state.trans_dirichlet),
                row_normalized(state.emit_dirichlet),
                {}};
  p.init = stationary_distribution(p.theta);
  return p;
}

SviState init_svi_state(const ModelConfig& cfg, int64_t T, uint64_t seed,
                        double init_scale) {
  GlobalStats noise = init_global_stats(cfg, T, seed, init_scale);
  SviState state{std::move(noise.trans), std::move(noise.emit)};
  for (double& v : state.trans_dirichlet.a) v += cfg.alpha;
  for (double& v : state.emit_dirichlet.a) v += cfg.beta;
  return state;
}

BufferedWindow buffered_subchain(int64_t T, int64_t n, int L, int b) {
  if (b < 0) fail(ErrorKind::invalid_argument, "buffer length must be >= 0");
  BufferedWindow w;
  w.center_begin = n * L;
  w.center_end = w.center_begin + L;
  if (n < 0 || w.center_end > T) {
    fail(ErrorKind::invalid_argument, "subchain index out of range");
  }
  w.begin = std::max<int64_t>(0, w.center_begin - b);
  w.end = std::min<int64_t>(T, w.center_end + b);
  return w;
}

void svi_step(SviState& state, std::span<const uint32_t> train,
              const std::vector<int64_t>& minibatch, const ModelConfig& cfg,
              double rho, int64_t T, int L, int64_t N, int b) {
  if (minibatch.empty()) fail(ErrorKind::invalid_argument, "svi_step: empty batch");
  if (!(rho > 0.0 && rho <= 1.0)) {
    fail(ErrorKind::invalid_argument, "svi_step: rho must be in (0,1]");
  }
  const int K = cfg.K;
  const int W = cfg.W;
  const auto& ops = kernels::active();

  auto [log_trans, log_emit] = expected_natural_params(state, cfg);
  const Mat P = exp_mat(log_trans);   // sub-normalized transition factor
  const Mat E = exp_mat(log_emit);    // sub-normalized emission factor
  const std::vector<double> pi = stationary_distribution(row_normalized(P));

  auto emission = [&](uint32_t w, double* out) {
    if (w >= static_cast<uint32_t>(W)) {
      fail(ErrorKind::data, "token " + std::to_string(w) + " outside vocabulary");
    }
    const double* col = E.data() + w;
    for (int k = 0; k < K; ++k) out[k] = col[static_cast<size_t>(k) * W];
  };

  Mat acc_trans(K, K);
  Mat acc_emit(K, W);
  std::vector<double> fwd;  // window-length stack of scaled forward messages
  std::vector<double> b_cur(K), b_next(K), g(K), ecol(K);
  Mat xi(K, K);

  for (int64_t n : minibatch) {
    const BufferedWindow win = buffered_subchain(T, n, L, b);
    const auto nw = static_cast<size_t>(win.end - win.begin);
    const std::span<const uint32_t> toks = train.subspan(win.begin, nw);
    const int64_t c0 = win.center_begin - win.begin;
    const int64_t c1 = win.center_end - win.begin;

    fwd.assign(nw * K, 0.0);
    emission(toks[0], ecol.data());
    for (int k = 0; k < K; ++k) fwd[k] = pi[k] * ecol[k];
    kernels::normalize(fwd.data(), K);
    for (size_t t = 1; t < nw; ++t) {
      double* cur = fwd.data() + t * K;
      ops.vec_mat(fwd.data() + (t - 1) * K, P.data(), K, cur);
      emission(toks[t], ecol.data());
      ops.mul(cur, ecol.data(), K);
      kernels::normalize(cur, K);
    }

    // backward sweep, harvesting center unaries and center-inner pairwise
    std::fill(b_cur.begin(), b_cur.end(), 1.0 / K);
    for (auto t = static_cast<int64_t>(nw) - 1; t >= 0; --t) {
      if (t < static_cast<int64_t>(nw) - 1) {
        b_next = b_cur;
        emission(toks[t + 1], ecol.data());
        for (int k = 0; k < K; ++k) g[k] = ecol[k] * b_next[k];
        ops.mat_vec(P.data(), g.data(), K, b_cur.data());
        kernels::normalize(b_cur.data(), K);
        if (t >= c0 && t < c1 - 1) {
          ops.scaled_outer(fwd.data() + t * K, P.data(), g.data(), K, xi.data());
          kernels::normalize(xi.data(), xi.size());
          for (size_t i = 0; i < xi.size(); ++i) acc_trans.a[i] += xi.a[i];
        }
      }
      if (t >= c0 && t < c1) {
        const double* a = fwd.data() + t * K;
        for (int k = 0; k < K; ++k) g[k] = a[k] * b_cur[k];
        kernels::normalize(g.data(), K);
        double* col = acc_emit.data() + toks[t];
        for (int k = 0; k < K; ++k) col[static_cast<size_t>(k) * W] += g[k];
      }
    }
  }

  const auto M = static_cast<double>(minibatch.size());
  ops.axpby(state.trans_dirichlet.data(), acc_trans.data(), acc_trans.size(),
            1.0 - rho, rho * static_cast<double>(T) / (static_cast<double>(L - 1) * M));
  for (double& v : state.trans_dirichlet.a) v += rho * cfg.alpha;
  ops.axpby(state.emit_dirichlet.data(), acc_emit.data(), acc_emit.size(), 1.0 - rho,
            rho * static_cast<double>(N) / M);
  for (double& v : state.emit_dirichlet.a) v += rho * cfg.beta;
}

SviTrainerState init_svi_trainer_state(const ModelConfig& mconf,
                                       const TrainConfig& tconf, int64_t T_train) {
  mconf.validate();
  tconf.validate();
  SviTrainerState s;
  s.iteration = 0;
  s.state = init_svi_state(mconf, T_train, tconf.seed, tconf.init_scale);
  s.rng.seed(tconf.seed);
  return s;
}

void train_svi(std::span<const uint32_t> train, std::span<const uint32_t> test,
               const ModelConfig& mconf, const TrainConfig& tconf, int b,
               SviTrainerState& state, MetricsTrace& trace, const MetricsSink& on_row) {
  mconf.validate();
  tconf.validate();
  const auto T = static_cast<int64_t>(train.size());
  const int64_t N = T / tconf.L;
  if (N < 1) fail(ErrorKind::data, "training stream shorter than one subchain");

  const double wall_offset = trace.empty() ? 0.0 : trace.back().wall_seconds;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  auto evaluate = [&](int64_t iter, double rho) {
    if (test.empty()) return;
    PointParams params = svi_point_estimates(state.state, mconf);
    MetricsRow row{iter, wall_offset + elapsed(), rho,
                   predictive_log_likelihood(params, test)};
    trace.push_back(row);
    if (on_row) on_row(row);
  };

  if (tconf.eval_every > 0 && state.iteration == 0) evaluate(0, 0.0);

  for (int64_t n = state.iteration; n < tconf.iterations; ++n) {
    const double rho = step_size(n, tconf.kappa);
    const std::vector<int64_t> indices = sample_minibatch(state.rng, N, tconf.M);
    try {
      svi_step(state.state, train, indices, mconf, rho, T, tconf.L, N, b);
    } catch (const Error& e) {
      fail(e.kind(), "iteration " + std::to_string(n) + ": " + e.what());
    }
    state.iteration = n + 1;
    if (tconf.eval_every > 0 &&
        ((n + 1) % tconf.eval_every == 0 || n + 1 == tconf.iterations)) {
      evaluate(n + 1, rho);
    }
  }
}

}  // namespace schmm
