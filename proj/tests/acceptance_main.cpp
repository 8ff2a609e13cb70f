// Acceptance suite: ten end-to-end checks of the trainer against exhaustive
// oracles, invariants, and scaled-down qualitative reproductions. Each
// criterion prints exactly one PASS/FAIL line; the exit code is the number of
// failures. Run with a list of criterion numbers to execute a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "schmm/checkpoint.hpp"
#include "schmm/data.hpp"
#include "schmm/eval.hpp"
#include "schmm/markov.hpp"
#include "schmm/model.hpp"
#include "schmm/run.hpp"
#include "schmm/subchain.hpp"
#include "schmm/svi.hpp"
#include "schmm/trainer.hpp"

using namespace schmm;

namespace {

const char* kOutDir = "acceptance_out";

std::vector<double> random_simplex(std::mt19937_64& rng, int K) {
  std::uniform_real_distribution<double> d(0.05, 1.0);
  std::vector<double> v(K);
  double s = 0.0;
  for (double& x : v) s += (x = d(rng));
  for (double& x : v) x /= s;
  return v;
}

GlobalStats random_stats(std::mt19937_64& rng, int K, int W) {
  std::uniform_real_distribution<double> d(0.02, 3.0);
  GlobalStats s(K, W);
  for (double& v : s.trans.a) v = d(rng);
  for (double& v : s.emit.a) v = d(rng);
  return s;
}

std::vector<uint32_t> random_tokens(std::mt19937_64& rng, int L, int W) {
  std::vector<uint32_t> x(L);
  for (auto& t : x) t = static_cast<uint32_t>(rng() % W);
  return x;
}

bool next_config(std::vector<int>& z, int K) {
  for (size_t i = 0; i < z.size(); ++i) {
    if (++z[i] < K) return true;
    z[i] = 0;
  }
  return false;
}

// expected local statistics with exact masses L-1 / L, like a calibrated
// posterior would produce
LocalStats fake_local(std::mt19937_64& rng, int K, int W, int L) {
  std::uniform_real_distribution<double> d(0.05, 1.0);
  LocalStats ls;
  ls.trans = Mat(K, K);
  if (L > 1) {
    double s = 0.0;
    for (double& v : ls.trans.a) s += (v = d(rng));
    const double scale = (L - 1) / s;
    for (double& v : ls.trans.a) v *= scale;
  }
  std::map<uint32_t, std::vector<double>> acc;
  for (int l = 0; l < L; ++l) {
    const auto w = static_cast<uint32_t>(rng() % W);
    std::vector<double> u = random_simplex(rng, K);
    auto& col = acc.try_emplace(w, std::vector<double>(K, 0.0)).first->second;
    for (int k = 0; k < K; ++k) col[k] += u[k];
  }
  ls.emit.assign(acc.begin(), acc.end());
  return ls;
}

long vm_hwm_kb() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) return std::strtol(line.c_str() + 6, nullptr, 10);
  }
  return -1;
}

double trailing_mean(const MetricsTrace& trace, int64_t min_iteration) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : trace) {
    if (r.iteration >= min_iteration) {
      sum += r.heldout_ll;
      ++n;
    }
  }
  return n > 0 ? sum / n : std::nan("");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Fmt {
  char buf[512];
  const char* operator()(const char* fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, ap);
    va_end(ap);
    return buf;
  }
};

// ---------------------------------------------------------------------------
// 1. subchain marginals vs exhaustive enumeration over the fuzz grid
// ---------------------------------------------------------------------------
bool criterion_marginal_oracle(std::string& detail) {
  std::mt19937_64 rng(101);
  const int W = 5;
  double worst = 0.0;
  for (int K : {2, 3, 4}) {
    for (int L = 1; L <= 6; ++L) {
      for (int rep = 0; rep < 20; ++rep) {
        std::uniform_real_distribution<double> dc(0.05, 0.5);
        ModelConfig cfg{K, W, dc(rng), dc(rng)};
        GlobalStats stats = random_stats(rng, K, W);
        std::vector<uint32_t> tokens = random_tokens(rng, L, W);
        std::vector<double> lg = random_simplex(rng, K);
        std::vector<double> rg = random_simplex(rng, K);

        Subchain sub{0, tokens, lg, rg};
        auto [post, ls] = infer_subchain(sub, stats, cfg);
        oracle::JointEnumerator je(cfg, stats, tokens, lg, rg);

        for (int l = 1; l <= L; ++l) {
          const std::vector<double> want = je.unary(l);
          const double* got = post.unary_at(l);
          for (int k = 0; k < K; ++k) worst = std::max(worst, std::abs(got[k] - want[k]));
        }
        for (int l = 2; l <= L; ++l) {
          const Mat want = je.pairwise(l);
          const double* got = post.pairwise_at(l);
          for (size_t i = 0; i < want.size(); ++i) {
            worst = std::max(worst, std::abs(got[i] - want.a[i]));
          }
        }
      }
    }
  }
  detail = Fmt()("360 instances, max |delta| = %.2e", worst);
  return worst <= 1e-10;
}

// ---------------------------------------------------------------------------
// 2. summing the guard-extended joint over the guards reproduces the
//    unnormalized subchain posterior (one constant across configurations)
// ---------------------------------------------------------------------------
bool criterion_guard_reduction(std::string& detail) {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const int K = 2 + static_cast<int>(rng() % 2);
    const int L = 2 + static_cast<int>(rng() % 3);
    const int W = 4;
    std::uniform_real_distribution<double> dc(0.05, 0.5);
    ModelConfig cfg{K, W, dc(rng), dc(rng)};
    GlobalStats stats = random_stats(rng, K, W);
    std::vector<uint32_t> tokens = random_tokens(rng, L, W);
    std::vector<double> lg = random_simplex(rng, K);
    std::vector<double> rg = random_simplex(rng, K);

    oracle::JointEnumerator je(cfg, stats, tokens, lg, rg);
    const std::vector<double> ein = edge_in_weight(stats, lg, cfg);
    const std::vector<double> eout = edge_out_weight(stats, rg, cfg);
    const Mat theta_in = surrogate_theta_inner(stats, cfg);
    const Mat phi = surrogate_phi(stats, cfg);

    double ratio0 = 0.0;
    std::vector<int> z(L, 0);
    std::vector<int> full(L + 2, 0);
    do {
      // marginalize the enumerated joint over both guard states
      double m = 0.0;
      for (int l = 0; l < L; ++l) full[l + 1] = z[l];
      for (int z0 = 0; z0 < K; ++z0) {
        for (int zr = 0; zr < K; ++zr) {
          full[0] = z0;
          full[L + 1] = zr;
          m += je.weight(full);
        }
      }
      // direct unnormalized subchain posterior from the collapsed edge weights
      double q = ein[z[0]] * phi(z[0], tokens[0]);
      for (int l = 1; l < L; ++l) {
        q *= theta_in(z[l - 1], z[l]) * phi(z[l], tokens[l]);
      }
      q *= eout[z[L - 1]];

      const double ratio = m / q;
      if (ratio0 == 0.0) ratio0 = ratio;
      worst = std::max(worst, std::abs(ratio - ratio0) / ratio0);
    } while (next_config(z, K));
  }
  detail = Fmt()("10 instances, max relative spread of the ratio = %.2e", worst);
  return worst < 1e-9;
}

// ---------------------------------------------------------------------------
// 3. calibration and local-statistics masses across the same fuzz grid
// ---------------------------------------------------------------------------
bool criterion_calibration(std::string& detail) {
  std::mt19937_64 rng(303);
  const int W = 5;
  double worst = 0.0;
  for (int K : {2, 3, 4}) {
    for (int L = 1; L <= 6; ++L) {
      for (int rep = 0; rep < 20; ++rep) {
        std::uniform_real_distribution<double> dc(0.05, 0.5);
        ModelConfig cfg{K, W, dc(rng), dc(rng)};
        GlobalStats stats = random_stats(rng, K, W);
        std::vector<uint32_t> tokens = random_tokens(rng, L, W);
        std::vector<double> lg = random_simplex(rng, K);
        std::vector<double> rg = random_simplex(rng, K);
        Subchain sub{0, tokens, lg, rg};
        auto [post, ls] = infer_subchain(sub, stats, cfg);

        for (int l = 1; l <= L; ++l) {
          double s = 0.0;
          for (int k = 0; k < K; ++k) s += post.unary_at(l)[k];
          worst = std::max(worst, std::abs(s - 1.0));
        }
        for (int l = 2; l <= L; ++l) {
          const double* pw = post.pairwise_at(l);
          for (int i = 0; i < K; ++i) {
            double row = 0.0, col = 0.0;
            for (int j = 0; j < K; ++j) {
              row += pw[i * K + j];
              col += pw[j * K + i];
            }
            worst = std::max(worst, std::abs(row - post.unary_at(l - 1)[i]));
            worst = std::max(worst, std::abs(col - post.unary_at(l)[i]));
          }
        }
        worst = std::max(worst, std::abs(ls.trans_mass() - (L - 1)));
        worst = std::max(worst, std::abs(ls.emit_mass() - L));
      }
    }
  }
  detail = Fmt()("360 instances, max |delta| = %.2e", worst);
  return worst <= 1e-8;
}

// ---------------------------------------------------------------------------
// 4. total mass is a fixed point of the stochastic update
// ---------------------------------------------------------------------------
bool criterion_mass_fixed_point(std::string& detail) {
  const int K = 4, W = 12, L = 10, M = 7;
  const int64_t T = 50000, N = T / L;
  ModelConfig cfg{K, W, 0.1, 0.1};
  std::mt19937_64 rng(404);
  GlobalStats stats = init_global_stats(cfg, T, 9);

  for (int n = 0; n < 1000; ++n) {
    std::vector<LocalStats> batch;
    batch.reserve(M);
    for (int m = 0; m < M; ++m) batch.push_back(fake_local(rng, K, W, L));
    update_global(stats, batch, step_size(n, 0.6), T, L, N);
  }
  const double dt = std::abs(stats.trans_total() - static_cast<double>(T)) / T;
  const double de = std::abs(stats.emit_total() - static_cast<double>(T)) / T;
  detail = Fmt()("after 1000 steps: trans drift %.2e, emit drift %.2e (rel)", dt, de);
  return dt < 1e-6 && de < 1e-6;
}

// ---------------------------------------------------------------------------
// 5. held-out scorer vs hidden-path enumeration
// ---------------------------------------------------------------------------
bool criterion_forward_oracle(std::string& detail) {
  std::mt19937_64 rng(505);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int K = 2 + static_cast<int>(rng() % 2);
    const int W = 2 + static_cast<int>(rng() % 4);
    const int T = 1 + static_cast<int>(rng() % 8);
    ModelConfig cfg{K, W, 0.2, 0.2};
    PointParams p = point_estimates(random_stats(rng, K, W), cfg);
    std::vector<uint32_t> test = random_tokens(rng, T, W);
    const double got = predictive_log_likelihood(p, test);
    const double want = oracle::enumerate_log_likelihood(p.theta, p.phi, p.init, test) / T;
    worst = std::max(worst, std::abs(got - want));
  }

  // uniform emissions: every token costs exactly -log W
  ModelConfig ucfg{3, 10, 0.5, 0.5};
  GlobalStats us = random_stats(rng, 3, 10);
  for (double& v : us.emit.a) v = 0.0;
  PointParams up = point_estimates(us, ucfg);
  const double u = predictive_log_likelihood(up, random_tokens(rng, 64, 10));
  const double udiff = std::abs(u + std::log(10.0));

  detail = Fmt()("50 instances, max |delta| = %.2e; uniform case |delta| = %.2e", worst,
                 udiff);
  return worst <= 1e-10 && udiff <= 1e-12;
}

// shared synthetic corpus for the training-level criteria
struct Synthetic {
  PointParams gen;
  TokenStream stream;
  std::span<const uint32_t> train, test;
  double baseline = 0.0;  // generating parameters' held-out score
};

Synthetic make_synthetic() {
  Synthetic s;
  // Dirichlet(0.3) rows give the chain a real temporal signal (~0.14 nats over
  // a unigram fit); flatter rows leave too little structure for any trainer to
  // find in the iteration budget, sparser ones make runs seed-brittle.
  auto [gen, stream] = generate_synthetic(3, 20, 100000, 0.3, 7);
  s.gen = std::move(gen);
  s.stream = std::move(stream);
  auto [train, test] = train_test_split(s.stream, 0.05);
  s.train = train;
  s.test = test;
  s.baseline = predictive_log_likelihood(s.gen, s.test);
  return s;
}

// ---------------------------------------------------------------------------
// 6. synthetic recovery: trained model approaches the generating parameters
// ---------------------------------------------------------------------------
bool criterion_recovery(const Synthetic& syn, std::string& detail) {
  ModelConfig mconf{3, 20, 0.1, 0.1};
  TrainConfig tconf;
  tconf.L = 10;
  tconf.M = 100;
  tconf.kappa = 0.5;
  tconf.iterations = 2000;
  tconf.seed = 1;
  tconf.guard_policy = GuardPolicy::stored;
  tconf.eval_every = 0;
  tconf.threads = 1;

  TrainerState state = init_trainer_state(mconf, tconf, static_cast<int64_t>(syn.train.size()));
  MetricsTrace trace;
  train_scvi(syn.train, syn.test, mconf, tconf, state, trace);
  const double model = predictive_log_likelihood(point_estimates(state.stats, mconf), syn.test);
  detail = Fmt()("model %.4f vs generating %.4f nats/token (gap %.4f, allowed 0.15)", model,
                 syn.baseline, syn.baseline - model);
  return std::isfinite(model) && model >= syn.baseline - 0.15;
}

// ---------------------------------------------------------------------------
// 7. stored guard beliefs never lose materially to uniform guards at L=2
// ---------------------------------------------------------------------------
bool criterion_buffering(const Synthetic& syn, std::string& detail) {
  auto run = [&](GuardPolicy policy, uint64_t seed) {
    ModelConfig mconf{3, 20, 0.1, 0.1};
    TrainConfig tconf;
    tconf.L = 2;
    tconf.M = 500;
    tconf.kappa = 0.5;
    tconf.iterations = 2000;
    tconf.seed = seed;
    tconf.guard_policy = policy;
    tconf.eval_every = 200;
    tconf.threads = 1;
    TrainerState state =
        init_trainer_state(mconf, tconf, static_cast<int64_t>(syn.train.size()));
    MetricsTrace trace;
    train_scvi(syn.train, syn.test, mconf, tconf, state, trace);
    return trailing_mean(trace, 1600);  // mean of the last three evaluations
  };

  double stored = 0.0, uniform = 0.0;
  for (uint64_t seed : {11, 12, 13}) {
    stored += run(GuardPolicy::stored, seed) / 3.0;
    uniform += run(GuardPolicy::uniform, seed) / 3.0;
  }
  detail = Fmt()("stored %.4f vs uniform %.4f nats/token over 3 seeds (allowed gap 0.01)",
                 stored, uniform);
  return stored >= uniform - 0.01;
}

// ---------------------------------------------------------------------------
// 8. collapsed training matches or beats the uncollapsed baseline; curves
//    land in acceptance_out/ as CSV + SVG
// ---------------------------------------------------------------------------
bool criterion_scvi_vs_svi(const Synthetic& syn, std::string& detail) {
  ModelConfig mconf{3, 20, 0.1, 0.1};
  TrainConfig tconf;
  tconf.L = 10;
  tconf.M = 100;
  tconf.kappa = 0.5;
  tconf.iterations = 2000;
  tconf.guard_policy = GuardPolicy::stored;
  tconf.eval_every = 50;
  tconf.threads = 1;

  double scvi_mean = 0.0, svi_mean = 0.0;
  MetricsTrace scvi_curve, svi_curve;
  for (uint64_t seed : {21, 22, 23}) {
    tconf.seed = seed;
    TrainerState st = init_trainer_state(mconf, tconf, static_cast<int64_t>(syn.train.size()));
    MetricsTrace trace;
    train_scvi(syn.train, syn.test, mconf, tconf, st, trace);
    scvi_mean += trailing_mean(trace, tconf.iterations - 100) / 3.0;
    if (seed == 21) scvi_curve = trace;

    SviTrainerState sv = init_svi_trainer_state(mconf, tconf, static_cast<int64_t>(syn.train.size()));
    MetricsTrace strace;
    train_svi(syn.train, syn.test, mconf, tconf, 20, sv, strace);
    svi_mean += trailing_mean(strace, tconf.iterations - 100) / 3.0;
    if (seed == 21) svi_curve = strace;
  }

  const std::string scsv = std::string(kOutDir) + "/scvi.csv";
  const std::string vcsv = std::string(kOutDir) + "/svi.csv";
  emit_metrics(scvi_curve, scsv);
  emit_metrics(svi_curve, vcsv);
  emit_plot({{"scvi", scvi_curve}, {"svi", svi_curve}},
            std::string(kOutDir) + "/comparison.svg");

  detail = Fmt()("scvi %.4f vs svi %.4f nats/token over 3 seeds (allowed gap 0.02)",
                 scvi_mean, svi_mean);
  return scvi_mean >= svi_mean - 0.02;
}

// ---------------------------------------------------------------------------
// 9. bit determinism of checkpoints; resume == uninterrupted
// ---------------------------------------------------------------------------
bool criterion_determinism(const Synthetic& syn, std::string& detail) {
  const std::string stream_path = std::string(kOutDir) + "/stream.bin";
  save_stream(syn.stream, stream_path);

  RunConfig cfg;
  cfg.model.K = 3;
  cfg.model.W = 0;  // infer from the stream
  cfg.model.alpha = 0.1;
  cfg.model.beta = 0.1;
  cfg.train.L = 5;
  cfg.train.M = 20;
  cfg.train.kappa = 0.6;
  cfg.train.iterations = 60;
  cfg.train.seed = 5;
  cfg.train.guard_policy = GuardPolicy::stored;
  cfg.train.eval_every = 0;
  cfg.train.threads = 1;
  cfg.holdout_frac = 0.05;
  cfg.stream_path = stream_path;

  cfg.out_dir = std::string(kOutDir) + "/det_a";
  run_train(cfg);
  cfg.out_dir = std::string(kOutDir) + "/det_a2";
  run_train(cfg);
  const std::string a = slurp(std::string(kOutDir) + "/det_a/checkpoint.bin");
  const std::string a2 = slurp(std::string(kOutDir) + "/det_a2/checkpoint.bin");
  const bool fresh_equal = !a.empty() && a == a2;

  cfg.out_dir = std::string(kOutDir) + "/det_b";
  cfg.train.iterations = 30;
  run_train(cfg);
  cfg.train.iterations = 60;
  run_train(cfg, cfg.out_dir + "/checkpoint.bin");
  const std::string b = slurp(std::string(kOutDir) + "/det_b/checkpoint.bin");
  const bool resume_equal = a == b;

  detail = Fmt()("fresh reruns byte-identical: %s; resumed == uninterrupted: %s",
                 fresh_equal ? "yes" : "no", resume_equal ? "yes" : "no");
  return fresh_equal && resume_equal;
}

// ---------------------------------------------------------------------------
// 10. ten-million-token smoke run inside a memory budget
// ---------------------------------------------------------------------------
bool criterion_scale(std::string& detail) {
  const int64_t T = 10000000;
  auto [gen, stream] = generate_synthetic(3, 20, T, 0.5, 99);
  (void)gen;
  auto [train, test] = train_test_split(stream, 0.05);

  ModelConfig mconf{3, 20, 0.1, 0.1};
  TrainConfig tconf;
  tconf.L = 10;
  tconf.M = 100;
  tconf.kappa = 0.5;
  tconf.iterations = 500;
  tconf.seed = 31;
  tconf.eval_every = 0;
  tconf.threads = 1;

  const double stream_mb = static_cast<double>(stream.tokens.size() * 4) / (1 << 20);
  const int64_t N = static_cast<int64_t>(train.size()) / tconf.L;
  const double store_mb = static_cast<double>(2 * N * mconf.K * 8) / (1 << 20);
  const double slack_mb = 64.0;  // binary, allocator, message buffers

  tconf.guard_policy = GuardPolicy::stationary;
  TrainerState st1 = init_trainer_state(mconf, tconf, static_cast<int64_t>(train.size()));
  MetricsTrace t1;
  train_scvi(train, test, mconf, tconf, st1, t1);
  const double ll1 = predictive_log_likelihood(point_estimates(st1.stats, mconf), test);
  const double hwm1 = static_cast<double>(vm_hwm_kb()) / 1024.0;
  const double budget1 = stream_mb + slack_mb;

  tconf.guard_policy = GuardPolicy::stored;
  TrainerState st2 = init_trainer_state(mconf, tconf, static_cast<int64_t>(train.size()));
  MetricsTrace t2;
  train_scvi(train, test, mconf, tconf, st2, t2);
  const double ll2 = predictive_log_likelihood(point_estimates(st2.stats, mconf), test);
  const double hwm2 = static_cast<double>(vm_hwm_kb()) / 1024.0;
  const double budget2 = stream_mb + store_mb + slack_mb;

  detail = Fmt()(
      "T=1e7: stationary %.4f nats (peak %.0f/%.0f MiB), stored %.4f nats (peak %.0f/%.0f "
      "MiB)",
      ll1, hwm1, budget1, ll2, hwm2, budget2);
  return std::isfinite(ll1) && std::isfinite(ll2) && hwm1 > 0 && hwm1 <= budget1 &&
         hwm2 <= budget2;
}

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::create_directories(kOutDir);

  Synthetic syn = make_synthetic();

  struct Criterion {
    int id;
    const char* label;
    double time_limit;  // seconds; 0 = unbounded
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "subchain marginals match exhaustive enumeration", 10.0,
       [&](std::string& d) { return criterion_marginal_oracle(d); }},
      {2, "guard-summed joint equals the collapsed subchain posterior", 5.0,
       [&](std::string& d) { return criterion_guard_reduction(d); }},
      {3, "calibration and local-statistics masses", 0.0,
       [&](std::string& d) { return criterion_calibration(d); }},
      {4, "global mass is a fixed point of the stochastic update", 5.0,
       [&](std::string& d) { return criterion_mass_fixed_point(d); }},
      {5, "held-out scorer matches hidden-path enumeration", 0.0,
       [&](std::string& d) { return criterion_forward_oracle(d); }},
      {6, "synthetic recovery approaches the generating parameters", 120.0,
       [&](std::string& d) { return criterion_recovery(syn, d); }},
      {7, "stored guard beliefs do not lose to uniform at L=2", 0.0,
       [&](std::string& d) { return criterion_buffering(syn, d); }},
      {8, "collapsed training matches or beats the uncollapsed baseline", 0.0,
       [&](std::string& d) { return criterion_scvi_vs_svi(syn, d); }},
      {9, "checkpoint determinism and resume equivalence", 0.0,
       [&](std::string& d) { return criterion_determinism(syn, d); }},
      {10, "ten-million-token run stays inside the memory budget", 0.0,
       [&](std::string& d) { return criterion_scale(d); }},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && c.time_limit > 0.0 && secs > c.time_limit) {
      ok = false;
      detail += Fmt()(" [exceeded the %.0fs budget]", c.time_limit);
    }
    std::printf("[%2d] %s (%6.2fs) %s -- %s\n", c.id, ok ? "PASS" : "FAIL", secs, c.label,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria FAILED\n", failures);
  }
  return failures;
}
