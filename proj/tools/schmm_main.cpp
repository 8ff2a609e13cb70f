// schmm: stochastic collapsed variational inference for HMMs on one long
// discrete sequence. Subcommands: prepare, train, eval, plot.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "schmm/checkpoint.hpp"
#include "schmm/data.hpp"
#include "schmm/eval.hpp"
#include "schmm/kernels.hpp"
#include "schmm/run.hpp"

namespace {

int exit_code_for(schmm::ErrorKind kind) {
  switch (kind) {
    case schmm::ErrorKind::invalid_argument: return 1;
    case schmm::ErrorKind::data: return 2;
    case schmm::ErrorKind::artifact: return 3;
    case schmm::ErrorKind::numerical: return 4;
  }
  return 1;
}

void apply_kernel_choice(const std::string& name) {
  if (name == "auto") return;
  if (name == "scalar") {
    schmm::kernels::select(schmm::kernels::Backend::scalar);
  } else if (name == "avx2") {
    schmm::kernels::select(schmm::kernels::Backend::avx2);
  } else {
    schmm::fail(schmm::ErrorKind::invalid_argument, "unknown kernel backend: " + name);
  }
}

int cmd_prepare(const std::string& corpus, const std::string& out_dir, uint64_t seed,
                int min_count, uint32_t max_vocab) {
  auto sentences = schmm::read_corpus(corpus);
  schmm::Vocab vocab = schmm::build_vocab(sentences, min_count, max_vocab);
  schmm::TokenStream stream = schmm::prepare_stream(sentences, vocab, seed);
  std::filesystem::create_directories(out_dir);
  schmm::save_vocab(vocab, out_dir + "/vocab.tsv");
  schmm::save_stream(stream, out_dir + "/stream.bin");
  std::printf("sentences=%zu tokens=%zu vocab=%u stream=%s\n", sentences.size(),
              stream.size(), vocab.size(), (out_dir + "/stream.bin").c_str());
  return 0;
}

int cmd_plot(const std::vector<std::string>& csvs, const std::string& out) {
  std::vector<std::pair<std::string, schmm::MetricsTrace>> traces;
  for (const auto& path : csvs) {
    traces.emplace_back(std::filesystem::path(path).stem().string(),
                        schmm::read_metrics(path));
  }
  schmm::emit_plot(traces, out);
  std::printf("wrote %s (%zu traces)\n", out.c_str(), traces.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic collapsed variational inference for HMMs"};
  app.require_subcommand(1);

  std::string kernel = "auto";
  app.add_option("--kernel", kernel, "compute backend: auto|scalar|avx2")
      ->capture_default_str();

  // prepare
  auto* prep = app.add_subcommand("prepare", "tokenize a corpus into a stream cache");
  std::string corpus, prep_out = "out";
  uint64_t prep_seed = 1;
  int min_count = 1;
  uint32_t max_vocab = 0;
  prep->add_option("--corpus", corpus, "one sentence per line, space-separated")
      ->required();
  prep->add_option("--out-dir", prep_out, "output directory")->capture_default_str();
  prep->add_option("--seed", prep_seed, "sentence shuffle seed")->capture_default_str();
  prep->add_option("--min-count", min_count, "tokens rarer than this become <unk>")
      ->capture_default_str();
  prep->add_option("--max-vocab", max_vocab, "cap vocabulary size (0 = unlimited)")
      ->capture_default_str();

  // train
  auto* tr = app.add_subcommand("train", "run SCVI or SVI training");
  std::string config_path, resume_path;
  schmm::RunConfig run_cfg;
  run_cfg.model.W = 0;
  std::string guard = "";
  tr->add_option("--config", config_path, "JSON config file (flags override it)");
  tr->add_option("--resume", resume_path, "checkpoint to resume from");
  tr->add_option("--stream", run_cfg.stream_path, "stream cache path");
  tr->add_option("--vocab", run_cfg.vocab_path, "vocab TSV (fixes W)");
  tr->add_option("--out-dir", run_cfg.out_dir, "output directory");
  tr->add_option("--algo", run_cfg.algo, "scvi|svi");
  tr->add_option("--K", run_cfg.model.K, "hidden states");
  tr->add_option("--W", run_cfg.model.W, "vocabulary size (0 = infer)");
  tr->add_option("--alpha", run_cfg.model.alpha, "transition prior");
  tr->add_option("--beta", run_cfg.model.beta, "emission prior");
  tr->add_option("--L", run_cfg.train.L, "subchain length");
  tr->add_option("--M", run_cfg.train.M, "minibatch size");
  tr->add_option("--kappa", run_cfg.train.kappa, "forgetting rate");
  tr->add_option("--iterations", run_cfg.train.iterations, "minibatch updates");
  tr->add_option("--seed", run_cfg.train.seed, "training seed");
  tr->add_option("--guard", guard, "guard policy: uniform|stationary|stored");
  tr->add_option("--init-scale", run_cfg.train.init_scale, "initial stats mass / T");
  tr->add_flag("--normalize-inner-rows,!--raw-inner-rows",
               run_cfg.train.normalize_inner_rows,
               "row-normalize the inner transition factor (default on; the raw "
               "form concentrates mass onto one state)");
  tr->add_option("--threads", run_cfg.train.threads, "minibatch workers");
  tr->add_option("--eval-every", run_cfg.train.eval_every, "evaluation cadence");
  tr->add_option("--svi-buffer", run_cfg.svi_buffer, "SVI observation buffer");
  tr->add_option("--holdout", run_cfg.holdout_frac, "held-out fraction");

  // eval
  auto* ev = app.add_subcommand("eval", "score a checkpoint on a stream's holdout");
  std::string eval_ckpt, eval_stream;
  double eval_holdout = 0.05;
  ev->add_option("--checkpoint", eval_ckpt)->required();
  ev->add_option("--stream", eval_stream)->required();
  ev->add_option("--holdout", eval_holdout, "held-out fraction")->capture_default_str();

  // plot
  auto* pl = app.add_subcommand("plot", "render metrics CSVs as an SVG chart");
  std::vector<std::string> plot_csvs;
  std::string plot_out = "plot.svg";
  pl->add_option("csvs", plot_csvs, "metrics CSV files")->required();
  pl->add_option("--out", plot_out, "output SVG path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    apply_kernel_choice(kernel);

    if (*prep) return cmd_prepare(corpus, prep_out, prep_seed, min_count, max_vocab);

    if (*tr) {
      schmm::RunConfig cfg;
      if (!config_path.empty()) cfg = schmm::load_run_config(config_path);
      else cfg.model.W = 0;
      // flags override file values
      auto touched = [&](const std::string& name) { return tr->count(name) > 0; };
      if (touched("--stream")) cfg.stream_path = run_cfg.stream_path;
      if (touched("--vocab")) cfg.vocab_path = run_cfg.vocab_path;
      if (touched("--out-dir")) cfg.out_dir = run_cfg.out_dir;
      if (touched("--algo")) cfg.algo = run_cfg.algo;
      if (touched("--K")) cfg.model.K = run_cfg.model.K;
      if (touched("--W")) cfg.model.W = run_cfg.model.W;
      if (touched("--alpha")) cfg.model.alpha = run_cfg.model.alpha;
      if (touched("--beta")) cfg.model.beta = run_cfg.model.beta;
      if (touched("--L")) cfg.train.L = run_cfg.train.L;
      if (touched("--M")) cfg.train.M = run_cfg.train.M;
      if (touched("--kappa")) cfg.train.kappa = run_cfg.train.kappa;
      if (touched("--iterations")) cfg.train.iterations = run_cfg.train.iterations;
      if (touched("--seed")) cfg.train.seed = run_cfg.train.seed;
      if (!guard.empty()) cfg.train.guard_policy = schmm::parse_guard_policy(guard);
      if (touched("--init-scale")) cfg.train.init_scale = run_cfg.train.init_scale;
      if (touched("--normalize-inner-rows")) {
        cfg.train.normalize_inner_rows = run_cfg.train.normalize_inner_rows;
      }
      if (touched("--threads")) cfg.train.threads = run_cfg.train.threads;
      if (touched("--eval-every")) cfg.train.eval_every = run_cfg.train.eval_every;
      if (touched("--svi-buffer")) cfg.svi_buffer = run_cfg.svi_buffer;
      if (touched("--holdout")) cfg.holdout_frac = run_cfg.holdout_frac;

      auto progress = [](const schmm::MetricsRow& row) {
        std::fprintf(stderr, "iter %lld  rho %.5f  heldout %.6f nats/token\n",
                     static_cast<long long>(row.iteration), row.rho, row.heldout_ll);
      };
      schmm::TrainOutputs out = schmm::run_train(cfg, resume_path, progress);
      std::printf("checkpoint=%s metrics=%s final_heldout=%.6f\n",
                  out.checkpoint_path.c_str(), out.metrics_path.c_str(),
                  out.final_heldout_ll);
      return 0;
    }

    if (*ev) {
      schmm::EvalResult res = schmm::run_eval(eval_ckpt, eval_stream, eval_holdout);
      std::fprintf(stderr, "%s checkpoint @ iteration %lld: %.6f nats/token on %lld tokens\n",
                   res.algo.c_str(), static_cast<long long>(res.iteration),
                   res.nats_per_token, static_cast<long long>(res.test_tokens));
      nlohmann::json j = {{"algo", res.algo},
                          {"iteration", res.iteration},
                          {"test_tokens", res.test_tokens},
                          {"nats_per_token", res.nats_per_token}};
      std::printf("%s\n", j.dump().c_str());
      return 0;
    }

    if (*pl) return cmd_plot(plot_csvs, plot_out);
  } catch (const schmm::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
