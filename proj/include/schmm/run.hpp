#pragma once

#include <string>

#include "schmm/data.hpp"
#include "schmm/eval.hpp"
#include "schmm/model.hpp"
#include "schmm/trainer.hpp"

namespace schmm {

// One experiment manifest: model + optimizer settings, input artifacts, and
// output location. Loadable from a flat JSON file; the CLI applies flag
// overrides on top.
struct RunConfig {
  ModelConfig model;        // model.W == 0 means "infer from vocab/stream"
  TrainConfig train;
  std::string algo = "scvi";  // "scvi" | "svi"
  int svi_buffer = 20;
  double holdout_frac = 0.05;
  std::string stream_path;
  std::string vocab_path;  // optional; fixes W when present
  std::string out_dir = "out";

  void validate() const;
};

RunConfig load_run_config(const std::string& path);

struct TrainOutputs {
  std::string checkpoint_path;
  std::string metrics_path;
  int64_t iterations = 0;
  double final_heldout_ll = 0.0;
};

// Loads the stream, splits off the holdout, trains (fresh or resumed from
// resume_path), and writes checkpoint + metrics CSV under cfg.out_dir. On
// resume, every math-relevant setting comes from the checkpoint; only
// iterations / threads / eval_every are taken from cfg.
TrainOutputs run_train(const RunConfig& cfg, const std::string& resume_path = "",
                       const MetricsSink& on_row = {});

struct EvalResult {
  std::string algo;
  int64_t iteration = 0;
  int64_t test_tokens = 0;
  double nats_per_token = 0.0;
};

EvalResult run_eval(const std::string& checkpoint_path, const std::string& stream_path,
                    double holdout_frac);

}  // namespace schmm
