#include "schmm/run.hpp"

#include <filesystem>
#include <fstream>

#include "schmm/checkpoint.hpp"
#include "schmm/config_json.hpp"
#include "schmm/svi.hpp"

namespace schmm {

void RunConfig::validate() const {
  if (algo != "scvi" && algo != "svi") {
    fail(ErrorKind::invalid_argument, "algo must be 'scvi' or 'svi', got " + algo);
  }
  if (svi_buffer < 0) fail(ErrorKind::invalid_argument, "svi_buffer must be >= 0");
  if (!(holdout_frac > 0.0 && holdout_frac < 1.0)) {
    fail(ErrorKind::invalid_argument, "holdout_frac must be in (0,1)");
  }
  if (stream_path.empty()) fail(ErrorKind::invalid_argument, "stream path is required");
  train.validate();
  // model is validated after W resolution in run_train
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::data, "cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::artifact, "malformed config JSON in " + path + ": " + e.what());
  }

  RunConfig cfg;
  cfg.model.W = 0;  // default to inference from data unless the file pins it
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "model") {
        cfg.model = model_config_from_json(value);
        if (!value.contains("W")) cfg.model.W = 0;
      } else if (key == "train") {
        cfg.train = train_config_from_json(value);
      } else if (key == "algo") {
        cfg.algo = value.get<std::string>();
      } else if (key == "svi_buffer") {
        cfg.svi_buffer = value.get<int>();
      } else if (key == "holdout_frac") {
        cfg.holdout_frac = value.get<double>();
      } else if (key == "stream") {
        cfg.stream_path = value.get<std::string>();
      } else if (key == "vocab") {
        cfg.vocab_path = value.get<std::string>();
      } else if (key == "out_dir") {
        cfg.out_dir = value.get<std::string>();
      } else {
        fail(ErrorKind::invalid_argument, "unknown config key '" + key + "' in " + path);
      }
    } catch (const nlohmann::json::exception&) {
      fail(ErrorKind::invalid_argument, "config key '" + key + "' has wrong type");
    }
  }
  return cfg;
}

namespace {

// W precedence: explicit config > vocab file > observed stream alphabet.
int resolve_vocab_size(const RunConfig& cfg, const TokenStream& stream) {
  int W = cfg.model.W;
  if (!cfg.vocab_path.empty()) {
    const auto vocab_w = static_cast<int>(load_vocab(cfg.vocab_path).size());
    if (W == 0) W = vocab_w;
    if (W != vocab_w) {
      fail(ErrorKind::invalid_argument,
           "config W=" + std::to_string(W) + " disagrees with vocab size " +
               std::to_string(vocab_w));
    }
  }
  if (W == 0) W = static_cast<int>(stream.W);
  if (W < static_cast<int>(stream.W)) {
    fail(ErrorKind::data, "stream contains tokens >= W=" + std::to_string(W));
  }
  return W;
}

MetricsTrace load_resume_trace(const std::string& path, int64_t up_to_iteration) {
  if (!std::filesystem::exists(path)) return {};
  MetricsTrace all = read_metrics(path);
  MetricsTrace kept;
  for (const auto& r : all) {
    if (r.iteration <= up_to_iteration) kept.push_back(r);
  }
  return kept;
}

}  // namespace

TrainOutputs run_train(const RunConfig& cfg_in, const std::string& resume_path,
                       const MetricsSink& on_row) {
  RunConfig cfg = cfg_in;
  cfg.validate();

  TokenStream stream = load_stream(cfg.stream_path);
  cfg.model.W = resolve_vocab_size(cfg, stream);
  cfg.model.validate();
  auto [train, test] = train_test_split(stream, cfg.holdout_frac);

  std::filesystem::create_directories(cfg.out_dir);
  TrainOutputs out;
  out.checkpoint_path = cfg.out_dir + "/checkpoint.bin";
  out.metrics_path = cfg.out_dir + "/metrics.csv";
  out.iterations = cfg.train.iterations;

  MetricsTrace trace;
  if (cfg.algo == "scvi") {
    TrainerState state;
    if (!resume_path.empty()) {
      Checkpoint ck = load_checkpoint(resume_path);
      if (ck.algo != cfg.algo) {
        fail(ErrorKind::invalid_argument, "checkpoint algo '" + ck.algo +
                                              "' does not match requested '" + cfg.algo + "'");
      }
      cfg.model = ck.model;
      TrainConfig t = ck.train;
      t.iterations = cfg.train.iterations;
      t.threads = cfg.train.threads;
      t.eval_every = cfg.train.eval_every;
      cfg.train = t;
      state = ck.to_scvi_state();
      trace = load_resume_trace(out.metrics_path, state.iteration);
    } else {
      state = init_trainer_state(cfg.model, cfg.train,
                                 static_cast<int64_t>(train.size()));
    }
    train_scvi(train, test, cfg.model, cfg.train, state, trace, on_row);
    save_checkpoint(Checkpoint::from_scvi(cfg.model, cfg.train, state),
                    out.checkpoint_path);
  } else {
    SviTrainerState state;
    if (!resume_path.empty()) {
      Checkpoint ck = load_checkpoint(resume_path);
      if (ck.algo != cfg.algo) {
        fail(ErrorKind::invalid_argument, "checkpoint algo '" + ck.algo +
                                              "' does not match requested '" + cfg.algo + "'");
      }
      cfg.model = ck.model;
      TrainConfig t = ck.train;
      t.iterations = cfg.train.iterations;
      t.threads = cfg.train.threads;
      t.eval_every = cfg.train.eval_every;
      cfg.train = t;
      cfg.svi_buffer = ck.svi_buffer;
      state = ck.to_svi_state();
      trace = load_resume_trace(out.metrics_path, state.iteration);
    } else {
      state = init_svi_trainer_state(cfg.model, cfg.train,
                                     static_cast<int64_t>(train.size()));
    }
    train_svi(train, test, cfg.model, cfg.train, cfg.svi_buffer, state, trace, on_row);
    save_checkpoint(Checkpoint::from_svi(cfg.model, cfg.train, cfg.svi_buffer, state),
                    out.checkpoint_path);
  }

  emit_metrics(trace, out.metrics_path);
  out.final_heldout_ll = trace.empty() ? 0.0 : trace.back().heldout_ll;
  return out;
}

EvalResult run_eval(const std::string& checkpoint_path, const std::string& stream_path,
                    double holdout_frac) {
  Checkpoint ck = load_checkpoint(checkpoint_path);
  TokenStream stream = load_stream(stream_path);
  if (static_cast<int>(stream.W) > ck.model.W) {
    fail(ErrorKind::data, "stream contains tokens outside the checkpoint vocabulary");
  }
  auto [train, test] = train_test_split(stream, holdout_frac);
  (void)train;

  PointParams params = ck.algo == "scvi" ? point_estimates(ck.stats, ck.model)
                                         : svi_point_estimates(ck.svi, ck.model);
  EvalResult res;
  res.algo = ck.algo;
  res.iteration = ck.iteration;
  res.test_tokens = static_cast<int64_t>(test.size());
  res.nats_per_token = predictive_log_likelihood(params, test);
  return res;
}

}  // namespace schmm
