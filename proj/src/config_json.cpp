#include "schmm/config_json.hpp"

namespace schmm {

namespace {

void reject_unknown_keys(const nlohmann::json& j,
                         std::initializer_list<const char*> known,
                         const char* what) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      fail(ErrorKind::invalid_argument,
           std::string(what) + ": unknown config key '" + key + "'");
    }
  }
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& dst) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      dst = it->get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(ErrorKind::invalid_argument,
           std::string("config key '") + key + "' has wrong type");
    }
  }
}

}  // namespace

nlohmann::json model_config_json(const ModelConfig& cfg) {
  return {{"K", cfg.K}, {"W", cfg.W}, {"alpha", cfg.alpha}, {"beta", cfg.beta}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"K", "W", "alpha", "beta"}, "model config");
  ModelConfig cfg;
  read_field(j, "K", cfg.K);
  read_field(j, "W", cfg.W);
  read_field(j, "alpha", cfg.alpha);
  read_field(j, "beta", cfg.beta);
  return cfg;
}

nlohmann::json train_config_json(const TrainConfig& cfg) {
  return {{"L", cfg.L},
          {"M", cfg.M},
          {"kappa", cfg.kappa},
          {"iterations", cfg.iterations},
          {"seed", cfg.seed},
          {"guard_policy", guard_policy_name(cfg.guard_policy)},
          {"init_scale", cfg.init_scale},
          {"normalize_inner_rows", cfg.normalize_inner_rows},
          {"threads", cfg.threads},
          {"eval_every", cfg.eval_every}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"L", "M", "kappa", "iterations", "seed", "guard_policy",
                       "init_scale", "normalize_inner_rows", "threads", "eval_every"},
                      "train config");
  TrainConfig cfg;
  read_field(j, "L", cfg.L);
  read_field(j, "M", cfg.M);
  read_field(j, "kappa", cfg.kappa);
  read_field(j, "iterations", cfg.iterations);
  read_field(j, "seed", cfg.seed);
  if (j.contains("guard_policy")) {
    cfg.guard_policy = parse_guard_policy(j.at("guard_policy").get<std::string>());
  }
  read_field(j, "init_scale", cfg.init_scale);
  read_field(j, "normalize_inner_rows", cfg.normalize_inner_rows);
  read_field(j, "threads", cfg.threads);
  read_field(j, "eval_every", cfg.eval_every);
  return cfg;
}

}  // namespace schmm
