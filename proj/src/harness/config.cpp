#include "lanesafe/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "lanesafe/error.hpp"

namespace lanesafe::harness {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Pasac: return "pasac";
    case Algorithm::PasacPidLag: return "pasac-pidlag";
    case Algorithm::PasacLag: return "pasac-lag";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "pasac") return Algorithm::Pasac;
  if (name == "pasac-pidlag") return Algorithm::PasacPidLag;
  if (name == "pasac-lag") return Algorithm::PasacLag;
  throw ConfigError("unknown algorithm '" + std::string(name) +
                    "' (expected pasac, pasac-pidlag or pasac-lag)");
}

void TrainConfig::validate() const {
  if (total_timesteps == 0) throw ConfigError("total_timesteps must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (buffer_size < batch_size) throw ConfigError("buffer_size must be at least batch_size");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw ConfigError("learning rates must be positive");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  if (!std::isfinite(cost_limit) || cost_limit < 0.0) throw ConfigError("cost_limit must be >= 0");
  if (!std::isfinite(lambda_init) || lambda_init < 0.0) throw ConfigError("lambda_init must be >= 0");
  if (!std::isfinite(lambda_lr)) throw ConfigError("lambda_lr must be finite");
  if (!(density > 0.0)) throw ConfigError("density must be positive");
  if (eval_episodes == 0) throw ConfigError("eval_episodes must be positive");
  if (hidden_units.empty()) throw ConfigError("hidden_units must not be empty");
  for (auto h : hidden_units)
    if (h == 0) throw ConfigError("hidden_units entries must be positive");
  if (cost_window == 0) throw ConfigError("cost_window must be positive");
  try {
    pid.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

namespace {

using nlohmann::json;

const std::set<std::string> kKeys = {
    "algorithm", "total_timesteps", "warmup_steps", "batch_size",   "gamma",
    "alpha",     "actor_lr",        "critic_lr",    "buffer_size",  "tau",
    "pid_kp",    "pid_ki",          "pid_kd",       "cost_limit",   "lambda_init",
    "lambda_lr", "density",         "seed",         "eval_episodes", "hidden_units",
    "cost_window"};

}  // namespace

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path.string() + ": expected a JSON object");
  TrainConfig c;
  try {
    for (const auto& [key, value] : j.items())
      if (!kKeys.contains(key)) throw ConfigError(path.string() + ": unknown key '" + key + "'");
    if (j.contains("algorithm")) c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    c.total_timesteps = j.value("total_timesteps", c.total_timesteps);
    c.warmup_steps = j.value("warmup_steps", c.warmup_steps);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.gamma = j.value("gamma", c.gamma);
    c.alpha = j.value("alpha", c.alpha);
    c.actor_lr = j.value("actor_lr", c.actor_lr);
    c.critic_lr = j.value("critic_lr", c.critic_lr);
    c.buffer_size = j.value("buffer_size", c.buffer_size);
    c.tau = j.value("tau", c.tau);
    c.pid.kp = j.value("pid_kp", c.pid.kp);
    c.pid.ki = j.value("pid_ki", c.pid.ki);
    c.pid.kd = j.value("pid_kd", c.pid.kd);
    c.cost_limit = j.value("cost_limit", c.cost_limit);
    c.lambda_init = j.value("lambda_init", c.lambda_init);
    c.lambda_lr = j.value("lambda_lr", c.lambda_lr);
    c.density = j.value("density", c.density);
    c.seed = j.value("seed", c.seed);
    c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
    if (j.contains("hidden_units")) c.hidden_units = j.at("hidden_units").get<std::vector<std::size_t>>();
    c.cost_window = j.value("cost_window", c.cost_window);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

void save_train_config(const std::filesystem::path& path, const TrainConfig& c) {
  json j = {{"algorithm", std::string(to_string(c.algorithm))},
            {"total_timesteps", c.total_timesteps},
            {"warmup_steps", c.warmup_steps},
            {"batch_size", c.batch_size},
            {"gamma", c.gamma},
            {"alpha", c.alpha},
            {"actor_lr", c.actor_lr},
            {"critic_lr", c.critic_lr},
            {"buffer_size", c.buffer_size},
            {"tau", c.tau},
            {"pid_kp", c.pid.kp},
            {"pid_ki", c.pid.ki},
            {"pid_kd", c.pid.kd},
            {"cost_limit", c.cost_limit},
            {"lambda_init", c.lambda_init},
            {"lambda_lr", c.lambda_lr},
            {"density", c.density},
            {"seed", c.seed},
            {"eval_episodes", c.eval_episodes},
            {"hidden_units", c.hidden_units},
            {"cost_window", c.cost_window}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace lanesafe::harness
