// Copyright 2026 The nvlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "nvlab/config.hpp"

#include <fstream>
#include <set>

#include "nvlab/error.hpp"
#include "nvlab/serialization.hpp"
#include "nvlab/session.hpp"

namespace nvlab {
namespace {

double parse_double(const std::string& text, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError(field, "not a number: '" + text + "'");
  return v;
}

int parse_int(const std::string& text, const std::string& field) {
  const double v = parse_double(text, field);
  if (v != double(int(v))) throw ConfigError(field, "not an integer: '" + text + "'");
  return int(v);
}

std::string sanitize(const std::string& label) {
  std::string out;
  for (const char c : label) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
    out.push_back(keep ? c : '_');
  }
  return out;
}

template <typename T>
void take(const nlohmann::json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  if (agents.empty()) throw ConfigError("agents", "at least one agent is required");
  for (const auto& a : agents) parse_agent(a, temperature, max_parse_retries).validate();
  if (experiments.empty()) throw ConfigError("experiments", "at least one experiment is required");
  for (const auto& e : experiments) {
    try {
      experiment_from_string(e);
    } catch (const Error&) {
      throw ConfigError("experiments", "unknown experiment '" + e + "' (use E1, E2 or E3)");
    }
  }
  if (distributions.empty()) throw ConfigError("distributions", "at least one distribution is required");
  for (const auto& d : distributions) {
    try {
      demand_kind_from_string(d);
    } catch (const Error&) {
      throw ConfigError("distributions", "unknown distribution '" + d + "'");
    }
  }
  if (order_conditions.empty()) throw ConfigError("order_conditions", "at least one is required");
  for (const auto& o : order_conditions) {
    try {
      order_condition_from_string(o);
    } catch (const Error&) {
      throw ConfigError("order_conditions", "unknown order condition '" + o + "'");
    }
  }
  if (repetitions < 1) throw ConfigError("repetitions", "must be >= 1");
  if (rounds < 1) throw ConfigError("rounds", "must be >= 1");
  if (workers < 1) throw ConfigError("workers", "must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  if (lognormal_log_mean.has_value() != lognormal_log_sd.has_value()) {
    throw ConfigError("lognormal", "log_mean and log_sd must be given together");
  }
  if (lognormal_log_sd && !(*lognormal_log_sd > 0.0)) throw ConfigError("lognormal.log_sd", "must be > 0");
  if (has_llm_agent(*this) && endpoint.empty()) throw ConfigError("endpoint", "llm agents need an endpoint");
  if (credential_env.empty()) throw ConfigError("credential_env", "must name an environment variable");
  if (transport.max_retries < 0) throw ConfigError("transport.max_retries", "must be >= 0");
  if (transport.base_delay_ms < 0 || transport.max_delay_ms < 0) {
    throw ConfigError("transport.delay", "must be >= 0");
  }
  if (transport.timeout_s < 1) throw ConfigError("transport.timeout_s", "must be >= 1");
  if (transport.request_budget < 1) throw ConfigError("transport.request_budget", "must be >= 1");
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j{{"endpoint", c.endpoint},
                   {"credential_env", c.credential_env},
                   {"agents", c.agents},
                   {"temperature", c.temperature},
                   {"max_parse_retries", c.max_parse_retries},
                   {"experiments", c.experiments},
                   {"distributions", c.distributions},
                   {"risk_neutral_lognormal", c.risk_neutral_lognormal},
                   {"order_conditions", c.order_conditions},
                   {"repetitions", c.repetitions},
                   {"rounds", c.rounds},
                   {"seed", c.seed},
                   {"output_dir", c.output_dir},
                   {"run_name", c.run_name},
                   {"workers", c.workers},
                   {"transcript_continuity", c.transcript_continuity},
                   {"transport",
                    {{"max_retries", c.transport.max_retries},
                     {"base_delay_ms", c.transport.base_delay_ms},
                     {"max_delay_ms", c.transport.max_delay_ms},
                     {"timeout_s", c.transport.timeout_s},
                     {"requests_per_second", c.transport.requests_per_second},
                     {"burst", c.transport.burst},
                     {"request_budget", c.transport.request_budget}}}};
  if (c.lognormal_log_mean) {
    j["lognormal"] = {{"log_mean", *c.lognormal_log_mean}, {"log_sd", *c.lognormal_log_sd}};
  }
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  static const std::set<std::string> known = {
      "endpoint", "credential_env", "agents", "temperature", "max_parse_retries", "experiments",
      "distributions", "risk_neutral_lognormal", "order_conditions", "repetitions", "rounds",
      "seed", "output_dir", "run_name", "workers", "transcript_continuity", "transport",
      "lognormal"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(key, "unknown config key");
  }
  RunConfig c;
  take(j, "endpoint", c.endpoint);
  take(j, "credential_env", c.credential_env);
  take(j, "agents", c.agents);
  take(j, "temperature", c.temperature);
  take(j, "max_parse_retries", c.max_parse_retries);
  take(j, "experiments", c.experiments);
  take(j, "distributions", c.distributions);
  take(j, "risk_neutral_lognormal", c.risk_neutral_lognormal);
  take(j, "order_conditions", c.order_conditions);
  take(j, "repetitions", c.repetitions);
  take(j, "rounds", c.rounds);
  take(j, "seed", c.seed);
  take(j, "output_dir", c.output_dir);
  take(j, "run_name", c.run_name);
  take(j, "workers", c.workers);
  take(j, "transcript_continuity", c.transcript_continuity);
  if (j.contains("transport")) {
    const auto& t = j.at("transport");
    static const std::set<std::string> transport_keys = {
        "max_retries", "base_delay_ms", "max_delay_ms", "timeout_s", "requests_per_second",
        "burst", "request_budget"};
    for (const auto& [key, value] : t.items()) {
      if (!transport_keys.count(key)) throw ConfigError("transport." + key, "unknown config key");
    }
    take(t, "max_retries", c.transport.max_retries);
    take(t, "base_delay_ms", c.transport.base_delay_ms);
    take(t, "max_delay_ms", c.transport.max_delay_ms);
    take(t, "timeout_s", c.transport.timeout_s);
    take(t, "requests_per_second", c.transport.requests_per_second);
    take(t, "burst", c.transport.burst);
    take(t, "request_budget", c.transport.request_budget);
  }
  if (j.contains("lognormal")) {
    const auto& l = j.at("lognormal");
    double mean = 0.0, sd = 0.0;
    take(l, "log_mean", mean);
    take(l, "log_sd", sd);
    if (!l.contains("log_mean") || !l.contains("log_sd")) {
      throw ConfigError("lognormal", "log_mean and log_sd must be given together");
    }
    c.lognormal_log_mean = mean;
    c.lognormal_log_sd = sd;
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("--config", path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

AgentSpec parse_agent(const std::string& text, double temperature, int max_parse_retries) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  const std::string field = "agents[" + text + "]";
  AgentSpec spec;
  try {
    spec.kind = agent_kind_from_string(kind);
  } catch (const Error&) {
    throw ConfigError(field, "unknown agent kind '" + kind + "'");
  }
  const auto need_arg = [&] {
    if (arg.empty()) throw ConfigError(field, "agent '" + kind + "' needs a parameter");
  };
  switch (spec.kind) {
    case AgentKind::kOptimal:
      if (!arg.empty()) throw ConfigError(field, "optimal takes no parameter");
      break;
    case AgentKind::kRandom:
      if (!arg.empty()) spec.seed = std::uint64_t(parse_double(arg, field));
      break;
    case AgentKind::kMeanAnchor:
      need_arg();
      spec.anchor_weight = parse_double(arg, field);
      break;
    case AgentKind::kDemandChaser: {
      need_arg();
      const auto arrow = arg.find("->");
      if (arrow == std::string::npos) {
        spec.chase_rate = parse_double(arg, field);
        break;
      }
      const auto at = arg.find('@', arrow);
      if (at == std::string::npos) throw ConfigError(field, "expected EARLY->LATE@ROUND");
      spec.chase_rate_early = parse_double(arg.substr(0, arrow), field);
      spec.chase_rate = parse_double(arg.substr(arrow + 2, at - arrow - 2), field);
      spec.switch_round = parse_int(arg.substr(at + 1), field);
      break;
    }
    case AgentKind::kFixture: {
      need_arg();
      const auto slash = arg.find('/');
      if (slash == std::string::npos) throw ConfigError(field, "expected HIGH/LOW mean orders");
      spec.fixture_mean_high = parse_double(arg.substr(0, slash), field);
      spec.fixture_mean_low = parse_double(arg.substr(slash + 1), field);
      break;
    }
    case AgentKind::kLlm:
      need_arg();
      spec.model_name = arg;
      spec.temperature = temperature;
      spec.parse_policy.max_retries = max_parse_retries;
      break;
  }
  spec.validate();
  return spec;
}

bool has_llm_agent(const RunConfig& config) {
  for (const auto& a : config.agents) {
    if (a.rfind("llm:", 0) == 0 || a == "llm") return true;
  }
  return false;
}

std::vector<ExperimentPlan> build_plans(const RunConfig& config, const std::string& template_digest) {
  config.validate();
  std::vector<ExperimentPlan> plans;
  for (const auto& agent_text : config.agents) {
    ExperimentPlan plan;
    plan.transcript_continuity = config.transcript_continuity;
    plan.template_digest = template_digest;
    const AgentSpec agent = parse_agent(agent_text, config.temperature, config.max_parse_retries);
    for (const auto& exp_name : config.experiments) {
      const Experiment exp = experiment_from_string(exp_name);
      for (const auto& dist_name : config.distributions) {
        const DemandKind kind = demand_kind_from_string(dist_name);
        if (exp == Experiment::kRiskNeutral && kind == DemandKind::kLognormal &&
            !config.risk_neutral_lognormal) {
          continue;
        }
        for (const auto& oc : config.order_conditions) {
          PlanCondition c;
          c.high = make_scenario(exp, kind, Margin::kHigh, config.rounds);
          c.low = make_scenario(exp, kind, Margin::kLow, config.rounds);
          if (kind == DemandKind::kLognormal && config.lognormal_log_mean) {
            for (auto* sc : {&c.high, &c.low}) {
              sc->demand = DemandDistribution::lognormal(sc->demand.lower(), sc->demand.upper(),
                                                         *config.lognormal_log_mean,
                                                         *config.lognormal_log_sd);
            }
          }
          c.agent = agent;
          c.order_condition = order_condition_from_string(oc);
          c.repetitions = config.repetitions;
          c.rounds_per_block = config.rounds;
          c.base_seed = config.seed;
          plan.conditions.push_back(std::move(c));
        }
      }
    }
    if (plan.conditions.empty()) throw ConfigError("distributions", "the selection yields no conditions");
    if (!config.run_name.empty()) {
      plan.run_id = config.agents.size() == 1 ? config.run_name
                                              : config.run_name + "-" + sanitize(agent.label());
    } else {
      plan.run_id = default_run_id(plan);
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

}  // namespace nvlab
