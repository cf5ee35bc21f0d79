#include "mshap/config.hpp"

#include <set>

#include "mshap/table.hpp"

namespace mshap {
namespace {

using Json = nlohmann::ordered_json;

void reject_unknown(const Json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + where + key + "' has the wrong type");
  }
}

Json method_json(AlphaMethod m) { return std::string(to_string(m)); }

}  // namespace

GridSpec RunConfig::grid() const {
  GridSpec g;
  g.y1 = simulate.y1;
  g.y2 = simulate.y2;
  g.theta1 = simulate.theta1;
  g.theta2 = simulate.theta2;
  g.n = simulate.n;
  g.background_size = simulate.background_size;
  g.covariates = CovariateSpec{simulate.covariates};
  g.seed = seed;
  g.enumeration_limit = enum_limit;
  g.sampling_permutations = simulate.sampling_permutations;
  return g;
}

BenchConfig RunConfig::bench_config() const {
  BenchConfig b;
  b.p_values = bench.p_values;
  b.n_values = bench.n_values;
  b.background_size = bench.background_size;
  b.seed = seed;
  b.repetitions = bench.repetitions;
  b.sampling_permutations = bench.sampling_permutations;
  b.enumeration_limit = enum_limit;
  b.min_batch_seconds = bench.min_batch_seconds;
  return b;
}

Json to_json(const RunConfig& c) {
  Json j = Json::object();
  j["command"] = c.command;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["enum_limit"] = c.enum_limit;
  j["out_dir"] = c.out_dir;

  Json combine = Json::object();
  combine["f_shap"] = c.combine.f_shap;
  combine["g_shap"] = c.combine.g_shap;
  combine["mu_h"] = c.combine.mu_h ? Json(*c.combine.mu_h) : Json("auto");
  combine["method"] = method_json(c.combine.method);
  j["combine"] = combine;

  Json score = Json::object();
  score["candidate"] = c.score.candidate;
  score["reference"] = c.score.reference;
  score["theta1"] = c.score.theta1;
  score["theta2"] = c.score.theta2;
  j["score"] = score;

  Json sim = Json::object();
  Json y1 = Json::array();
  for (ResponseId id : c.simulate.y1) y1.push_back(std::string(to_string(id)));
  Json y2 = Json::array();
  for (ResponseId id : c.simulate.y2) y2.push_back(std::string(to_string(id)));
  sim["y1"] = y1;
  sim["y2"] = y2;
  sim["theta1"] = c.simulate.theta1;
  sim["theta2"] = c.simulate.theta2;
  sim["n"] = c.simulate.n;
  sim["background_size"] = c.simulate.background_size;
  Json cov = Json::array();
  for (const auto& [lo, hi] : c.simulate.covariates) cov.push_back(Json::array({lo, hi}));
  sim["covariates"] = cov;
  sim["sampling_permutations"] = c.simulate.sampling_permutations;
  j["simulate"] = sim;

  Json bench = Json::object();
  bench["p_values"] = c.bench.p_values;
  bench["n_values"] = c.bench.n_values;
  bench["background_size"] = c.bench.background_size;
  bench["repetitions"] = c.bench.repetitions;
  bench["sampling_permutations"] = c.bench.sampling_permutations;
  bench["min_batch_seconds"] = c.bench.min_batch_seconds;
  j["bench"] = bench;

  Json summary = Json::object();
  summary["mshap"] = c.summary.mshap;
  summary["covariates"] = c.summary.covariates;
  j["summary"] = summary;
  return j;
}

RunConfig merge_config(const Json& j, RunConfig c) {
  reject_unknown(j, {"command", "seed", "threads", "enum_limit", "out_dir", "combine", "score",
                     "simulate", "bench", "summary"},
                 "");
  read(j, "command", c.command, "");
  read(j, "seed", c.seed, "");
  read(j, "threads", c.threads, "");
  read(j, "enum_limit", c.enum_limit, "");
  read(j, "out_dir", c.out_dir, "");

  if (j.contains("combine")) {
    const Json& s = j["combine"];
    reject_unknown(s, {"f_shap", "g_shap", "mu_h", "method"}, "combine.");
    read(s, "f_shap", c.combine.f_shap, "combine.");
    read(s, "g_shap", c.combine.g_shap, "combine.");
    if (s.contains("mu_h")) {
      const Json& mu = s["mu_h"];
      if (mu.is_string() && mu.get<std::string>() == "auto") {
        c.combine.mu_h.reset();
      } else if (mu.is_number()) {
        c.combine.mu_h = mu.get<double>();
      } else {
        throw ConfigError("combine.mu_h must be a number or \"auto\"");
      }
    }
    if (s.contains("method")) {
      std::string name;
      read(s, "method", name, "combine.");
      try {
        c.combine.method = parse_alpha_method(name);
      } catch (const ParseError& e) {
        throw ConfigError(e.what());
      }
    }
  }

  if (j.contains("score")) {
    const Json& s = j["score"];
    reject_unknown(s, {"candidate", "reference", "theta1", "theta2"}, "score.");
    read(s, "candidate", c.score.candidate, "score.");
    read(s, "reference", c.score.reference, "score.");
    read(s, "theta1", c.score.theta1, "score.");
    read(s, "theta2", c.score.theta2, "score.");
  }

  if (j.contains("simulate")) {
    const Json& s = j["simulate"];
    reject_unknown(s, {"y1", "y2", "theta1", "theta2", "n", "background_size", "covariates",
                       "sampling_permutations"},
                   "simulate.");
    const auto read_ids = [&](const char* key, std::vector<ResponseId>& out) {
      if (!s.contains(key)) return;
      std::vector<std::string> names;
      read(s, key, names, "simulate.");
      out.clear();
      try {
        for (const std::string& n : names) out.push_back(parse_response_id(n));
      } catch (const ParseError& e) {
        throw ConfigError(e.what());
      }
    };
    read_ids("y1", c.simulate.y1);
    read_ids("y2", c.simulate.y2);
    read(s, "theta1", c.simulate.theta1, "simulate.");
    read(s, "theta2", c.simulate.theta2, "simulate.");
    read(s, "n", c.simulate.n, "simulate.");
    read(s, "background_size", c.simulate.background_size, "simulate.");
    if (s.contains("covariates")) {
      std::vector<std::vector<double>> rows;
      read(s, "covariates", rows, "simulate.");
      c.simulate.covariates.clear();
      for (const auto& r : rows) {
        if (r.size() != 2) throw ConfigError("simulate.covariates entries must be [lo, hi]");
        c.simulate.covariates.emplace_back(r[0], r[1]);
      }
    }
    read(s, "sampling_permutations", c.simulate.sampling_permutations, "simulate.");
  }

  if (j.contains("bench")) {
    const Json& s = j["bench"];
    reject_unknown(s, {"p_values", "n_values", "background_size", "repetitions",
                       "sampling_permutations", "min_batch_seconds"},
                   "bench.");
    read(s, "p_values", c.bench.p_values, "bench.");
    read(s, "n_values", c.bench.n_values, "bench.");
    read(s, "background_size", c.bench.background_size, "bench.");
    read(s, "repetitions", c.bench.repetitions, "bench.");
    read(s, "sampling_permutations", c.bench.sampling_permutations, "bench.");
    read(s, "min_batch_seconds", c.bench.min_batch_seconds, "bench.");
  }

  if (j.contains("summary")) {
    const Json& s = j["summary"];
    reject_unknown(s, {"mshap", "covariates"}, "summary.");
    read(s, "mshap", c.summary.mshap, "summary.");
    read(s, "covariates", c.summary.covariates, "summary.");
  }
  return c;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return merge_config(j, std::move(base));
}

}  // namespace mshap
