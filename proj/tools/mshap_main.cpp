// Command-line front end: combine, score, simulate, bench, summary-data.
//
// Exit codes: 0 success, 2 usage or config error, 3 data or validation
// error, 4 resource limit (enumeration limit exceeded).

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "mshap/commands.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitLimit = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attributions for product-of-outputs models"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, f_shap, g_shap, mu_h, method, out_dir, candidate, reference;
  std::string summary_mshap, summary_covariates;
  double theta1 = 0.0, theta2 = 0.0;
  std::uint64_t seed = 0;
  int threads = 1, enum_limit = 16;

  const auto flag = [&app](const std::string& name, auto& target, const std::string& help,
                           const std::string& env) {
    return app.add_option(name, target, help)->envname("MSHAP_" + env);
  };
  CLI::Option* o_config = flag("--config", config_path, "JSON run configuration", "CONFIG");
  CLI::Option* o_f = flag("--f-shap", f_shap, "attribution table of the first part", "F_SHAP");
  CLI::Option* o_g = flag("--g-shap", g_shap, "attribution table of the second part", "G_SHAP");
  CLI::Option* o_mu = flag("--mu-h", mu_h, "mean product prediction, or 'auto'", "MU_H");
  CLI::Option* o_method = flag("--method", method, "uniform|raw|absolute|squared", "METHOD");
  CLI::Option* o_t1 = flag("--theta1", theta1, "direction slack", "THETA1");
  CLI::Option* o_t2 = flag("--theta2", theta2, "value slack", "THETA2");
  CLI::Option* o_out = flag("--out-dir", out_dir, "output directory", "OUT_DIR");
  CLI::Option* o_seed = flag("--seed", seed, "base random seed", "SEED");
  CLI::Option* o_threads = flag("--threads", threads, "worker threads", "THREADS");
  CLI::Option* o_limit = flag("--enum-limit", enum_limit, "exact enumeration feature limit", "ENUM_LIMIT");
  CLI::Option* o_cand = flag("--candidate", candidate, "candidate attribution table", "CANDIDATE");
  CLI::Option* o_ref = flag("--reference", reference, "reference attribution table", "REFERENCE");
  CLI::Option* o_sm = flag("--mshap", summary_mshap, "attribution table to summarize", "MSHAP");
  CLI::Option* o_sc = flag("--covariates", summary_covariates, "covariate values table", "COVARIATES");

  app.add_subcommand("combine", "compose two part explanations into one for their product");
  app.add_subcommand("score", "score a candidate attribution table against a reference");
  app.add_subcommand("simulate", "run the response-function scenario grid");
  app.add_subcommand("bench", "time composition against direct explanation of the product");
  app.add_subcommand("summary-data", "emit importance and per-observation plot data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    mshap::RunConfig config;
    if (*o_config) config = mshap::load_config(config_path);
    const std::string command = app.get_subcommands().front()->get_name();
    if (!config.command.empty() && config.command != command) {
      throw mshap::ConfigError("config was written for '" + config.command + "', not '" + command + "'");
    }
    config.command = command;
    if (*o_f) config.combine.f_shap = f_shap;
    if (*o_g) config.combine.g_shap = g_shap;
    if (*o_mu) {
      if (mu_h == "auto") {
        config.combine.mu_h.reset();
      } else {
        try {
          config.combine.mu_h = mshap::parse_double(mu_h);
        } catch (const mshap::ParseError&) {
          throw mshap::ConfigError("--mu-h must be a number or 'auto'");
        }
      }
    }
    if (*o_method) {
      try {
        config.combine.method = mshap::parse_alpha_method(method);
      } catch (const mshap::ParseError& e) {
        throw mshap::ConfigError(e.what());
      }
    }
    if (*o_t1) config.score.theta1 = theta1;
    if (*o_t2) config.score.theta2 = theta2;
    if (*o_out) config.out_dir = out_dir;
    if (*o_seed) config.seed = seed;
    if (*o_threads) config.threads = threads;
    if (*o_limit) config.enum_limit = enum_limit;
    if (*o_cand) config.score.candidate = candidate;
    if (*o_ref) config.score.reference = reference;
    if (*o_sm) config.summary.mshap = summary_mshap;
    if (*o_sc) config.summary.covariates = summary_covariates;
    if (command == "score") {
      try {
        mshap::ScoreParams{config.score.theta1, config.score.theta2}.validate();
      } catch (const mshap::InvalidInputError& e) {
        throw mshap::ConfigError(e.what());
      }
    }

    const mshap::CommandOutput output = mshap::run_command(config);
    mshap::write_outputs(config, output);
    std::cout << output.report;
    return 0;
  } catch (const mshap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mshap::EnumerationLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitLimit;
  } catch (const mshap::Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitData;
  }
}
