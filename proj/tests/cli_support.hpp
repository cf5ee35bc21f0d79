#pragma once

// Helpers for driving the mshap executable from tests.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace mshap::cli {

inline const std::string kCli = MSHAP_CLI_PATH;
inline const std::filesystem::path kFixtures = MSHAP_FIXTURE_DIR;

inline std::string fixture(const std::string& name) { return (kFixtures / name).string(); }

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs `kCli args` with optional `env` assignments prefixed, capturing both
// streams into files under `scratch`.
inline RunResult run(const std::filesystem::path& scratch, const std::string& args,
                     const std::string& env = "") {
  std::filesystem::create_directories(scratch);
  const auto out = scratch / "stdout.txt", err = scratch / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + kCli + "' " + args + " >'" +
                          out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mshap_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace mshap::cli
