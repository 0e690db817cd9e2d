#pragma once

// Runs the CLI binary in the data directory and captures its outputs.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace cli {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// args is appended to the binary verbatim; scratch holds the captured
// streams and any files the command writes.
inline Run run(const std::string& args, const std::filesystem::path& scratch) {
  std::filesystem::create_directories(scratch);
  std::filesystem::path out = scratch / "stdout.txt", err = scratch / "stderr.txt";
  std::string cmd = "cd '" + std::string(LQFT_DATA_DIR) + "' && '" + std::string(LQFT_CLI) + "' " +
                    args + " > '" + out.string() + "' 2> '" + err.string() + "'";
  int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lqft-" + name + "-" + std::to_string(::getpid()));
}

}  // namespace cli
