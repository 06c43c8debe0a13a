#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace redline::process {

struct Result {
  int exit_code = -1;  // -1 when killed by a signal
  std::string out;
  std::string err;
};

struct SpawnError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Run `argv` (looked up on PATH) in `cwd`, feeding `input` on stdin and
/// capturing stdout and stderr. Throws SpawnError when it cannot start.
Result run(const std::vector<std::string>& argv, const std::filesystem::path& cwd = {}, const std::string& input = {});

}  // namespace redline::process
