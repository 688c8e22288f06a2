#pragma once

#include <string>
#include <vector>

namespace levyrkhs {

/// Parses and runs the experiment described by a JSON config file; writes
/// manifest.json plus CSV outputs under <output_dir>/<experiment>/<run_id>/.
/// Returns the process exit code (0 on success) and prints failures to
/// stderr.
int run_config_file(const std::string& config_path);

/// Validation-only pass: returns human-readable problems (empty == valid).
std::vector<std::string> validate_config_file(const std::string& config_path);

}  // namespace levyrkhs
