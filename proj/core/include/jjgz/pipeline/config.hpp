#pragma once

#include "jjgz/pipeline/run.hpp"

#include <iosfwd>
#include <string>

namespace jjgz {

/// JSON run configuration. Unknown keys are configuration errors, and
/// table paths are resolved against `base_dir`.
RunConfig parse_run_config(std::istream& in, const std::string& base_dir = {});
RunConfig load_run_config(const std::string& path);

NoiseMethod parse_method(const std::string& name);
OutputFormat parse_format(const std::string& name);

} // namespace jjgz
