// JSON <-> ExperimentConfig. Parsing is strict: unknown keys, wrong types,
// and out-of-domain enum strings are errors, so a typo cannot silently fall
// back to a default and corrupt a study.
#pragma once

#include "sge/experiment.hpp"

#include <string>

namespace sgecli {

sge::ExperimentConfig parse_config_text(const std::string& text,
                                        const std::string& origin = "<inline>");
sge::ExperimentConfig load_config(const std::string& path);

// Full echo of a resolved config with a stable key order; embedded in the
// run manifest so outputs are self-describing.
std::string config_echo_json(const sge::ExperimentConfig& cfg);

}  // namespace sgecli
