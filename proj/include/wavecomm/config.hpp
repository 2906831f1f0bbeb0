#pragma once

#include <string>
#include <vector>

#include "wavecomm/harness.hpp"

namespace wavecomm {

// Full run configuration: the pipeline knobs plus the ablation selection.
struct RunConfig {
    PipelineConfig pipe;
    AblationSuite suite = AblationSuite::Reconstruction;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
};

// Sectioned key=value document. Sections: [scenario], [train], [loss],
// [codec], [ablation]. Lines starting with '#' and blank lines are ignored.
// Unknown sections or keys are rejected. parse(render(cfg)) reproduces cfg
// exactly and render is byte-stable.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
std::string render_config(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::string& path);

// Command-line override with a dotted key, e.g. "train.lr" = "0.01".
void apply_override(RunConfig& cfg, const std::string& dotted_key, const std::string& value);

std::vector<std::uint64_t> parse_seed_list(const std::string& csv);

}  // namespace wavecomm
