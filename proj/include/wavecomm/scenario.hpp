#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wavecomm/fusion.hpp"
#include "wavecomm/perception.hpp"
#include "wavecomm/tensor.hpp"

namespace wavecomm {

struct ScenarioConfig {
    int world_h = 64;
    int world_w = 64;
    int n_agents = 3;
    int n_objects = 6;
    int obj_min = 6;  // object side lengths drawn uniformly from [obj_min, obj_max]
    int obj_max = 12;
    double radius = 28.0;
    bool occlusion = true;
    std::uint64_t seed = 1;
};

struct AgentPose {
    int x = 0, y = 0;
};

struct Scenario {
    ScenarioConfig cfg;
    nn::Tensor world;            // 1 x H x W occupancy, values {0,1}
    std::vector<AgentPose> agents;
    std::vector<Box> boxes;      // world-frame object boxes
    std::vector<int> object_id;  // per world cell: object index or -1
};

// Deterministic world synthesis: filled rectangles, pairwise non-overlapping
// with a one-cell margin, agents on empty cells. Placement retries are capped
// at 1000 per entity.
Scenario gen_scenario(const ScenarioConfig& cfg);

// Agent-centered view of world size: local (y, x) maps to world
// (y - H/2 + agent.y, x - W/2 + agent.x). Cells beyond the sensing radius are
// zero; with occlusion on, object cells whose ray to the agent crosses a
// different object are zeroed too.
nn::Tensor render_local_view(const Scenario& sc, int agent_idx);

// Ground truth in an agent's local frame: boxes entirely inside the local
// grid (translated), with the detection target rasterized at feature
// resolution.
DetectionTruth truth_in_agent_frame(const Scenario& sc, int agent_idx);

// Sender-to-ego pose at feature resolution: pure translation by
// (sender - ego) / 2 grid cells.
AffinePose pose_to_ego(const Scenario& sc, int sender_idx, int ego_idx);

void save_scenario(const Scenario& sc, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace wavecomm
