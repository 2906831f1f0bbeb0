#include "wavecomm/scenario.hpp"

#include <cmath>
#include <cstdlib>

#include "wavecomm/bytesio.hpp"
#include "wavecomm/errors.hpp"
#include "wavecomm/rng.hpp"

namespace wavecomm {

using nn::Rng;
using nn::Tensor;

namespace {

constexpr char kMagic[4] = {'W', 'S', 'C', 'N'};
constexpr std::uint16_t kVersion = 1;
constexpr int kMaxTries = 1000;

void validate(const ScenarioConfig& cfg) {
    if (cfg.world_h < 4 || cfg.world_w < 4 || cfg.world_h % 2 || cfg.world_w % 2) {
        throw ConfigError("scenario: world dims must be even and >= 4");
    }
    if (cfg.world_h > 0xFFFF || cfg.world_w > 0xFFFF) {
        throw ConfigError("scenario: world dims exceed u16");
    }
    if (cfg.n_agents < 1) throw ConfigError("scenario: need at least one agent");
    if (cfg.n_objects < 0) throw ConfigError("scenario: negative object count");
    if (cfg.obj_min < 1 || cfg.obj_max < cfg.obj_min) {
        throw ConfigError("scenario: bad object size range");
    }
    if (cfg.obj_max > cfg.world_w - 2 || cfg.obj_max > cfg.world_h - 2) {
        throw ConfigError("scenario: objects too large for world");
    }
    if (!(cfg.radius > 0.0)) throw ConfigError("scenario: radius must be positive");
}

bool region_free(const Scenario& sc, int x0, int y0, int w, int h) {
    // One-cell margin keeps objects non-adjacent so components stay distinct.
    const int H = sc.cfg.world_h, W = sc.cfg.world_w;
    for (int y = std::max(0, y0 - 1); y < std::min(H, y0 + h + 1); ++y) {
        for (int x = std::max(0, x0 - 1); x < std::min(W, x0 + w + 1); ++x) {
            if (sc.object_id[static_cast<std::size_t>(y) * W + x] >= 0) return false;
        }
    }
    return true;
}

}  // namespace

Scenario gen_scenario(const ScenarioConfig& cfg) {
    validate(cfg);
    Scenario sc;
    sc.cfg = cfg;
    sc.world = Tensor({1, cfg.world_h, cfg.world_w});
    sc.object_id.assign(static_cast<std::size_t>(cfg.world_h) * cfg.world_w, -1);

    Rng rng(cfg.seed);
    const int H = cfg.world_h, W = cfg.world_w;

    for (int i = 0; i < cfg.n_objects; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxTries && !placed; ++attempt) {
            const int w = static_cast<int>(rng.uniform_int(cfg.obj_min, cfg.obj_max));
            const int h = static_cast<int>(rng.uniform_int(cfg.obj_min, cfg.obj_max));
            const int x0 = static_cast<int>(rng.uniform_int(0, W - w));
            const int y0 = static_cast<int>(rng.uniform_int(0, H - h));
            if (!region_free(sc, x0, y0, w, h)) continue;
            for (int y = y0; y < y0 + h; ++y) {
                for (int x = x0; x < x0 + w; ++x) {
                    sc.world.at(0, y, x) = 1.0;
                    sc.object_id[static_cast<std::size_t>(y) * W + x] = i;
                }
            }
            sc.boxes.push_back({x0, y0, w, h});
            placed = true;
        }
        if (!placed) {
            throw PlacementError("gen_scenario: could not place object " + std::to_string(i) +
                                 " after " + std::to_string(kMaxTries) + " tries");
        }
    }

    for (int a = 0; a < cfg.n_agents; ++a) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxTries && !placed; ++attempt) {
            const int x = static_cast<int>(rng.uniform_int(0, W - 1));
            const int y = static_cast<int>(rng.uniform_int(0, H - 1));
            if (sc.object_id[static_cast<std::size_t>(y) * W + x] >= 0) continue;
            bool taken = false;
            for (const auto& other : sc.agents) {
                if (other.x == x && other.y == y) taken = true;
            }
            if (taken) continue;
            sc.agents.push_back({x, y});
            placed = true;
        }
        if (!placed) {
            throw PlacementError("gen_scenario: could not place agent " + std::to_string(a));
        }
    }
    return sc;
}

namespace {

// True when any strictly intermediate cell on the integer ray belongs to an
// object other than `target_obj`.
bool ray_blocked(const Scenario& sc, int ax, int ay, int tx, int ty, int target_obj) {
    const int W = sc.cfg.world_w;
    int x = ax, y = ay;
    const int dx = std::abs(tx - ax), dy = std::abs(ty - ay);
    const int sx = ax < tx ? 1 : -1;
    const int sy = ay < ty ? 1 : -1;
    int err = dx - dy;
    while (true) {
        if (x == tx && y == ty) return false;
        if (!(x == ax && y == ay)) {
            const int id = sc.object_id[static_cast<std::size_t>(y) * W + x];
            if (id >= 0 && id != target_obj) return true;
        }
        const int e2 = 2 * err;
        if (e2 > -dy) {
            err -= dy;
            x += sx;
        }
        if (e2 < dx) {
            err += dx;
            y += sy;
        }
    }
}

}  // namespace

nn::Tensor render_local_view(const Scenario& sc, int agent_idx) {
    if (agent_idx < 0 || agent_idx >= static_cast<int>(sc.agents.size())) {
        throw ConfigError("render_local_view: bad agent index");
    }
    const AgentPose& ag = sc.agents[static_cast<std::size_t>(agent_idx)];
    const int H = sc.cfg.world_h, W = sc.cfg.world_w;
    const int cy = H / 2, cx = W / 2;
    const double r2 = sc.cfg.radius * sc.cfg.radius;

    Tensor out({1, H, W});
    for (int gy = 0; gy < H; ++gy) {
        const int wy = gy - cy + ag.y;
        if (wy < 0 || wy >= H) continue;
        for (int gx = 0; gx < W; ++gx) {
            const int wx = gx - cx + ag.x;
            if (wx < 0 || wx >= W) continue;
            const double dy = wy - ag.y, dx = wx - ag.x;
            if (dy * dy + dx * dx > r2) continue;
            if (sc.world.at(0, wy, wx) == 0.0) continue;
            if (sc.cfg.occlusion) {
                const int id = sc.object_id[static_cast<std::size_t>(wy) * W + wx];
                if (ray_blocked(sc, ag.x, ag.y, wx, wy, id)) continue;
            }
            out.at(0, gy, gx) = 1.0;
        }
    }
    return out;
}

DetectionTruth truth_in_agent_frame(const Scenario& sc, int agent_idx) {
    if (agent_idx < 0 || agent_idx >= static_cast<int>(sc.agents.size())) {
        throw ConfigError("truth_in_agent_frame: bad agent index");
    }
    const AgentPose& ag = sc.agents[static_cast<std::size_t>(agent_idx)];
    const int H = sc.cfg.world_h, W = sc.cfg.world_w;
    const int cy = H / 2, cx = W / 2;

    DetectionTruth truth;
    Tensor mask({1, H, W});
    for (const Box& b : sc.boxes) {
        const int gx0 = b.x0 - ag.x + cx;
        const int gy0 = b.y0 - ag.y + cy;
        if (gx0 < 0 || gy0 < 0 || gx0 + b.w > W || gy0 + b.h > H) continue;
        truth.boxes.push_back({gx0, gy0, b.w, b.h});
        for (int y = gy0; y < gy0 + b.h; ++y) {
            for (int x = gx0; x < gx0 + b.w; ++x) mask.at(0, y, x) = 1.0;
        }
    }
    truth.mask = downsample_mask2(mask);
    return truth;
}

AffinePose pose_to_ego(const Scenario& sc, int sender_idx, int ego_idx) {
    const int n = static_cast<int>(sc.agents.size());
    if (sender_idx < 0 || sender_idx >= n || ego_idx < 0 || ego_idx >= n) {
        throw ConfigError("pose_to_ego: bad agent index");
    }
    const AgentPose& s = sc.agents[static_cast<std::size_t>(sender_idx)];
    const AgentPose& e = sc.agents[static_cast<std::size_t>(ego_idx)];
    return AffinePose::translation((s.x - e.x) / 2.0, (s.y - e.y) / 2.0);
}

void save_scenario(const Scenario& sc, const std::string& path) {
    ByteWriter w;
    w.bytes(kMagic, 4);
    w.u16(kVersion);
    w.u16(static_cast<std::uint16_t>(sc.cfg.world_h));
    w.u16(static_cast<std::uint16_t>(sc.cfg.world_w));
    w.u16(static_cast<std::uint16_t>(sc.cfg.n_agents));
    w.u16(static_cast<std::uint16_t>(sc.cfg.n_objects));
    w.u16(static_cast<std::uint16_t>(sc.cfg.obj_min));
    w.u16(static_cast<std::uint16_t>(sc.cfg.obj_max));
    w.f32(static_cast<float>(sc.cfg.radius));
    w.u8(sc.cfg.occlusion ? 1 : 0);
    w.u64(sc.cfg.seed);
    for (const auto& a : sc.agents) {
        w.u16(static_cast<std::uint16_t>(a.x));
        w.u16(static_cast<std::uint16_t>(a.y));
    }
    w.u16(static_cast<std::uint16_t>(sc.boxes.size()));
    for (const auto& b : sc.boxes) {
        w.u16(static_cast<std::uint16_t>(b.x0));
        w.u16(static_cast<std::uint16_t>(b.y0));
        w.u16(static_cast<std::uint16_t>(b.w));
        w.u16(static_cast<std::uint16_t>(b.h));
    }
    for (std::size_t i = 0; i < sc.world.size(); ++i) {
        w.u8(sc.world[i] > 0.5 ? 1 : 0);
    }
    auto bytes = w.take();
    write_file_bytes(path, bytes);
}

Scenario load_scenario(const std::string& path) {
    auto bytes = read_file_bytes(path);
    ByteReader rd(bytes);
    if (rd.str(4) != std::string(kMagic, 4)) throw FormatError("scenario: bad magic");
    if (rd.u16() != kVersion) throw FormatError("scenario: unsupported version");

    Scenario sc;
    sc.cfg.world_h = rd.u16();
    sc.cfg.world_w = rd.u16();
    sc.cfg.n_agents = rd.u16();
    sc.cfg.n_objects = rd.u16();
    sc.cfg.obj_min = rd.u16();
    sc.cfg.obj_max = rd.u16();
    sc.cfg.radius = rd.f32();
    sc.cfg.occlusion = rd.u8() != 0;
    sc.cfg.seed = rd.u64();
    for (int a = 0; a < sc.cfg.n_agents; ++a) {
        AgentPose p;
        p.x = rd.u16();
        p.y = rd.u16();
        sc.agents.push_back(p);
    }
    const int n_boxes = rd.u16();
    for (int i = 0; i < n_boxes; ++i) {
        Box b;
        b.x0 = rd.u16();
        b.y0 = rd.u16();
        b.w = rd.u16();
        b.h = rd.u16();
        sc.boxes.push_back(b);
    }
    const int H = sc.cfg.world_h, W = sc.cfg.world_w;
    sc.world = Tensor({1, H, W});
    sc.object_id.assign(static_cast<std::size_t>(H) * W, -1);
    for (std::size_t i = 0; i < sc.world.size(); ++i) sc.world[i] = rd.u8() ? 1.0 : 0.0;
    if (!rd.at_end()) throw FormatError("scenario: trailing bytes");

    for (int i = 0; i < n_boxes; ++i) {
        const Box& b = sc.boxes[static_cast<std::size_t>(i)];
        for (int y = b.y0; y < b.y0 + b.h; ++y) {
            for (int x = b.x0; x < b.x0 + b.w; ++x) {
                sc.object_id[static_cast<std::size_t>(y) * W + x] = i;
            }
        }
    }
    return sc;
}

}  // namespace wavecomm
