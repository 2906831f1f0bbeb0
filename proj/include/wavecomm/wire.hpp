#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "wavecomm/tensor.hpp"

namespace wavecomm {

enum class WireDtype : std::uint8_t { F32 = 0, F16 = 1 };

// Header fields of a .wvcm message. Field order on the wire: magic "WVCM",
// version u16, agent_id u16, frame_id u32, levels u8, dtype u8, C u16, H u16,
// W u16, pose 6 x f32, payload, crc32 u32. All little-endian. The CRC covers
// every byte before it (header and payload) so any single-byte corruption is
// detectable.
struct WaveMessageMeta {
    std::uint16_t agent_id = 0;
    std::uint32_t frame_id = 0;
    std::uint8_t levels = 1;
    WireDtype dtype = WireDtype::F16;
    std::array<double, 6> pose{1, 0, 0, 0, 1, 0};  // 2x3 affine, sender -> ego
};

struct UnpackedMessage {
    nn::Tensor ll;
    WaveMessageMeta meta;
};

std::vector<std::uint8_t> pack_message(const nn::Tensor& ll, const WaveMessageMeta& meta);
UnpackedMessage unpack_message(std::span<const std::uint8_t> bytes);

std::uint32_t crc32(std::span<const std::uint8_t> data);

// log2(cells * channels * bits / 8): message size in log2 bytes.
double comm_volume(long long cells, long long channels, long long bits);

struct CommVolumeReport {
    long long cells = 0;
    long long channels = 0;
    long long bits = 0;
    long long bytes = 0;
    double log2_volume = 0.0;
};

CommVolumeReport make_comm_report(long long cells, long long channels, long long bits);

enum class BudgetPolicy { Reject, DropAgent };

struct BudgetConfig {
    double total_budget_log2 = 0.0;
    BudgetPolicy policy = BudgetPolicy::Reject;
};

struct BudgetOutcome {
    bool violated = false;
    std::vector<std::size_t> accepted;  // indices into the report list
    std::vector<std::size_t> dropped;
    long long total_bytes = 0;          // bytes actually sent after the policy
};

// Sums raw bytes across links and compares against 2^C, boundary inclusive.
// Reject refuses every link on violation; DropAgent removes the
// largest-volume link (first such index on ties) until the rest fit.
BudgetOutcome check_budget(const std::vector<CommVolumeReport>& reports,
                           const BudgetConfig& budget);

}  // namespace wavecomm
