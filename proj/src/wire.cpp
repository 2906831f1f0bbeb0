#include "wavecomm/wire.hpp"

#include <cmath>
#include <numeric>

#include "wavecomm/bytesio.hpp"
#include "wavecomm/errors.hpp"
#include "wavecomm/f16.hpp"

namespace wavecomm {

namespace {
constexpr char kMagic[4] = {'W', 'V', 'C', 'M'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 2 + 2 + 4 + 1 + 1 + 2 + 2 + 2 + 6 * 4;

const std::uint32_t* crc_table() {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    return table.data();
}
}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> data) {
    const std::uint32_t* t = crc_table();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::uint8_t b : data) c = t[(c ^ b) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

std::vector<std::uint8_t> pack_message(const nn::Tensor& ll, const WaveMessageMeta& meta) {
    if (ll.rank() != 3) throw ShapeError("pack_message: expected rank-3 LL tensor");
    if (ll.channels() > 0xFFFF || ll.height() > 0xFFFF || ll.width() > 0xFFFF) {
        throw ShapeError("pack_message: dims exceed u16 range");
    }
    ByteWriter w;
    w.bytes(kMagic, 4);
    w.u16(kVersion);
    w.u16(meta.agent_id);
    w.u32(meta.frame_id);
    w.u8(meta.levels);
    w.u8(static_cast<std::uint8_t>(meta.dtype));
    w.u16(static_cast<std::uint16_t>(ll.channels()));
    w.u16(static_cast<std::uint16_t>(ll.height()));
    w.u16(static_cast<std::uint16_t>(ll.width()));
    for (double p : meta.pose) w.f32(static_cast<float>(p));
    if (meta.dtype == WireDtype::F16) {
        for (std::size_t i = 0; i < ll.size(); ++i) w.u16(f16_encode(ll[i]));
    } else {
        for (std::size_t i = 0; i < ll.size(); ++i) w.f32(static_cast<float>(ll[i]));
    }
    const std::uint32_t crc = crc32(w.view());
    w.u32(crc);
    return w.take();
}

UnpackedMessage unpack_message(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderBytes + 4) {
        throw FormatError("unpack_message: buffer shorter than minimal message");
    }
    ByteReader rd(bytes);
    if (rd.str(4) != std::string(kMagic, 4)) throw FormatError("unpack_message: bad magic");
    const std::uint16_t ver = rd.u16();
    if (ver != kVersion) {
        throw FormatError("unpack_message: unsupported version " + std::to_string(ver));
    }
    UnpackedMessage out;
    out.meta.agent_id = rd.u16();
    out.meta.frame_id = rd.u32();
    out.meta.levels = rd.u8();
    const std::uint8_t dt = rd.u8();
    if (dt > 1) throw FormatError("unpack_message: unknown dtype " + std::to_string(dt));
    out.meta.dtype = static_cast<WireDtype>(dt);
    const int C = rd.u16();
    const int H = rd.u16();
    const int W = rd.u16();
    if (C < 1 || H < 1 || W < 1) throw FormatError("unpack_message: degenerate dims");
    for (double& p : out.meta.pose) p = rd.f32();

    const std::size_t n = static_cast<std::size_t>(C) * H * W;
    const std::size_t coef_bytes = n * (out.meta.dtype == WireDtype::F16 ? 2 : 4);
    if (bytes.size() != kHeaderBytes + coef_bytes + 4) {
        throw FormatError("unpack_message: length mismatch (expected " +
                          std::to_string(kHeaderBytes + coef_bytes + 4) + " bytes, got " +
                          std::to_string(bytes.size()) + ")");
    }
    const std::uint32_t expect = crc32(bytes.subspan(0, bytes.size() - 4));

    out.ll = nn::Tensor({C, H, W});
    if (out.meta.dtype == WireDtype::F16) {
        for (std::size_t i = 0; i < n; ++i) out.ll[i] = f16_decode(rd.u16());
    } else {
        for (std::size_t i = 0; i < n; ++i) out.ll[i] = rd.f32();
    }
    const std::uint32_t stored = rd.u32();
    if (stored != expect) throw CorruptionError("unpack_message: crc mismatch");
    return out;
}

double comm_volume(long long cells, long long channels, long long bits) {
    if (cells < 1) throw NumericError("comm_volume: undefined for zero cells");
    if (channels < 1 || bits < 1) throw NumericError("comm_volume: channels and bits must be >= 1");
    const double total_bits = static_cast<double>(cells) * static_cast<double>(channels) *
                              static_cast<double>(bits);
    return std::log2(total_bits / 8.0);
}

CommVolumeReport make_comm_report(long long cells, long long channels, long long bits) {
    CommVolumeReport r;
    r.cells = cells;
    r.channels = channels;
    r.bits = bits;
    const long long total_bits = cells * channels * bits;
    if (total_bits % 8 != 0) throw NumericError("make_comm_report: non-integral byte count");
    r.bytes = total_bits / 8;
    r.log2_volume = comm_volume(cells, channels, bits);
    return r;
}

BudgetOutcome check_budget(const std::vector<CommVolumeReport>& reports,
                           const BudgetConfig& budget) {
    if (!(budget.total_budget_log2 > 0.0)) throw ConfigError("check_budget: budget must be > 0");
    const double cap = std::exp2(budget.total_budget_log2);

    std::vector<std::size_t> live(reports.size());
    std::iota(live.begin(), live.end(), std::size_t{0});
    auto total = [&] {
        long long t = 0;
        for (std::size_t i : live) t += reports[i].bytes;
        return t;
    };

    BudgetOutcome out;
    if (static_cast<double>(total()) <= cap) {
        out.accepted = live;
        out.total_bytes = total();
        return out;
    }

    out.violated = true;
    if (budget.policy == BudgetPolicy::Reject) {
        out.dropped = live;
        out.total_bytes = 0;
        return out;
    }

    // DropAgent: shed the biggest link (first such index on ties) until the
    // remainder fits.
    while (!live.empty() && static_cast<double>(total()) > cap) {
        std::size_t worst = 0;
        for (std::size_t k = 1; k < live.size(); ++k) {
            if (reports[live[k]].bytes > reports[live[worst]].bytes) worst = k;
        }
        out.dropped.push_back(live[worst]);
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(worst));
    }
    out.accepted = live;
    out.total_bytes = total();
    return out;
}

}  // namespace wavecomm
