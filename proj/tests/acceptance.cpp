// Acceptance gate: twelve criteria, one PASS/FAIL line each. Exit status is
// nonzero if any criterion fails. Criteria 9-11 train full pipelines over
// five paired seeds and dominate the runtime (a few minutes).

#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wavecomm/distill.hpp"
#include "wavecomm/errors.hpp"
#include "wavecomm/f16.hpp"
#include "wavecomm/gradcheck.hpp"
#include "wavecomm/harness.hpp"
#include "wavecomm/losses.hpp"
#include "wavecomm/rng.hpp"
#include "wavecomm/tensor.hpp"
#include "wavecomm/wavelet.hpp"
#include "wavecomm/wire.hpp"

namespace wc = wavecomm;
using wc::nn::Tensor;

namespace {

int g_failures = 0;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return std::string(buf);
}

void report(int idx, const char* what, bool ok, const std::string& detail) {
    std::printf("[%s] %2d %s%s%s\n", ok ? "PASS" : "FAIL", idx, what,
                detail.empty() ? "" : ": ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

void note(const std::string& text) {
    std::printf("          %s\n", text.c_str());
    std::fflush(stdout);
}

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

double sum_sq(const Tensor& t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) acc += t[i] * t[i];
    return acc;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

double mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

// ---------------------------------------------------------------- criterion 1

void criterion_comm_goldens() {
    struct Pair {
        long long cells, channels, bits;
        double want;
    };
    // Baseline maps carry 32-bit values; the transmitted LL keeps a quarter
    // of the cells per level and is sent as 16-bit.
    const Pair pairs[] = {
        {65536, 64, 32, 24.0}, {16384, 64, 16, 21.0}, {32768, 64, 32, 23.0},
        {8192, 64, 16, 20.0},  {16384, 64, 32, 22.0}, {4096, 64, 16, 19.0},
    };
    bool ok = true;
    double worst = 0.0;
    for (const Pair& p : pairs) {
        const double got = wc::comm_volume(p.cells, p.channels, p.bits);
        worst = std::max(worst, std::fabs(got - p.want));
        ok = ok && near(got, p.want, 1e-12);
    }
    report(1, "comm volume goldens 24/21, 23/20, 22/19",
           ok, fmt("six values, worst abs err %.3g, tol 1e-12", worst));
}

// ---------------------------------------------------------------- criterion 2

void criterion_comm_ratios() {
    // Three-decimal match accepts either rounding or truncation: 19/22 is
    // 0.86363..., quoted as 0.863 (truncated); 20/23 is 0.86956..., quoted
    // as 0.870 (rounded).
    auto match3 = [](double x, double want) {
        const double r = std::round(x * 1000.0) / 1000.0;
        const double t = std::floor(x * 1000.0) / 1000.0;
        return near(r, want, 1e-9) || near(t, want, 1e-9);
    };
    const double r1 = 19.0 / 22.0;
    const double r2 = 20.0 / 23.0;
    const bool ok = match3(r1, 0.863) && match3(r2, 0.870);
    report(2, "compression ratios 86.3% and 87.0%",
           ok, fmt("19/22 = %.6f, 20/23 = %.6f, matched to three decimals", r1, r2));
}

// ---------------------------------------------------------------- criterion 3

void criterion_comm_progression() {
    // 23.0-baseline map: 32768 cells x 64 channels x 32-bit. An L-level LL
    // keeps cells/4^L and is transmitted as 16-bit.
    const double l1 = wc::comm_volume(32768 >> 2, 64, 16);
    const double l2 = wc::comm_volume(32768 >> 4, 64, 16);
    const double l3 = wc::comm_volume(32768 >> 6, 64, 16);
    const bool ok = near(l1, 20.0, 1e-12) && near(l2, 18.0, 1e-12) && near(l3, 16.0, 1e-12);
    report(3, "multilevel comm progression from a 23.0 baseline",
           ok, fmt("levels 1/2/3 -> %.1f / %.1f / %.1f, tol 1e-12", l1, l2, l3));
    note("note: the reference comm table lists 18.0 for the 3-level row, which "
         "repeats the 2-level value; the volume formula gives 16.0 and that is "
         "what is asserted here.");
}

// ---------------------------------------------------------------- criterion 4

void criterion_wavelet_properties() {
    wc::Rng rng(0x5eed4);
    bool ok = true;
    double worst_rt = 0.0, worst_en = 0.0, worst_lin = 0.0, worst_lp = 0.0;
    for (int levels = 1; levels <= 3; ++levels) {
        const int block = 1 << levels;
        for (int trial = 0; trial < 100; ++trial) {
            const int c = 1 + trial % 3;
            const int h = block * (1 + trial % 3) * 2;
            const int w = block * (1 + (trial / 3) % 3) * 2;
            const Tensor x = Tensor::random_uniform({c, h, w}, -1.0, 1.0, rng);

            const wc::SubbandPyramid pyr = wc::dwt2(x, levels);

            // Perfect reconstruction.
            const double rt = max_abs_diff(wc::idwt2(pyr), x);
            worst_rt = std::max(worst_rt, rt);
            ok = ok && rt <= 1e-10;

            // Orthonormal energy conservation.
            double ep = sum_sq(pyr.ll);
            for (const auto& d : pyr.details)
                ep += sum_sq(d.lh) + sum_sq(d.hl) + sum_sq(d.hh);
            const double ex = sum_sq(x);
            const double en = std::fabs(ex - ep) / std::max(ex, 1e-12);
            worst_en = std::max(worst_en, en);
            ok = ok && en <= 1e-10;

            // Linearity of the analysis transform.
            const Tensor y = Tensor::random_uniform(x.shape(), -1.0, 1.0, rng);
            const double a = 0.7, b = -1.3;
            Tensor mix = x;
            for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * x[i] + b * y[i];
            const wc::SubbandPyramid pm = wc::dwt2(mix, levels);
            const wc::SubbandPyramid py = wc::dwt2(y, levels);
            auto band_err = [&](const Tensor& m, const Tensor& px, const Tensor& pyb) {
                double e = 0.0;
                for (std::size_t i = 0; i < m.size(); ++i)
                    e = std::max(e, std::fabs(m[i] - (a * px[i] + b * pyb[i])));
                return e;
            };
            double lin = band_err(pm.ll, pyr.ll, py.ll);
            for (std::size_t d = 0; d < pm.details.size(); ++d) {
                lin = std::max(lin, band_err(pm.details[d].lh, pyr.details[d].lh,
                                             py.details[d].lh));
                lin = std::max(lin, band_err(pm.details[d].hl, pyr.details[d].hl,
                                             py.details[d].hl));
                lin = std::max(lin, band_err(pm.details[d].hh, pyr.details[d].hh,
                                             py.details[d].hh));
            }
            worst_lin = std::max(worst_lin, lin);
            ok = ok && lin <= 1e-10;

            // LL-only inverse equals the per-block mean of the input.
            const Tensor lp = wc::idwt2_lowpass(pyr.ll, levels);
            double lperr = 0.0;
            for (int ci = 0; ci < c; ++ci) {
                for (int by = 0; by < h / block; ++by) {
                    for (int bx = 0; bx < w / block; ++bx) {
                        double acc = 0.0;
                        for (int dy = 0; dy < block; ++dy)
                            for (int dx = 0; dx < block; ++dx)
                                acc += x.at(ci, by * block + dy, bx * block + dx);
                        const double want = acc / (block * block);
                        for (int dy = 0; dy < block; ++dy)
                            for (int dx = 0; dx < block; ++dx)
                                lperr = std::max(
                                    lperr, std::fabs(lp.at(ci, by * block + dy,
                                                           bx * block + dx) -
                                                     want));
                    }
                }
            }
            worst_lp = std::max(worst_lp, lperr);
            ok = ok && lperr <= 1e-12;
        }
    }
    report(4, "wavelet roundtrip / energy / linearity / lowpass oracle", ok,
           fmt("300 tensors; worst: rt %.2e, energy %.2e, lin %.2e (tol 1e-10), "
               "lowpass %.2e (tol 1e-12)",
               worst_rt, worst_en, worst_lin, worst_lp));
}

// ---------------------------------------------------------------- criterion 5

void criterion_gradients() {
    using namespace wc::nn;
    Rng rng(42);
    bool ok = true;
    double worst_layer = 0.0, worst_net = 0.0;
    auto single = [](std::unique_ptr<Layer> l) {
        Sequential s;
        s.add(std::move(l));
        return s;
    };
    struct Case {
        const char* name;
        Sequential net;
        Tensor input;
    };
    std::vector<Case> cases;
    cases.push_back({"conv3x3", single(conv3x3(2, 3, rng)),
                     Tensor::random_uniform({2, 6, 6}, -1.0, 1.0, rng)});
    cases.push_back({"conv1x1", single(conv1x1(3, 2, rng)),
                     Tensor::random_uniform({3, 5, 5}, -1.0, 1.0, rng)});
    cases.push_back({"conv4x4s2", single(conv4x4s2(2, 2, rng)),
                     Tensor::random_uniform({2, 8, 8}, -1.0, 1.0, rng)});
    cases.push_back({"convT4x4s2", single(convT4x4s2(2, 2, rng)),
                     Tensor::random_uniform({2, 4, 4}, -1.0, 1.0, rng)});
    cases.push_back({"batchnorm", single(batchnorm(3)),
                     Tensor::random_uniform({3, 6, 6}, -2.0, 2.0, rng)});
    cases.push_back({"relu", single(relu()),
                     Tensor::random_uniform({2, 6, 6}, -1.0, 1.0, rng)});
    cases.push_back({"leaky_relu", single(leaky_relu()),
                     Tensor::random_uniform({2, 6, 6}, -1.0, 1.0, rng)});
    cases.push_back({"sigmoid", single(sigmoid()),
                     Tensor::random_uniform({2, 6, 6}, -3.0, 3.0, rng)});
    for (Case& cs : cases) {
        Sequential::Ctx ctx;
        Tensor out = cs.net.forward(cs.input, ctx, Mode::Train);
        Tensor target = Tensor::random_uniform(out.shape(), -0.5, 0.5, rng);
        const auto res = grad_check(cs.net, cs.input, mse_probe(target), rng, 30);
        worst_layer = std::max(worst_layer, res.max_rel_err);
        ok = ok && res.probes >= 20 && res.max_rel_err <= 1e-5;
    }

    // Full generator and discriminator at network tolerance.
    Rng grng(43);
    Sequential gen = wc::build_generator(4, 1, grng);
    const Tensor gin = Tensor::random_uniform({4, 4, 4}, -1.0, 1.0, grng);
    const Tensor gtarget = Tensor::random_uniform({4, 8, 8}, -1.0, 1.0, grng);
    Rng gprobe(44);
    const auto gres = grad_check(gen, gin, mse_probe(gtarget), gprobe, 24);
    Rng drng(45);
    Sequential disc = wc::build_discriminator(4, drng);
    const Tensor din = Tensor::random_uniform({4, 16, 16}, -1.0, 1.0, drng);
    const Tensor dtarget = Tensor::random_uniform({1, 2, 2}, 0.1, 0.9, drng);
    Rng dprobe(46);
    const auto dres = grad_check(disc, din, mse_probe(dtarget), dprobe, 24);
    worst_net = std::max(gres.max_rel_err, dres.max_rel_err);
    ok = ok && gres.probes >= 20 && dres.probes >= 20 && worst_net <= 1e-4;

    report(5, "finite-difference gradient suites", ok,
           fmt("8 layer kinds worst rel err %.2e (tol 1e-5); generator %.2e, "
               "discriminator %.2e (tol 1e-4); >=20 probes each",
               worst_layer, gres.max_rel_err, dres.max_rel_err));
}

// ---------------------------------------------------------------- criterion 6

void criterion_loss_units() {
    wc::Rng rng(0x106);
    const Tensor f = Tensor::random_uniform({2, 12, 12}, 0.1, 1.0, rng);
    Tensor f2 = f;
    for (std::size_t i = 0; i < f2.size(); ++i) f2[i] = 2.0 * f[i];

    const double recon0 = wc::loss_recon(f, f).value;
    const double percep0 = wc::loss_percep(f2, f, false).value;
    const double ssim0 = wc::loss_ssim(f, f).value;

    const Tensor half = Tensor::full({1, 3, 3}, 0.5);
    const wc::AdvLoss adv = wc::loss_adv(half, half);
    const double ln2 = std::log(2.0);

    wc::MsdTerms terms;
    terms.l_recon = 0.2;
    terms.l_ssim = 0.1;
    terms.l_percep = 0.05;
    terms.l_g = adv.l_g;
    terms.l_d = adv.l_d;
    const wc::LossWeights w;  // lambda_recon 1, alpha 1, beta 1, gamma 0.1
    const wc::MsdTotal total = wc::msd_total(terms, w);

    const bool ok = near(recon0, 0.0, 1e-12) && near(percep0, 0.0, 1e-12) &&
                    near(ssim0, 0.0, 1e-12) && near(adv.l_g, ln2, 1e-9) &&
                    near(adv.l_d, 2.0 * ln2, 1e-9) &&
                    near(total.l_recon_total, 0.305, 1e-12);
    report(6, "loss unit values and weighted composition", ok,
           fmt("recon(f,f)=%.1e percep(2f,f)=%.1e ssim(f,f)=%.1e (tol 1e-12); "
               "P=0.5 gives L_G=%.9f L_D=%.9f (ln2, 2ln2, tol 1e-9); "
               "0.2/0.1/0.05 at gamma 0.1 -> %.15f (want 0.305, tol 1e-12)",
               recon0, percep0, ssim0, adv.l_g, adv.l_d, total.l_recon_total));
}

// ---------------------------------------------------------------- criterion 7

void criterion_wire_format() {
    // Exhaustive f16: every non-NaN bit pattern decodes and re-encodes to
    // itself. NaN payloads are not preserved (1023 payloads per sign).
    int checked = 0, identical = 0;
    for (std::uint32_t b = 0; b < 65536; ++b) {
        const auto u = static_cast<std::uint16_t>(b);
        const double v = wc::f16_decode(u);
        if (std::isnan(v)) continue;
        ++checked;
        if (wc::f16_encode(v) == u) ++identical;
    }
    bool ok = checked == 65536 - 2 * 1023 && identical == checked;

    // 1000 random messages round trip bit-exactly once values are already
    // representable in the chosen payload dtype.
    wc::Rng rng(0xc7);
    int exact = 0;
    for (int i = 0; i < 1000; ++i) {
        const int c = static_cast<int>(1 + rng.uniform_int(0, 3));
        const int h = static_cast<int>(2 + rng.uniform_int(0, 6));
        const int w = static_cast<int>(2 + rng.uniform_int(0, 6));
        Tensor ll = Tensor::random_uniform({c, h, w}, -4.0, 4.0, rng);
        wc::WaveMessageMeta meta;
        meta.agent_id = static_cast<std::uint16_t>(rng.uniform_int(0, 65535));
        meta.frame_id = static_cast<std::uint32_t>(rng.next_u64());
        meta.levels = static_cast<std::uint8_t>(rng.uniform_int(1, 3));
        meta.dtype = (i % 2 == 0) ? wc::WireDtype::F16 : wc::WireDtype::F32;
        // Dyadic rationals with short mantissas survive the f32 pose fields
        // and payload exactly; a double->float->double cast chain is not a
        // reliable way to pre-round (it can be elided at high optimization).
        for (double& p : meta.pose)
            p = static_cast<double>(rng.uniform_int(-8000, 8000)) / 4096.0;
        if (meta.dtype == wc::WireDtype::F16) {
            ll = wc::quantize_f16(ll);
        } else {
            for (std::size_t k = 0; k < ll.size(); ++k)
                ll[k] = std::round(ll[k] * 256.0) / 256.0;
        }
        const std::vector<std::uint8_t> blob = wc::pack_message(ll, meta);
        const wc::UnpackedMessage um = wc::unpack_message(blob);
        const std::vector<std::uint8_t> again = wc::pack_message(um.ll, um.meta);
        const bool same_vals = um.ll.same_shape(ll) && max_abs_diff(um.ll, ll) == 0.0;
        const bool same_meta = um.meta.agent_id == meta.agent_id &&
                               um.meta.frame_id == meta.frame_id &&
                               um.meta.levels == meta.levels &&
                               um.meta.dtype == meta.dtype && um.meta.pose == meta.pose;
        if (same_vals && same_meta && again == blob) ++exact;
    }
    ok = ok && exact == 1000;

    // Single-byte corruption at every position is rejected.
    Tensor ll = wc::quantize_f16(Tensor::random_uniform({3, 4, 4}, -1.0, 1.0, rng));
    wc::WaveMessageMeta meta;
    meta.agent_id = 7;
    meta.frame_id = 99;
    const std::vector<std::uint8_t> blob = wc::pack_message(ll, meta);
    std::size_t detected = 0;
    for (std::size_t i = 0; i < blob.size(); ++i) {
        std::vector<std::uint8_t> bad = blob;
        bad[i] ^= 0x5a;
        try {
            (void)wc::unpack_message(bad);
        } catch (const wc::FormatError&) {
            ++detected;
        }
    }
    ok = ok && detected == blob.size();

    report(7, "wire format", ok,
           fmt("f16 identity on %d/%d non-NaN patterns; %d/1000 messages "
               "bit-exact; corruption detected at %zu/%zu byte positions",
               identical, checked, exact, detected, blob.size()));
}

// ------------------------------------------------------- criteria 8 and 12

struct DistillRun {
    std::vector<wc::TrainRow> rows;
    bool threw = false;
};

DistillRun run_distill_200() {
    DistillRun out;
    wc::Rng rng(wc::Rng::derive(7, 0));
    wc::DistillNets nets = wc::build_distill_nets(4, 1, rng);
    const Tensor ll = Tensor::random_uniform({4, 8, 8}, 0.0, 2.0, rng);
    const Tensor target = Tensor::random_uniform({4, 16, 16}, 0.0, 1.0, rng);
    wc::DistillStepConfig cfg;
    cfg.weights.lambda_adv = 0.0;
    try {
        for (int i = 0; i < 200; ++i) {
            wc::TrainRow row;
            row.step = i + 1;
            row.distill = wc::distill_train_step(nets, ll, target, cfg);
            out.rows.push_back(row);
        }
    } catch (const wc::Error&) {
        out.threw = true;
    }
    return out;
}

void criterion_distill_convergence(const DistillRun& run) {
    bool ok = !run.threw && run.rows.size() == 200;
    double first = 0.0, last = 0.0;
    if (ok) {
        first = run.rows.front().distill.l_recon_total;
        last = run.rows.back().distill.l_recon_total;
        ok = last <= 0.5 * first;
    }

    // Adversarial phase at default weights stays finite for 1000 steps.
    bool finite = true;
    std::string why;
    try {
        wc::Rng rng(wc::Rng::derive(7, 1));
        wc::DistillNets nets = wc::build_distill_nets(4, 1, rng);
        const Tensor ll = Tensor::random_uniform({4, 8, 8}, 0.0, 2.0, rng);
        const Tensor target = Tensor::random_uniform({4, 16, 16}, 0.0, 1.0, rng);
        const wc::DistillStepConfig cfg;  // lambda_adv 0.01
        for (int i = 0; i < 1000; ++i) {
            const wc::DistillReport r = wc::distill_train_step(nets, ll, target, cfg);
            finite = finite && std::isfinite(r.l_recon_total) && std::isfinite(r.l_d) &&
                     std::isfinite(r.l_g) && std::isfinite(r.l_adv);
        }
    } catch (const wc::Error& e) {
        finite = false;
        why = e.what();
    }
    ok = ok && finite;
    report(8, "distillation convergence and adversarial stability", ok,
           fmt("lambda_adv=0: L_ReconTotal %.4f -> %.4f over 200 steps "
               "(need >=50%% drop); 1000 adversarial steps finite: %s%s%s",
               first, last, finite ? "yes" : "no", why.empty() ? "" : ", ",
               why.c_str()));
}

void criterion_determinism(const DistillRun& a, const DistillRun& b) {
    namespace fs = std::filesystem;
    const fs::path pa = fs::temp_directory_path() / "wavecomm_acc_loss_a.csv";
    const fs::path pb = fs::temp_directory_path() / "wavecomm_acc_loss_b.csv";
    wc::write_loss_csv(a.rows, pa.string());
    wc::write_loss_csv(b.rows, pb.string());
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string ca = slurp(pa);
    const std::string cb = slurp(pb);
    const bool ok = !ca.empty() && ca == cb && a.rows.size() == b.rows.size();
    fs::remove(pa);
    fs::remove(pb);
    report(12, "determinism", ok,
           fmt("criterion-8 training repeated from scratch; loss CSVs are "
               "byte-identical (%zu bytes, %zu rows)",
               ca.size(), a.rows.size()));
}

// ------------------------------------------------------- criteria 9, 10, 11

std::map<std::string, std::map<std::uint64_t, const wc::AblationRow*>> by_arm(
    const wc::AblationResult& res) {
    std::map<std::string, std::map<std::uint64_t, const wc::AblationRow*>> out;
    for (const wc::AblationRow& r : res.rows) out[r.arm][r.seed] = &r;
    return out;
}

void criterion_reconstruction_direction(const wc::AblationResult& rc,
                                        const std::vector<std::uint64_t>& seeds) {
    const auto arms = by_arm(rc);
    std::vector<double> gen, idwt, diffs;
    for (std::uint64_t s : seeds) {
        const double g = arms.at("generator").at(s)->ap50;
        const double i = arms.at("idwt_only").at(s)->ap50;
        gen.push_back(g);
        idwt.push_back(i);
        diffs.push_back(g - i);
    }
    const double mg = mean(gen), mi = mean(idwt);
    const double diff = mg - mi;
    const double sd = sample_sd(diffs);
    const char* status = diff > sd              ? "generator ahead by more than 1 sd"
                         : std::fabs(diff) <= sd ? "statistical tie (within 1 sd of paired diffs)"
                                                 : "generator trails by more than 1 sd";
    const bool ok = diff >= -sd - 1e-12;
    report(9, "reconstruction ablation direction", ok,
           fmt("mean AP50 generator %.4f vs idwt_only %.4f over 5 paired seeds; "
               "diff %+.4f, paired-diff sd %.4f; %s",
               mg, mi, diff, sd, status));
}

void criterion_collaboration_premise(const wc::AblationResult& rc,
                                     const std::vector<std::uint64_t>& seeds) {
    const auto arms = by_arm(rc);
    int wins = 0;
    for (std::uint64_t s : seeds)
        if (arms.at("generator").at(s)->ap50 > arms.at("no_collab").at(s)->ap50) ++wins;
    const double mg = mean([&] {
        std::vector<double> v;
        for (std::uint64_t s : seeds) v.push_back(arms.at("generator").at(s)->ap50);
        return v;
    }());
    const double mn = mean([&] {
        std::vector<double> v;
        for (std::uint64_t s : seeds) v.push_back(arms.at("no_collab").at(s)->ap50);
        return v;
    }());
    const bool ok = wins >= 4;
    report(10, "collaboration premise", ok,
           fmt("generator beats no_collab AP50 in %d/5 paired seeds (need >=4); "
               "means %.4f vs %.4f",
               wins, mg, mn));
}

void criterion_multilevel_trend(const wc::AblationResult& ml,
                                const std::vector<std::uint64_t>& seeds) {
    const auto arms = by_arm(ml);
    const char* order[] = {"1_level", "2_level", "3_level"};
    std::vector<double> ap_means, comm_means;
    for (const char* arm : order) {
        std::vector<double> ap, comm;
        for (std::uint64_t s : seeds) {
            ap.push_back(arms.at(arm).at(s)->ap50);
            comm.push_back(arms.at(arm).at(s)->comm_log2);
        }
        ap_means.push_back(mean(ap));
        comm_means.push_back(mean(comm));
    }
    const bool ap_ok = ap_means[0] + 1e-12 >= ap_means[1] && ap_means[1] + 1e-12 >= ap_means[2];
    const bool comm_ok = near(comm_means[0] - comm_means[1], 2.0, 1e-12) &&
                         near(comm_means[1] - comm_means[2], 2.0, 1e-12);
    report(11, "multilevel trend", ap_ok && comm_ok,
           fmt("mean AP50 %.4f >= %.4f >= %.4f across levels 1/2/3; comm log2 "
               "%.1f / %.1f / %.1f drops exactly 2.0 per level (tol 1e-12)",
               ap_means[0], ap_means[1], ap_means[2], comm_means[0], comm_means[1],
               comm_means[2]));
}

}  // namespace

int main() {
    wc::nn::set_checked_mode(true);

    criterion_comm_goldens();
    criterion_comm_ratios();
    criterion_comm_progression();
    criterion_wavelet_properties();
    criterion_gradients();
    criterion_loss_units();
    criterion_wire_format();

    const DistillRun run_a = run_distill_200();
    criterion_distill_convergence(run_a);

    std::fprintf(stderr, "running 5-seed ablations (30 pipeline trainings, a few minutes)...\n");
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    const wc::PipelineConfig base;  // desk-scale defaults
    const wc::AblationResult rc =
        wc::run_ablation(wc::AblationSuite::Reconstruction, base, seeds);
    const wc::AblationResult ml = wc::run_ablation(wc::AblationSuite::Multilevel, base, seeds);

    criterion_reconstruction_direction(rc, seeds);
    criterion_collaboration_premise(rc, seeds);
    criterion_multilevel_trend(ml, seeds);

    const DistillRun run_b = run_distill_200();
    criterion_determinism(run_a, run_b);

    if (g_failures == 0) {
        std::printf("all 12 criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
}
