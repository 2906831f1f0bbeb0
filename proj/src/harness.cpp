#include "wavecomm/harness.hpp"

#include <chrono>
#include <cmath>

#include "wavecomm/csvio.hpp"
#include "wavecomm/errors.hpp"
#include "wavecomm/f16.hpp"
#include "wavecomm/optimizer.hpp"
#include "wavecomm/wavelet.hpp"

namespace wavecomm {

using nn::Mode;
using nn::Rng;
using nn::Tensor;

const char* collab_mode_name(CollabMode m) {
    switch (m) {
        case CollabMode::NoCollab: return "no_collab";
        case CollabMode::IdwtOnly: return "idwt_only";
        case CollabMode::Generator: return "generator";
    }
    return "generator";
}

CollabMode collab_mode_from_name(const std::string& name) {
    if (name == "no_collab") return CollabMode::NoCollab;
    if (name == "idwt_only") return CollabMode::IdwtOnly;
    if (name == "generator") return CollabMode::Generator;
    throw ConfigError("unknown collaboration mode: " + name);
}

void validate_pipeline_config(const PipelineConfig& cfg) {
    if (cfg.channels < 1) throw ConfigError("pipeline: channels must be >= 1");
    if (cfg.levels < 1 || cfg.levels > 3) throw ConfigError("pipeline: levels must be in {1,2,3}");
    const int div = 1 << (cfg.levels + 1);
    if (cfg.scenario.world_h % div != 0 || cfg.scenario.world_w % div != 0) {
        throw ConfigError("pipeline: world dims must divide by 2^(levels+1) = " +
                          std::to_string(div));
    }
    const int fh = cfg.scenario.world_h / 2, fw = cfg.scenario.world_w / 2;
    if (cfg.mode == CollabMode::Generator) {
        if (fh % 8 != 0 || fw % 8 != 0) {
            throw ConfigError("pipeline: feature dims must divide by 8 for the discriminator");
        }
        if (fh < 11 || fw < 11) {
            throw ConfigError("pipeline: feature dims must be >= 11 for the SSIM window");
        }
    }
    if (!(cfg.lr > 0.0)) throw ConfigError("pipeline: lr must be positive");
    if (!(cfg.pos_weight > 0.0)) throw ConfigError("pipeline: pos_weight must be positive");
    if (cfg.epochs < 0 || cfg.frames_per_epoch < 1 || cfg.eval_frames < 1) {
        throw ConfigError("pipeline: bad epoch/frame counts");
    }
}

double auto_budget_log2(const PipelineConfig& cfg) {
    const int n_links = cfg.scenario.n_agents - 1;
    if (n_links < 1) return 1.0;
    const int fh = cfg.scenario.world_h / 2, fw = cfg.scenario.world_w / 2;
    const long long cells = static_cast<long long>(fh >> cfg.levels) * (fw >> cfg.levels);
    const int bits = cfg.dtype == WireDtype::F16 ? 16 : 32;
    const long long bytes_per_link = cells * cfg.channels * bits / 8;
    return std::log2(static_cast<double>(n_links) * static_cast<double>(bytes_per_link));
}

PipelineNets::PipelineNets(const PipelineConfig& cfg, Rng& rng)
    : channels(cfg.channels),
      levels(cfg.levels),
      mode(cfg.mode),
      encoder(build_encoder(cfg.channels, rng)),
      head(build_head(cfg.channels, rng)),
      sender(cfg.variant, cfg.channels, rng),
      fusion(cfg.channels, rng),
      distill(cfg.mode == CollabMode::Generator ? build_distill_nets(cfg.channels, cfg.levels, rng)
                                                : DistillNets{}) {}

std::vector<nn::Param*> PipelineNets::gen_side_params() {
    std::vector<nn::Param*> out;
    auto append = [&out](std::vector<nn::Param*> v) {
        out.insert(out.end(), v.begin(), v.end());
    };
    append(encoder.params());
    append(head.params());
    append(fusion.params());
    append(sender.params());
    append(distill.generator.params());
    return out;
}

void PipelineNets::register_checkpoint(Checkpoint& ck) {
    ck.add_sequential("encoder", encoder);
    ck.add_sequential("head", head);
    ck.add_layer("fusion.score", fusion.score_net());
    ck.add_sequential("sender.proj", sender.proj_net());
    ck.add_sequential("sender.mix", sender.mix_net());
    ck.add_sequential("generator", distill.generator);
    ck.add_sequential("discriminator", distill.discriminator);
}

namespace {

struct LinkData {
    int agent = 0;
    SubbandPyramid pyr;
    SenderNet::Ctx sender_ctx;
    Tensor tx;
    CommVolumeReport report;
    std::vector<std::uint8_t> wire;
    bool accepted = false;
    Tensor ll_rx;
    Tensor target;  // Z' of the sender, the distillation supervisory signal
    nn::Sequential::Ctx gen_ctx;
    Tensor recon;
    AffinePose pose;
};

struct FrameData {
    std::vector<Tensor> obs;
    std::vector<nn::Sequential::Ctx> enc_ctx;
    std::vector<Tensor> z;
    std::vector<LinkData> links;
    BudgetOutcome budget;
    std::vector<Tensor> fuse_feats, fuse_masks;
    std::vector<int> fuse_link;  // -1 for the ego slot, else index into links
    SoftmaxFusion::Ctx fuse_ctx;
    Tensor fused;
    nn::Sequential::Ctx head_ctx;
    Tensor logits;
};

FrameData frame_forward(const Scenario& sc, PipelineNets& nets, const PipelineConfig& cfg,
                        Mode mode, std::uint32_t frame_id) {
    FrameData fd;
    const int n = static_cast<int>(sc.agents.size());
    const int fh = sc.cfg.world_h / 2, fw = sc.cfg.world_w / 2;

    fd.enc_ctx.assign(static_cast<std::size_t>(n), nn::Sequential::Ctx{});
    for (int a = 0; a < n; ++a) {
        fd.obs.push_back(render_local_view(sc, a));
        fd.z.push_back(nets.encoder.forward(fd.obs.back(), fd.enc_ctx[static_cast<std::size_t>(a)],
                                            mode));
    }

    if (nets.mode != CollabMode::NoCollab && n > 1) {
        const int bits = cfg.dtype == WireDtype::F16 ? 16 : 32;
        std::vector<CommVolumeReport> reports;
        for (int j = 1; j < n; ++j) {
            LinkData ld;
            ld.agent = j;
            ld.pyr = dwt2(fd.z[static_cast<std::size_t>(j)], nets.levels);
            ld.tx = nets.sender.prepare(ld.pyr, ld.sender_ctx, mode);
            WaveMessageMeta meta;
            meta.agent_id = static_cast<std::uint16_t>(j);
            meta.frame_id = frame_id;
            meta.levels = static_cast<std::uint8_t>(nets.levels);
            meta.dtype = cfg.dtype;
            meta.pose = pose_to_ego(sc, j, 0).m;
            ld.wire = pack_message(ld.tx, meta);
            ld.report = make_comm_report(
                static_cast<long long>(ld.tx.height()) * ld.tx.width(), nets.channels, bits);
            reports.push_back(ld.report);
            fd.links.push_back(std::move(ld));
        }
        BudgetConfig bc;
        bc.total_budget_log2 = cfg.budget_log2 > 0.0 ? cfg.budget_log2 : auto_budget_log2(cfg);
        bc.policy = cfg.policy;
        fd.budget = check_budget(reports, bc);
        for (std::size_t idx : fd.budget.accepted) {
            fd.links[idx].accepted = true;
        }
    }

    fd.fuse_feats.push_back(fd.z[0]);
    fd.fuse_masks.push_back(Tensor::full({1, fh, fw}, 1.0));
    fd.fuse_link.push_back(-1);
    for (std::size_t li = 0; li < fd.links.size(); ++li) {
        LinkData& ld = fd.links[li];
        if (!ld.accepted) continue;
        UnpackedMessage un = unpack_message(ld.wire);
        ld.ll_rx = std::move(un.ll);
        ld.pose.m = un.meta.pose;
        ld.target = idwt2_lowpass(ld.pyr.ll, nets.levels);
        if (nets.mode == CollabMode::Generator) {
            ld.recon = nets.distill.generator.forward(ld.ll_rx, ld.gen_ctx, mode);
        } else {
            ld.recon = idwt2_lowpass(ld.ll_rx, nets.levels);
        }
        WarpResult wr = warp_affine(ld.recon, ld.pose, fh, fw);
        fd.fuse_feats.push_back(std::move(wr.warped));
        fd.fuse_masks.push_back(std::move(wr.mask));
        fd.fuse_link.push_back(static_cast<int>(li));
    }

    fd.fused = nets.fusion.fuse(fd.fuse_feats, fd.fuse_masks, fd.fuse_ctx, mode);
    fd.logits = nets.head.forward(fd.fused, fd.head_ctx, mode);
    return fd;
}

long long accepted_bytes(const FrameData& fd) {
    long long total = 0;
    for (const auto& ld : fd.links) {
        if (ld.accepted) total += ld.report.bytes;
    }
    return total;
}

}  // namespace

EpisodeResult run_episode(const Scenario& sc, PipelineNets& nets, const PipelineConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    EpisodeResult er;
    FrameData fd = frame_forward(sc, nets, cfg, Mode::Eval, 0);
    const DetectionTruth truth = truth_in_agent_frame(sc, 0);

    er.task_loss = detection_loss(fd.logits, truth.mask, cfg.pos_weight).value;
    auto aps = detection_metric(fd.logits, truth, {0.3, 0.5});
    er.fused_ap30 = aps[0];
    er.fused_ap50 = aps[1];

    SoftmaxFusion::Ctx solo_ctx;
    nn::Sequential::Ctx solo_head_ctx;
    const int fh = sc.cfg.world_h / 2, fw = sc.cfg.world_w / 2;
    Tensor solo_fused = nets.fusion.fuse({fd.z[0]}, {Tensor::full({1, fh, fw}, 1.0)}, solo_ctx,
                                         Mode::Eval);
    Tensor solo_logits = nets.head.forward(solo_fused, solo_head_ctx, Mode::Eval);
    auto solo_aps = detection_metric(solo_logits, truth, {0.3, 0.5});
    er.solo_ap30 = solo_aps[0];
    er.solo_ap50 = solo_aps[1];

    for (const auto& ld : fd.links) er.link_reports.push_back(ld.report);
    er.budget = fd.budget;
    const long long bytes = accepted_bytes(fd);
    er.comm_log2_total = bytes > 0 ? std::log2(static_cast<double>(bytes)) : 0.0;
    er.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return er;
}

TrainRow train_frame(const Scenario& sc, PipelineNets& nets, const PipelineConfig& cfg,
                     int step_index) {
    FrameData fd = frame_forward(sc, nets, cfg, Mode::Train,
                                 static_cast<std::uint32_t>(step_index));
    const DetectionTruth truth = truth_in_agent_frame(sc, 0);
    const LossValue det = detection_loss(fd.logits, truth.mask, cfg.pos_weight);

    const nn::AdamConfig adam{cfg.lr, 0.9, 0.999, 1e-8};
    TrainRow row;
    row.step = step_index;
    row.task_loss = det.value;

    std::vector<const LinkData*> accepted;
    for (const auto& ld : fd.links) {
        if (ld.accepted) accepted.push_back(&ld);
    }

    // Discriminator phase: one update per frame over all live links.
    if (nets.mode == CollabMode::Generator && !accepted.empty()) {
        double l_d_acc = 0.0;
        for (const LinkData* ld : accepted) {
            const Tensor& real =
                cfg.adv_real_original ? fd.z[static_cast<std::size_t>(ld->agent)] : ld->target;
            nn::Sequential::Ctx ctx_real, ctx_fake;
            Tensor p_real = nets.distill.discriminator.forward(real, ctx_real, Mode::Train);
            Tensor p_fake = nets.distill.discriminator.forward(ld->recon, ctx_fake, Mode::Train);
            AdvLoss al = loss_adv(p_real, p_fake);
            nets.distill.discriminator.backward(al.grad_d_real, ctx_real);
            nets.distill.discriminator.backward(al.grad_d_fake, ctx_fake);
            l_d_acc += al.l_d;
        }
        auto d_params = nets.distill.discriminator.params();
        nn::adam_step(d_params, adam);
        row.distill.l_d = l_d_acc / static_cast<double>(accepted.size());
    }

    // Generator-side phase: task loss through head, fusion, warps, then per
    // link the distillation terms, back through quantization (straight
    // through), sender, and the wavelet adjoint into each encoder.
    Tensor g_fused = nets.head.backward(det.grad_pred, fd.head_ctx);
    std::vector<Tensor> g_inputs = nets.fusion.backward(g_fused, fd.fuse_ctx);

    const int n = static_cast<int>(sc.agents.size());
    std::vector<Tensor> g_z;
    g_z.reserve(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) g_z.emplace_back(fd.z[static_cast<std::size_t>(a)].shape());
    g_z[0] += g_inputs[0];

    double lr_acc = 0.0, ls_acc = 0.0, lp_acc = 0.0, lg_acc = 0.0;
    for (std::size_t slot = 1; slot < g_inputs.size(); ++slot) {
        LinkData& ld = fd.links[static_cast<std::size_t>(fd.fuse_link[slot])];
        const int fh = ld.recon.height(), fw = ld.recon.width();
        Tensor g_recon_task = warp_affine_backward(g_inputs[slot], ld.pose, fh, fw);

        Tensor g_recon(ld.recon.shape());
        if (cfg.task_to_generator || nets.mode == CollabMode::IdwtOnly) g_recon += g_recon_task;

        Tensor g_ll_rx;
        if (nets.mode == CollabMode::Generator) {
            const LossValue rec = loss_recon(ld.recon, ld.target);
            const LossValue ssim = loss_ssim(ld.recon, ld.target);
            // An empty view encodes to an exactly-zero map at init (zero
            // biases); the perceptual term is undefined there, so it sits
            // out for that link.
            const bool percep_defined =
                ld.recon.l2_norm() > 0.0 && ld.target.l2_norm() > 0.0;
            const LossValue percep = percep_defined
                                         ? loss_percep(ld.recon, ld.target,
                                                       cfg.percep_per_channel)
                                         : LossValue{0.0, Tensor(ld.recon.shape())};
            lr_acc += rec.value;
            ls_acc += ssim.value;
            lp_acc += percep.value;
            const LossWeights& w = cfg.weights;
            for (std::size_t i = 0; i < g_recon.size(); ++i) {
                g_recon[i] += w.lambda_recon *
                              (w.alpha * rec.grad_pred[i] + w.beta * ssim.grad_pred[i] +
                               w.gamma * percep.grad_pred[i]);
            }
            nn::Sequential::Ctx adv_ctx;
            Tensor p_fake = nets.distill.discriminator.forward(ld.recon, adv_ctx, Mode::Train);
            const LossValue lg = loss_gen(p_fake);
            lg_acc += lg.value;
            if (w.lambda_adv != 0.0) {
                Tensor g_through =
                    nets.distill.discriminator.backward(lg.grad_pred * w.lambda_adv, adv_ctx);
                auto d_params = nets.distill.discriminator.params();
                nn::zero_grads(d_params);
                g_recon += g_through;
            }
            g_ll_rx = nets.distill.generator.backward(g_recon, ld.gen_ctx);
        } else {
            g_ll_rx = dwt2(g_recon, nets.levels).ll;  // adjoint of idwt2_lowpass
        }

        // Quantization passes gradients straight through.
        SenderNet::BandGrads bg = nets.sender.backward(g_ll_rx, ld.pyr, ld.sender_ctx);
        SubbandPyramid gp;
        gp.levels = nets.levels;
        gp.ll = std::move(bg.g_ll);
        for (int k = 1; k <= nets.levels; ++k) {
            const auto& det_k = ld.pyr.details[static_cast<std::size_t>(k - 1)];
            gp.details.push_back({Tensor(det_k.lh.shape()), Tensor(det_k.hl.shape()),
                                  Tensor(det_k.hh.shape())});
        }
        if (!bg.g_lh.empty()) {
            gp.details.back().lh = std::move(bg.g_lh);
            gp.details.back().hl = std::move(bg.g_hl);
            gp.details.back().hh = std::move(bg.g_hh);
        }
        g_z[static_cast<std::size_t>(ld.agent)] += idwt2(gp);
    }

    for (int a = 0; a < n; ++a) {
        nets.encoder.backward(g_z[static_cast<std::size_t>(a)],
                              fd.enc_ctx[static_cast<std::size_t>(a)]);
    }
    auto g_params = nets.gen_side_params();
    nn::adam_step(g_params, adam);

    if (!accepted.empty() && nets.mode == CollabMode::Generator) {
        const double cnt = static_cast<double>(accepted.size());
        row.distill.l_recon = lr_acc / cnt;
        row.distill.l_ssim = ls_acc / cnt;
        row.distill.l_percep = lp_acc / cnt;
        row.distill.l_g = lg_acc / cnt;
        MsdTotal tot = msd_total({row.distill.l_recon, row.distill.l_ssim, row.distill.l_percep,
                                  row.distill.l_g, row.distill.l_d},
                                 cfg.weights);
        row.distill.l_recon_total = tot.l_recon_total;
        row.distill.l_adv = tot.l_adv;
    }

    const bool finite = std::isfinite(row.task_loss) && std::isfinite(row.distill.l_recon_total) &&
                        std::isfinite(row.distill.l_adv) && std::isfinite(row.distill.l_d);
    if (!finite) {
        throw NumericError("train_frame: non-finite loss at step " + std::to_string(step_index));
    }
    return row;
}

TrainOutput train_e2e(const PipelineConfig& cfg) {
    validate_pipeline_config(cfg);
    Rng init_rng(Rng::derive(cfg.seed, 0));
    TrainOutput out{PipelineNets(cfg, init_rng), {}};
    int step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (int frame = 0; frame < cfg.frames_per_epoch; ++frame) {
            ++step;
            ScenarioConfig sc_cfg = cfg.scenario;
            sc_cfg.seed = Rng::derive(cfg.seed, 1, static_cast<std::uint64_t>(step - 1));
            const Scenario sc = gen_scenario(sc_cfg);
            out.trajectory.push_back(train_frame(sc, out.nets, cfg, step));
        }
    }
    return out;
}

void write_loss_csv(const std::vector<TrainRow>& rows, const std::string& path) {
    std::string s = "step,L_Recon,L_SSIM,L_Percep,L_G,L_D,L_ReconTotal,L_Adv,task_loss\n";
    for (const auto& r : rows) {
        s += std::to_string(r.step);
        s += "," + fmt_sci(r.distill.l_recon, 9);
        s += "," + fmt_sci(r.distill.l_ssim, 9);
        s += "," + fmt_sci(r.distill.l_percep, 9);
        s += "," + fmt_sci(r.distill.l_g, 9);
        s += "," + fmt_sci(r.distill.l_d, 9);
        s += "," + fmt_sci(r.distill.l_recon_total, 9);
        s += "," + fmt_sci(r.distill.l_adv, 9);
        s += "," + fmt_sci(r.task_loss, 9);
        s += "\n";
    }
    write_text_file(path, s);
}

EvalSummary evaluate(PipelineNets& nets, const PipelineConfig& cfg) {
    validate_pipeline_config(cfg);
    EvalSummary sum;
    for (int i = 0; i < cfg.eval_frames; ++i) {
        ScenarioConfig sc_cfg = cfg.scenario;
        sc_cfg.seed = Rng::derive(cfg.seed, 2, static_cast<std::uint64_t>(i));
        const Scenario sc = gen_scenario(sc_cfg);
        EpisodeResult er = run_episode(sc, nets, cfg);
        MetricRow row;
        row.frame_id = static_cast<std::uint32_t>(i);
        row.ap30 = er.fused_ap30;
        row.ap50 = er.fused_ap50;
        row.comm_log2 = er.comm_log2_total;
        sum.rows.push_back(row);
        if (er.fused_ap50.skipped) {
            sum.frames_skipped += 1;
        } else {
            sum.frames_used += 1;
            sum.mean_ap30 += er.fused_ap30.ap;
            sum.mean_ap50 += er.fused_ap50.ap;
            sum.mean_comm_log2 += er.comm_log2_total;
        }
    }
    if (sum.frames_used > 0) {
        sum.mean_ap30 /= sum.frames_used;
        sum.mean_ap50 /= sum.frames_used;
        sum.mean_comm_log2 /= sum.frames_used;
    }
    return sum;
}

void write_metric_csv(const EvalSummary& summary, const std::string& variant, std::uint64_t seed,
                      const std::string& path) {
    std::string s = "frame_id,ap30,ap50,comm_log2,variant,seed\n";
    for (const auto& r : summary.rows) {
        s += std::to_string(r.frame_id);
        s += "," + (r.ap30.skipped ? std::string("nan") : fmt_fixed(r.ap30.ap, 6));
        s += "," + (r.ap50.skipped ? std::string("nan") : fmt_fixed(r.ap50.ap, 6));
        s += "," + fmt_fixed(r.comm_log2, 6);
        s += "," + variant;
        s += "," + std::to_string(seed);
        s += "\n";
    }
    write_text_file(path, s);
}

const char* ablation_suite_name(AblationSuite s) {
    switch (s) {
        case AblationSuite::Reconstruction: return "reconstruction";
        case AblationSuite::FuseVariant: return "fuse_variant";
        case AblationSuite::Multilevel: return "multilevel";
    }
    return "reconstruction";
}

AblationSuite ablation_suite_from_name(const std::string& name) {
    if (name == "reconstruction") return AblationSuite::Reconstruction;
    if (name == "fuse_variant") return AblationSuite::FuseVariant;
    if (name == "multilevel") return AblationSuite::Multilevel;
    throw ConfigError("unknown ablation suite: " + name);
}

AblationResult run_ablation(AblationSuite suite, const PipelineConfig& base,
                            const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw ConfigError("run_ablation: need at least one seed");

    struct Arm {
        std::string name;
        PipelineConfig cfg;
    };
    std::vector<Arm> arms;
    const auto with = [&base](auto&& mutate) {
        PipelineConfig c = base;
        mutate(c);
        return c;
    };
    switch (suite) {
        case AblationSuite::Reconstruction:
            arms.push_back({"no_collab", with([](PipelineConfig& c) {
                                c.mode = CollabMode::NoCollab;
                            })});
            arms.push_back({"idwt_only", with([](PipelineConfig& c) {
                                c.mode = CollabMode::IdwtOnly;
                            })});
            arms.push_back({"generator", with([](PipelineConfig& c) {
                                c.mode = CollabMode::Generator;
                            })});
            break;
        case AblationSuite::FuseVariant:
            for (SenderVariant v :
                 {SenderVariant::Base, SenderVariant::AddFuse, SenderVariant::ConcatFuse}) {
                arms.push_back({sender_variant_name(v), with([v](PipelineConfig& c) {
                                    c.mode = CollabMode::Generator;
                                    c.variant = v;
                                })});
            }
            break;
        case AblationSuite::Multilevel:
            for (int lv : {1, 2, 3}) {
                arms.push_back({std::to_string(lv) + "_level", with([lv](PipelineConfig& c) {
                                    c.mode = CollabMode::Generator;
                                    c.levels = lv;
                                })});
            }
            break;
    }

    AblationResult result;
    result.suite = suite;
    for (const Arm& arm : arms) {
        for (std::uint64_t seed : seeds) {
            PipelineConfig cfg = arm.cfg;
            cfg.seed = seed;
            TrainOutput trained = train_e2e(cfg);
            EvalSummary ev = evaluate(trained.nets, cfg);
            result.rows.push_back({arm.name, seed, ev.mean_ap30, ev.mean_ap50,
                                   ev.mean_comm_log2});
        }
    }
    return result;
}

void write_ablation_csv(const AblationResult& result, const std::string& path) {
    std::string s = "suite,arm,seed,ap30,ap50,comm_log2\n";
    for (const auto& r : result.rows) {
        s += ablation_suite_name(result.suite);
        s += "," + r.arm;
        s += "," + std::to_string(r.seed);
        s += "," + fmt_fixed(r.ap30, 6);
        s += "," + fmt_fixed(r.ap50, 6);
        s += "," + fmt_fixed(r.comm_log2, 6);
        s += "\n";
    }
    write_text_file(path, s);
}

void write_ablation_summary_csv(const AblationResult& result, const std::string& path) {
    std::vector<std::string> arm_order;
    for (const auto& r : result.rows) {
        bool seen = false;
        for (const auto& a : arm_order) {
            if (a == r.arm) seen = true;
        }
        if (!seen) arm_order.push_back(r.arm);
    }

    std::string s = "suite,arm,mean_ap30,sd_ap30,mean_ap50,sd_ap50,mean_comm_log2\n";
    for (const auto& arm : arm_order) {
        std::vector<double> a30, a50, comm;
        for (const auto& r : result.rows) {
            if (r.arm != arm) continue;
            a30.push_back(r.ap30);
            a50.push_back(r.ap50);
            comm.push_back(r.comm_log2);
        }
        auto mean = [](const std::vector<double>& v) {
            double m = 0.0;
            for (double x : v) m += x;
            return v.empty() ? 0.0 : m / static_cast<double>(v.size());
        };
        auto sd = [&mean](const std::vector<double>& v) {
            if (v.size() < 2) return 0.0;
            const double m = mean(v);
            double acc = 0.0;
            for (double x : v) acc += (x - m) * (x - m);
            return std::sqrt(acc / static_cast<double>(v.size() - 1));
        };
        s += ablation_suite_name(result.suite);
        s += "," + arm;
        s += "," + fmt_fixed(mean(a30), 6);
        s += "," + fmt_fixed(sd(a30), 6);
        s += "," + fmt_fixed(mean(a50), 6);
        s += "," + fmt_fixed(sd(a50), 6);
        s += "," + fmt_fixed(mean(comm), 6);
        s += "\n";
    }
    write_text_file(path, s);
}

}  // namespace wavecomm
