#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wavecomm/bytesio.hpp"
#include "wavecomm/config.hpp"
#include "wavecomm/csvio.hpp"
#include "wavecomm/errors.hpp"
#include "wavecomm/f16.hpp"
#include "wavecomm/gradcheck.hpp"
#include "wavecomm/report.hpp"
#include "wavecomm/wavelet.hpp"

namespace {

using namespace wavecomm;
using nn::Mode;
using nn::Rng;
using nn::Tensor;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    long long seed = -1;
};

void add_common(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--config", c.config_path, "sectioned key=value config file");
    sub->add_option("--set", c.sets, "override, e.g. --set train.lr=0.01")->take_all();
    sub->add_option("--seed", c.seed, "run seed (env WAVECOMM_SEED as fallback)");
}

RunConfig make_config(const CommonOpts& c) {
    RunConfig cfg;
    if (!c.config_path.empty()) cfg = load_config(c.config_path);
    for (const std::string& kv : c.sets) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        }
        apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    long long seed = c.seed;
    if (seed < 0) {
        if (const char* env = std::getenv("WAVECOMM_SEED")) {
            char* end = nullptr;
            seed = std::strtoll(env, &end, 10);
            if (end == env || *end != '\0' || seed < 0) {
                throw ConfigError("WAVECOMM_SEED must be a non-negative integer");
            }
        }
    }
    if (seed >= 0) {
        cfg.pipe.seed = static_cast<std::uint64_t>(seed);
        cfg.pipe.scenario.seed = static_cast<std::uint64_t>(seed);
    }
    return cfg;
}

int cmd_gen_data(const CommonOpts& common, const std::string& out) {
    const RunConfig cfg = make_config(common);
    const Scenario sc = gen_scenario(cfg.pipe.scenario);
    save_scenario(sc, out);
    std::printf("wrote %s: %dx%d world, %zu objects, %zu agents, seed %llu\n", out.c_str(),
                sc.cfg.world_h, sc.cfg.world_w, sc.boxes.size(), sc.agents.size(),
                static_cast<unsigned long long>(sc.cfg.seed));
    return 0;
}

int cmd_train(const CommonOpts& common, const std::string& prefix) {
    const RunConfig cfg = make_config(common);
    validate_pipeline_config(cfg.pipe);
    TrainOutput out = train_e2e(cfg.pipe);
    write_loss_csv(out.trajectory, prefix + "_loss.csv");
    Checkpoint ck;
    out.nets.register_checkpoint(ck);
    ck.save(prefix + ".wcpt");
    save_config(cfg, prefix + "_config.cfg");
    const TrainRow last = out.trajectory.empty() ? TrainRow{} : out.trajectory.back();
    std::printf("trained %d steps (%s mode)\n", static_cast<int>(out.trajectory.size()),
                collab_mode_name(cfg.pipe.mode));
    std::printf("final: task_loss %.6f  L_ReconTotal %.6f  L_Adv %.6f  L_D %.6f\n",
                last.task_loss, last.distill.l_recon_total, last.distill.l_adv,
                last.distill.l_d);
    std::printf("wrote %s_loss.csv, %s.wcpt, %s_config.cfg\n", prefix.c_str(), prefix.c_str(),
                prefix.c_str());
    return 0;
}

int cmd_eval(const CommonOpts& common, const std::string& ckpt, const std::string& out_csv) {
    const RunConfig cfg = make_config(common);
    validate_pipeline_config(cfg.pipe);
    Rng rng(Rng::derive(cfg.pipe.seed, 0));
    PipelineNets nets(cfg.pipe, rng);
    if (!ckpt.empty()) {
        Checkpoint ck;
        nets.register_checkpoint(ck);
        ck.load(ckpt);
    }
    const EvalSummary sum = evaluate(nets, cfg.pipe);
    write_metric_csv(sum, collab_mode_name(cfg.pipe.mode), cfg.pipe.seed, out_csv);
    std::printf("evaluated %d frames (%d skipped: empty truth)\n", sum.frames_used,
                sum.frames_skipped);
    std::printf("mean AP@0.3 %.4f  mean AP@0.5 %.4f  mean comm log2 %.3f\n", sum.mean_ap30,
                sum.mean_ap50, sum.mean_comm_log2);
    std::printf("wrote %s\n", out_csv.c_str());
    return 0;
}

int cmd_ablate(const CommonOpts& common, std::string suite_name, std::string seeds_csv,
               const std::string& out_csv, const std::string& summary_csv) {
    RunConfig cfg = make_config(common);
    if (!suite_name.empty()) cfg.suite = ablation_suite_from_name(suite_name);
    if (!seeds_csv.empty()) cfg.seeds = parse_seed_list(seeds_csv);
    const AblationResult res = run_ablation(cfg.suite, cfg.pipe, cfg.seeds);
    write_ablation_csv(res, out_csv);
    write_ablation_summary_csv(res, summary_csv);
    const auto rows = summarize_ablation_csv(out_csv);
    std::fputs(render_summary_table(rows).c_str(), stdout);
    std::printf("wrote %s, %s\n", out_csv.c_str(), summary_csv.c_str());
    return 0;
}

int cmd_compress(const CommonOpts& common, const std::string& in, const std::string& out,
                 int levels_flag, const std::string& dtype_flag, int agent) {
    RunConfig cfg = make_config(common);
    if (levels_flag > 0) cfg.pipe.levels = levels_flag;
    if (!dtype_flag.empty()) {
        if (dtype_flag == "f16") {
            cfg.pipe.dtype = WireDtype::F16;
        } else if (dtype_flag == "f32") {
            cfg.pipe.dtype = WireDtype::F32;
        } else {
            throw ConfigError("--dtype must be f16 or f32");
        }
    }
    const Scenario sc = load_scenario(in);
    if (agent < 0 || agent >= static_cast<int>(sc.agents.size())) {
        throw ConfigError("--agent out of range");
    }
    Rng rng(Rng::derive(cfg.pipe.seed, 0));
    nn::Sequential encoder = build_encoder(cfg.pipe.channels, rng);
    nn::Sequential::Ctx ctx;
    const Tensor z = encoder.forward(render_local_view(sc, agent), ctx, Mode::Eval);
    const SubbandPyramid pyr = dwt2(z, cfg.pipe.levels);

    WaveMessageMeta meta;
    meta.agent_id = static_cast<std::uint16_t>(agent);
    meta.levels = static_cast<std::uint8_t>(cfg.pipe.levels);
    meta.dtype = cfg.pipe.dtype;
    meta.pose = pose_to_ego(sc, agent, 0).m;
    const std::vector<std::uint8_t> bytes = pack_message(pyr.ll, meta);
    write_file_bytes(out, bytes);

    const int bits = cfg.pipe.dtype == WireDtype::F16 ? 16 : 32;
    const long long cells = static_cast<long long>(pyr.ll.height()) * pyr.ll.width();
    std::printf("wrote %s: %d ch x %d x %d, %d levels, %s\n", out.c_str(), pyr.ll.channels(),
                pyr.ll.height(), pyr.ll.width(), cfg.pipe.levels,
                cfg.pipe.dtype == WireDtype::F16 ? "f16" : "f32");
    std::printf("comm volume log2: %.6f\n", comm_volume(cells, pyr.ll.channels(), bits));
    return 0;
}

int cmd_inspect(const std::string& in) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(in);
    const UnpackedMessage msg = unpack_message(bytes);
    const int bits = msg.meta.dtype == WireDtype::F16 ? 16 : 32;
    const long long cells = static_cast<long long>(msg.ll.height()) * msg.ll.width();
    std::printf("%s: %zu bytes, crc ok\n", in.c_str(), bytes.size());
    std::printf("agent %u  frame %u  levels %u  dtype %s\n", msg.meta.agent_id,
                msg.meta.frame_id, msg.meta.levels,
                msg.meta.dtype == WireDtype::F16 ? "f16" : "f32");
    std::printf("payload %d ch x %d x %d  min %.6f  max %.6f\n", msg.ll.channels(),
                msg.ll.height(), msg.ll.width(), msg.ll.min(), msg.ll.max());
    std::printf("pose [%g %g %g; %g %g %g]\n", msg.meta.pose[0], msg.meta.pose[1],
                msg.meta.pose[2], msg.meta.pose[3], msg.meta.pose[4], msg.meta.pose[5]);
    std::printf("comm volume log2: %.6f\n", comm_volume(cells, msg.ll.channels(), bits));
    return 0;
}

int cmd_gradcheck(const CommonOpts& common) {
    const RunConfig cfg = make_config(common);
    Rng rng(Rng::derive(cfg.pipe.seed, 0));
    const int c = 4;
    struct Case {
        const char* name;
        nn::Sequential net;
        Tensor input;
    };
    std::vector<Case> cases;
    cases.push_back({"encoder", build_encoder(c, rng),
                     Tensor::random_uniform({1, 16, 16}, -1.0, 1.0, rng)});
    cases.push_back({"head", build_head(c, rng),
                     Tensor::random_uniform({c, 8, 8}, -1.0, 1.0, rng)});
    cases.push_back({"generator", build_generator(c, 1, rng),
                     Tensor::random_uniform({c, 4, 4}, -1.0, 1.0, rng)});
    cases.push_back({"discriminator", build_discriminator(c, rng),
                     Tensor::random_uniform({c, 16, 16}, -1.0, 1.0, rng)});

    bool ok = true;
    for (Case& cs : cases) {
        nn::Sequential::Ctx ctx;
        const Tensor out = cs.net.forward(cs.input, ctx, Mode::Train);
        Tensor target = Tensor::random_uniform(out.shape(), 0.1, 0.9, rng);
        const auto res = nn::grad_check(cs.net, cs.input, nn::mse_probe(target), rng, 24);
        std::printf("%-14s max rel err %.3e over %d probes\n", cs.name, res.max_rel_err,
                    res.probes);
        if (!(res.max_rel_err <= 1e-4)) ok = false;
    }
    if (!ok) {
        std::fprintf(stderr, "gradcheck failed: rel err above 1e-4\n");
        return 2;
    }
    std::printf("all gradients within 1e-4\n");
    return 0;
}

int cmd_report(const std::string& dir, const std::string& in_csv) {
    const std::string csv = in_csv.empty() ? dir + "/ablation.csv" : in_csv;
    if (!std::filesystem::exists(csv)) {
        throw ConfigError("report: no ablation csv at " + csv);
    }
    const std::string out_table = dir + "/summary.txt";
    const std::string out_svg = dir + "/ap_vs_comm.svg";
    write_report(csv, out_table, out_svg);
    std::fputs(read_text_file(out_table).c_str(), stdout);
    std::printf("wrote %s, %s\n", out_table.c_str(), out_svg.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavecomm: frequency-domain collaborative perception workbench"};
    app.require_subcommand(1);

    CommonOpts gen_c;
    std::string gen_out = "scenario.wscn";
    CLI::App* gen = app.add_subcommand("gen-data", "synthesize a scenario and write .wscn");
    add_common(gen, gen_c);
    gen->add_option("--out", gen_out, "output .wscn path");

    CommonOpts train_c;
    std::string train_prefix = "run";
    CLI::App* train = app.add_subcommand("train", "train the pipeline end to end");
    add_common(train, train_c);
    train->add_option("--out-prefix", train_prefix, "prefix for _loss.csv / .wcpt outputs");

    CommonOpts eval_c;
    std::string eval_ckpt, eval_csv = "metrics.csv";
    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on fresh scenarios");
    add_common(eval, eval_c);
    eval->add_option("--ckpt", eval_ckpt, ".wcpt checkpoint (omit for untrained nets)");
    eval->add_option("--metrics-csv", eval_csv, "per-frame metric CSV path");

    CommonOpts abl_c;
    std::string abl_suite, abl_seeds, abl_csv = "ablation.csv", abl_sum = "ablation_summary.csv";
    CLI::App* abl = app.add_subcommand("ablate", "train+eval every arm of an ablation suite");
    add_common(abl, abl_c);
    abl->add_option("--suite", abl_suite, "reconstruction | fuse_variant | multilevel");
    abl->add_option("--seeds", abl_seeds, "comma-separated seed list");
    abl->add_option("--out-csv", abl_csv, "per-seed CSV path");
    abl->add_option("--summary-csv", abl_sum, "per-arm summary CSV path");

    CommonOpts cmp_c;
    std::string cmp_in, cmp_out = "message.wvcm", cmp_dtype;
    int cmp_levels = 0, cmp_agent = 0;
    CLI::App* cmp = app.add_subcommand("compress", "encode a scenario view into a .wvcm message");
    add_common(cmp, cmp_c);
    cmp->add_option("--in", cmp_in, "input .wscn scenario")->required();
    cmp->add_option("--out", cmp_out, "output .wvcm path");
    cmp->add_option("--levels", cmp_levels, "DWT levels (1-3)");
    cmp->add_option("--dtype", cmp_dtype, "payload dtype: f16 | f32");
    cmp->add_option("--agent", cmp_agent, "sending agent index");

    std::string ins_in;
    CLI::App* ins = app.add_subcommand("inspect", "decode and describe a .wvcm message");
    ins->add_option("--in", ins_in, "input .wvcm message")->required();

    CommonOpts gc_c;
    CLI::App* gc = app.add_subcommand("gradcheck", "finite-difference audit of every network");
    add_common(gc, gc_c);

    std::string rep_dir = ".", rep_in;
    CLI::App* rep = app.add_subcommand("report", "aggregate ablation CSVs into table + SVG");
    rep->add_option("--dir", rep_dir, "results directory");
    rep->add_option("--in", rep_in, "explicit ablation CSV (default <dir>/ablation.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(gen_c, gen_out);
        if (train->parsed()) return cmd_train(train_c, train_prefix);
        if (eval->parsed()) return cmd_eval(eval_c, eval_ckpt, eval_csv);
        if (abl->parsed()) return cmd_ablate(abl_c, abl_suite, abl_seeds, abl_csv, abl_sum);
        if (cmp->parsed()) {
            return cmd_compress(cmp_c, cmp_in, cmp_out, cmp_levels, cmp_dtype, cmp_agent);
        }
        if (ins->parsed()) return cmd_inspect(ins_in);
        if (gc->parsed()) return cmd_gradcheck(gc_c);
        if (rep->parsed()) return cmd_report(rep_dir, rep_in);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
