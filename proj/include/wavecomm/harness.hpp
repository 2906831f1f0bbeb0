#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wavecomm/checkpoint.hpp"
#include "wavecomm/distill.hpp"
#include "wavecomm/fusion.hpp"
#include "wavecomm/perception.hpp"
#include "wavecomm/scenario.hpp"
#include "wavecomm/wire.hpp"

namespace wavecomm {

enum class CollabMode { NoCollab, IdwtOnly, Generator };

const char* collab_mode_name(CollabMode m);
CollabMode collab_mode_from_name(const std::string& name);

struct PipelineConfig {
    ScenarioConfig scenario;
    int channels = 16;
    int levels = 1;
    CollabMode mode = CollabMode::Generator;
    SenderVariant variant = SenderVariant::Base;
    WireDtype dtype = WireDtype::F16;
    LossWeights weights;
    double lr = 0.002;
    double pos_weight = 2.0;
    bool percep_per_channel = false;
    bool task_to_generator = true;
    bool adv_real_original = false;  // discriminator real sample: Z instead of Z'
    double budget_log2 = 0.0;        // <= 0 selects the exact-fit auto budget
    BudgetPolicy policy = BudgetPolicy::Reject;
    int epochs = 3;
    int frames_per_epoch = 40;
    int eval_frames = 25;
    std::uint64_t seed = 1;
};

// Feature-grid dims are world dims / 2; they must further divide by 2^levels.
void validate_pipeline_config(const PipelineConfig& cfg);

// Exact-fit budget: log2 of the total LL bytes all non-ego links send per
// frame at the configured dtype. Full-resolution f32 transmission strictly
// exceeds it.
double auto_budget_log2(const PipelineConfig& cfg);

struct PipelineNets {
    int channels = 0;
    int levels = 1;
    CollabMode mode = CollabMode::Generator;
    nn::Sequential encoder;
    nn::Sequential head;
    SenderNet sender;
    SoftmaxFusion fusion;
    DistillNets distill;

    PipelineNets(const PipelineConfig& cfg, nn::Rng& rng);

    std::vector<nn::Param*> gen_side_params();  // everything except the discriminator
    void register_checkpoint(Checkpoint& ck);
};

struct EpisodeResult {
    std::vector<CommVolumeReport> link_reports;
    BudgetOutcome budget;
    double comm_log2_total = 0.0;  // 0.0 when nothing was sent
    ApResult fused_ap30, fused_ap50;
    ApResult solo_ap30, solo_ap50;  // ego-only baseline on the same frame
    double task_loss = 0.0;
    double wall_clock_sec = 0.0;   // never written to CSVs
};

// Inference-only pass over one scenario: encode, decompose, transmit under
// the budget, reconstruct, warp, fuse at agent 0, detect, score.
EpisodeResult run_episode(const Scenario& sc, PipelineNets& nets, const PipelineConfig& cfg);

struct TrainRow {
    int step = 0;
    DistillReport distill;
    double task_loss = 0.0;
};

struct TrainOutput {
    PipelineNets nets;
    std::vector<TrainRow> trajectory;
};

// One optimization step on one scenario: discriminator update per link, then
// a joint generator-side update (task loss plus distillation losses).
TrainRow train_frame(const Scenario& sc, PipelineNets& nets, const PipelineConfig& cfg,
                     int step_index);

// Full training loop over epochs * frames_per_epoch deterministic scenarios.
TrainOutput train_e2e(const PipelineConfig& cfg);

void write_loss_csv(const std::vector<TrainRow>& rows, const std::string& path);

struct MetricRow {
    std::uint32_t frame_id = 0;
    ApResult ap30, ap50;
    double comm_log2 = 0.0;
};

struct EvalSummary {
    std::vector<MetricRow> rows;
    double mean_ap30 = 0.0;
    double mean_ap50 = 0.0;
    double mean_comm_log2 = 0.0;
    int frames_used = 0;
    int frames_skipped = 0;
};

EvalSummary evaluate(PipelineNets& nets, const PipelineConfig& cfg);

void write_metric_csv(const EvalSummary& summary, const std::string& variant, std::uint64_t seed,
                      const std::string& path);

enum class AblationSuite { Reconstruction, FuseVariant, Multilevel };

const char* ablation_suite_name(AblationSuite s);
AblationSuite ablation_suite_from_name(const std::string& name);

struct AblationRow {
    std::string arm;
    std::uint64_t seed = 0;
    double ap30 = 0.0;
    double ap50 = 0.0;
    double comm_log2 = 0.0;
};

struct AblationResult {
    AblationSuite suite = AblationSuite::Reconstruction;
    std::vector<AblationRow> rows;
};

// Trains and evaluates every arm of a suite over the given seeds with the
// paired-seed scenario discipline. Arms: reconstruction = no_collab /
// idwt_only / generator; fuse_variant = base / add_fuse / concat_fuse;
// multilevel = levels 1 / 2 / 3.
AblationResult run_ablation(AblationSuite suite, const PipelineConfig& base,
                            const std::vector<std::uint64_t>& seeds);

void write_ablation_csv(const AblationResult& result, const std::string& path);
void write_ablation_summary_csv(const AblationResult& result, const std::string& path);

}  // namespace wavecomm
