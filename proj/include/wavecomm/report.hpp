#pragma once

#include <string>
#include <vector>

namespace wavecomm {

struct ArmSummary {
    std::string suite;
    std::string arm;
    int n = 0;
    double mean_ap30 = 0.0, sd_ap30 = 0.0;
    double mean_ap50 = 0.0, sd_ap50 = 0.0;
    double mean_comm_log2 = 0.0;
};

// Aggregates a per-seed ablation CSV (suite,arm,seed,ap30,ap50,comm_log2)
// into one row per arm, in first-appearance order. Sample standard
// deviation; zero for fewer than two seeds.
std::vector<ArmSummary> summarize_ablation_csv(const std::string& path);

// Fixed-width text table of the summaries.
std::string render_summary_table(const std::vector<ArmSummary>& rows);

// Deterministic SVG scatter of mean AP50 against mean comm volume (log2
// bytes), one labeled point per arm.
std::string render_scatter_svg(const std::vector<ArmSummary>& rows);

void write_report(const std::string& ablation_csv, const std::string& out_table,
                  const std::string& out_svg);

}  // namespace wavecomm
