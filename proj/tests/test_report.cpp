#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <string>

#include "wavecomm/csvio.hpp"
#include "wavecomm/errors.hpp"
#include "wavecomm/report.hpp"

using namespace wavecomm;

namespace {

const char* kSamplePath = "/tmp/wavecomm_test_report.csv";

void write_sample() {
    write_text_file(kSamplePath,
                    "suite,arm,seed,ap30,ap50,comm_log2\n"
                    "reconstruction,no_collab,1,0.8,0.7,0\n"
                    "reconstruction,no_collab,2,0.9,0.8,0\n"
                    "reconstruction,generator,1,0.85,0.75,14\n");
}

}  // namespace

TEST_CASE("summaries aggregate per arm with sample standard deviation") {
    write_sample();
    const auto rows = summarize_ablation_csv(kSamplePath);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].arm == "no_collab");
    CHECK(rows[0].n == 2);
    CHECK(rows[0].mean_ap30 == doctest::Approx(0.85).epsilon(1e-12));
    CHECK(rows[0].mean_ap50 == doctest::Approx(0.75).epsilon(1e-12));
    // Sample sd of {0.7, 0.8} is sqrt(0.005).
    CHECK(rows[0].sd_ap50 == doctest::Approx(std::sqrt(0.005)).epsilon(1e-9));
    CHECK(rows[0].mean_comm_log2 == 0.0);
    CHECK(rows[1].arm == "generator");
    CHECK(rows[1].n == 1);
    CHECK(rows[1].sd_ap30 == 0.0);
    CHECK(rows[1].sd_ap50 == 0.0);
    CHECK(rows[1].mean_comm_log2 == doctest::Approx(14.0));
    std::remove(kSamplePath);
}

TEST_CASE("arm order follows first appearance") {
    write_text_file(kSamplePath,
                    "suite,arm,seed,ap30,ap50,comm_log2\n"
                    "multilevel,3_level,1,0.5,0.4,10\n"
                    "multilevel,1_level,1,0.9,0.8,14\n"
                    "multilevel,3_level,2,0.6,0.5,10\n");
    const auto rows = summarize_ablation_csv(kSamplePath);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].arm == "3_level");
    CHECK(rows[0].n == 2);
    CHECK(rows[1].arm == "1_level");
    std::remove(kSamplePath);
}

TEST_CASE("bad headers and missing files are rejected") {
    write_text_file(kSamplePath, "arm,seed,ap50\nx,1,0.5\n");
    CHECK_THROWS_AS(summarize_ablation_csv(kSamplePath), FormatError);
    write_text_file(kSamplePath, "");
    CHECK_THROWS_AS(summarize_ablation_csv(kSamplePath), FormatError);
    write_text_file(kSamplePath, "suite,arm,seed,ap30,ap50,comm_log2\nonly,four,fields\n");
    CHECK_THROWS_AS(summarize_ablation_csv(kSamplePath), FormatError);
    std::remove(kSamplePath);
    CHECK_THROWS_AS(summarize_ablation_csv(kSamplePath), FormatError);  // missing file
}

TEST_CASE("summary table lists every arm with aligned columns") {
    write_sample();
    const auto rows = summarize_ablation_csv(kSamplePath);
    const std::string table = render_summary_table(rows);
    CHECK(table.find("no_collab") != std::string::npos);
    CHECK(table.find("generator") != std::string::npos);
    CHECK(table.find("ap50") != std::string::npos);
    CHECK(table.find("0.750") != std::string::npos);
    std::remove(kSamplePath);
}

TEST_CASE("scatter svg is deterministic and labeled") {
    write_sample();
    const auto rows = summarize_ablation_csv(kSamplePath);
    const std::string svg = render_scatter_svg(rows);
    CHECK(svg == render_scatter_svg(rows));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("comm volume (log2 bytes)") != std::string::npos);
    CHECK(svg.find("mean AP50") != std::string::npos);
    CHECK(svg.find("no_collab") != std::string::npos);
    CHECK(svg.find("generator") != std::string::npos);
    CHECK(svg.find("<circle") != std::string::npos);
    std::remove(kSamplePath);
}

TEST_CASE("write_report emits both artifacts") {
    write_sample();
    const std::string table_path = "/tmp/wavecomm_test_summary.txt";
    const std::string svg_path = "/tmp/wavecomm_test_scatter.svg";
    write_report(kSamplePath, table_path, svg_path);
    CHECK(read_text_file(table_path).find("no_collab") != std::string::npos);
    CHECK(read_text_file(svg_path).rfind("<svg", 0) == 0);
    std::remove(kSamplePath);
    std::remove(table_path.c_str());
    std::remove(svg_path.c_str());
}
