#include "wavecomm/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "wavecomm/csvio.hpp"
#include "wavecomm/errors.hpp"

namespace wavecomm {

namespace {

double to_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw FormatError("report: bad numeric field '" + s + "'");
    }
    return v;
}

struct Acc {
    std::string suite, arm;
    std::vector<double> ap30, ap50, comm;
};

double mean_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return v.empty() ? 0.0 : m / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

std::vector<ArmSummary> summarize_ablation_csv(const std::string& path) {
    const auto rows = read_csv(path);
    if (rows.empty()) throw FormatError("report: empty ablation csv " + path);
    const std::vector<std::string> expect = {"suite", "arm", "seed", "ap30", "ap50", "comm_log2"};
    if (rows[0] != expect) throw FormatError("report: unexpected header in " + path);

    std::vector<Acc> accs;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 6) {
            throw FormatError("report: row " + std::to_string(i) + " has " +
                              std::to_string(r.size()) + " fields, want 6");
        }
        Acc* acc = nullptr;
        for (auto& a : accs) {
            if (a.arm == r[1] && a.suite == r[0]) acc = &a;
        }
        if (acc == nullptr) {
            accs.push_back({r[0], r[1], {}, {}, {}});
            acc = &accs.back();
        }
        acc->ap30.push_back(to_double(r[3]));
        acc->ap50.push_back(to_double(r[4]));
        acc->comm.push_back(to_double(r[5]));
    }

    std::vector<ArmSummary> out;
    for (const Acc& a : accs) {
        ArmSummary s;
        s.suite = a.suite;
        s.arm = a.arm;
        s.n = static_cast<int>(a.ap50.size());
        s.mean_ap30 = mean_of(a.ap30);
        s.sd_ap30 = sd_of(a.ap30);
        s.mean_ap50 = mean_of(a.ap50);
        s.sd_ap50 = sd_of(a.ap50);
        s.mean_comm_log2 = mean_of(a.comm);
        out.push_back(s);
    }
    return out;
}

std::string render_summary_table(const std::vector<ArmSummary>& rows) {
    std::string s;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-16s %-12s %4s %18s %18s %12s\n", "suite", "arm", "n",
                  "ap30 (mean+-sd)", "ap50 (mean+-sd)", "comm_log2");
    s += buf;
    s += std::string(16 + 1 + 12 + 1 + 4 + 1 + 18 + 1 + 18 + 1 + 12, '-') + "\n";
    for (const auto& r : rows) {
        char a30[32], a50[32];
        std::snprintf(a30, sizeof(a30), "%.4f+-%.4f", r.mean_ap30, r.sd_ap30);
        std::snprintf(a50, sizeof(a50), "%.4f+-%.4f", r.mean_ap50, r.sd_ap50);
        std::snprintf(buf, sizeof(buf), "%-16s %-12s %4d %18s %18s %12.4f\n", r.suite.c_str(),
                      r.arm.c_str(), r.n, a30, a50, r.mean_comm_log2);
        s += buf;
    }
    return s;
}

std::string render_scatter_svg(const std::vector<ArmSummary>& rows) {
    const int w = 640, h = 480;
    const int ml = 70, mr = 30, mt = 30, mb = 60;
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    if (!rows.empty()) {
        x_lo = x_hi = rows[0].mean_comm_log2;
        for (const auto& r : rows) {
            x_lo = std::min(x_lo, r.mean_comm_log2);
            x_hi = std::max(x_hi, r.mean_comm_log2);
        }
        const double pad = std::max(0.5, 0.1 * (x_hi - x_lo));
        x_lo -= pad;
        x_hi += pad;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    auto px = [&](double x) {
        return ml + (x - x_lo) / (x_hi - x_lo) * (w - ml - mr);
    };
    auto py = [&](double y) {
        return h - mb - (y - y_lo) / (y_hi - y_lo) * (h - mt - mb);
    };

    std::string s;
    char buf[512];
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
    s += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", ml,
                  h - mb, w - mr, h - mb);
    s += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", ml, mt,
                  ml, h - mb);
    s += buf;
    s += "<text x=\"320\" y=\"470\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"14\">comm volume (log2 bytes)</text>\n";
    s += "<text x=\"18\" y=\"240\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"14\" transform=\"rotate(-90 18 240)\">mean AP50</text>\n";

    for (int k = 0; k <= 5; ++k) {
        const double ty = y_lo + (y_hi - y_lo) * k / 5.0;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"%s\" text-anchor=\"end\" font-family=\"monospace\" "
                      "font-size=\"11\">%s</text>\n",
                      ml - 6, fmt_fixed(py(ty) + 4, 1).c_str(), fmt_fixed(ty, 1).c_str());
        s += buf;
        const double tx = x_lo + (x_hi - x_lo) * k / 5.0;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%s\" y=\"%d\" text-anchor=\"middle\" "
                      "font-family=\"monospace\" font-size=\"11\">%s</text>\n",
                      fmt_fixed(px(tx), 1).c_str(), h - mb + 18, fmt_fixed(tx, 1).c_str());
        s += buf;
    }

    for (const auto& r : rows) {
        const double cx = px(r.mean_comm_log2), cy = py(r.mean_ap50);
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%s\" cy=\"%s\" r=\"5\" fill=\"steelblue\"/>\n",
                      fmt_fixed(cx, 1).c_str(), fmt_fixed(cy, 1).c_str());
        s += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%s\" y=\"%s\" font-family=\"monospace\" "
                      "font-size=\"12\">%s</text>\n",
                      fmt_fixed(cx + 8, 1).c_str(), fmt_fixed(cy - 6, 1).c_str(),
                      r.arm.c_str());
        s += buf;
    }
    s += "</svg>\n";
    return s;
}

void write_report(const std::string& ablation_csv, const std::string& out_table,
                  const std::string& out_svg) {
    const auto rows = summarize_ablation_csv(ablation_csv);
    write_text_file(out_table, render_summary_table(rows));
    write_text_file(out_svg, render_scatter_svg(rows));
}

}  // namespace wavecomm
