#pragma once

#include <string>
#include <vector>

namespace wavecomm {

// snprintf-backed fixed formats so emitted CSVs are byte-stable across runs.
std::string fmt_fixed(double v, int precision);
std::string fmt_sci(double v, int precision);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Minimal comma-split CSV reader (no quoting; our writers never quote).
std::vector<std::vector<std::string>> read_csv(const std::string& path);

}  // namespace wavecomm
