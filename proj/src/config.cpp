#include "wavecomm/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "wavecomm/csvio.hpp"
#include "wavecomm/errors.hpp"

namespace wavecomm {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

long long parse_ll(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') {
        throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
    }
    return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    const long long x = parse_ll(key, v);
    if (x < 0) throw ConfigError("config: " + key + " must be non-negative");
    return static_cast<std::uint64_t>(x);
}

double parse_f(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') {
        throw ConfigError("config: bad number for " + key + ": '" + v + "'");
    }
    return x;
}

bool parse_b(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("config: bad bool for " + key + ": '" + v + "' (use true/false)");
}

std::string fmt_f(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_b(bool v) { return v ? "true" : "false"; }

std::string render_seeds(const std::vector<std::uint64_t>& seeds) {
    std::string s;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i > 0) s += ",";
        s += std::to_string(seeds[i]);
    }
    return s;
}

struct Field {
    const char* section;
    const char* key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

std::vector<Field> field_table() {
    std::vector<Field> t;
    auto add = [&t](const char* sec, const char* key, auto get, auto set) {
        t.push_back({sec, key, get, set});
    };
    auto add_si = [&add](const char* key, int ScenarioConfig::* ref) {
        add("scenario", key,
            [ref](const RunConfig& c) { return std::to_string(c.pipe.scenario.*ref); },
            [ref](RunConfig& c, const std::string& k, const std::string& v) {
                c.pipe.scenario.*ref = static_cast<int>(parse_ll(k, v));
            });
    };
    auto add_ti = [&add](const char* key, int PipelineConfig::* ref) {
        add("train", key, [ref](const RunConfig& c) { return std::to_string(c.pipe.*ref); },
            [ref](RunConfig& c, const std::string& k, const std::string& v) {
                c.pipe.*ref = static_cast<int>(parse_ll(k, v));
            });
    };
    auto add_td = [&add](const char* key, double PipelineConfig::* ref) {
        add("train", key, [ref](const RunConfig& c) { return fmt_f(c.pipe.*ref); },
            [ref](RunConfig& c, const std::string& k, const std::string& v) {
                c.pipe.*ref = parse_f(k, v);
            });
    };
    auto add_tb = [&add](const char* key, bool PipelineConfig::* ref) {
        add("train", key, [ref](const RunConfig& c) { return fmt_b(c.pipe.*ref); },
            [ref](RunConfig& c, const std::string& k, const std::string& v) {
                c.pipe.*ref = parse_b(k, v);
            });
    };
    auto add_w = [&add](const char* key, double LossWeights::* ref) {
        add("loss", key, [ref](const RunConfig& c) { return fmt_f(c.pipe.weights.*ref); },
            [ref](RunConfig& c, const std::string& k, const std::string& v) {
                c.pipe.weights.*ref = parse_f(k, v);
            });
    };

    add_si("world_h", &ScenarioConfig::world_h);
    add_si("world_w", &ScenarioConfig::world_w);
    add_si("n_agents", &ScenarioConfig::n_agents);
    add_si("n_objects", &ScenarioConfig::n_objects);
    add_si("obj_min", &ScenarioConfig::obj_min);
    add_si("obj_max", &ScenarioConfig::obj_max);
    add("scenario", "radius",
        [](const RunConfig& c) { return fmt_f(c.pipe.scenario.radius); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
            c.pipe.scenario.radius = parse_f(k, v);
        });
    add("scenario", "occlusion",
        [](const RunConfig& c) { return fmt_b(c.pipe.scenario.occlusion); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
            c.pipe.scenario.occlusion = parse_b(k, v);
        });
    add("scenario", "seed",
        [](const RunConfig& c) { return std::to_string(c.pipe.scenario.seed); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
            c.pipe.scenario.seed = parse_u64(k, v);
        });

    add_ti("channels", &PipelineConfig::channels);
    add_ti("levels", &PipelineConfig::levels);
    add("train", "mode",
        [](const RunConfig& c) { return std::string(collab_mode_name(c.pipe.mode)); },
        [](RunConfig& c, const std::string&, const std::string& v) {
            c.pipe.mode = collab_mode_from_name(v);
        });
    add("train", "variant",
        [](const RunConfig& c) { return std::string(sender_variant_name(c.pipe.variant)); },
        [](RunConfig& c, const std::string&, const std::string& v) {
            c.pipe.variant = sender_variant_from_name(v);
        });
    add_td("lr", &PipelineConfig::lr);
    add_td("pos_weight", &PipelineConfig::pos_weight);
    add_tb("percep_per_channel", &PipelineConfig::percep_per_channel);
    add_tb("task_to_generator", &PipelineConfig::task_to_generator);
    add_tb("adv_real_original", &PipelineConfig::adv_real_original);
    add_ti("epochs", &PipelineConfig::epochs);
    add_ti("frames_per_epoch", &PipelineConfig::frames_per_epoch);
    add_ti("eval_frames", &PipelineConfig::eval_frames);
    add("train", "seed", [](const RunConfig& c) { return std::to_string(c.pipe.seed); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
            c.pipe.seed = parse_u64(k, v);
        });

    add_w("lambda_recon", &LossWeights::lambda_recon);
    add_w("lambda_adv", &LossWeights::lambda_adv);
    add_w("alpha", &LossWeights::alpha);
    add_w("beta", &LossWeights::beta);
    add_w("gamma", &LossWeights::gamma);

    add("codec", "dtype",
        [](const RunConfig& c) {
            return std::string(c.pipe.dtype == WireDtype::F16 ? "f16" : "f32");
        },
        [](RunConfig& c, const std::string& k, const std::string& v) {
            if (v == "f16") {
                c.pipe.dtype = WireDtype::F16;
            } else if (v == "f32") {
                c.pipe.dtype = WireDtype::F32;
            } else {
                throw ConfigError("config: bad dtype for " + k + ": '" + v + "'");
            }
        });
    add("codec", "budget_log2",
        [](const RunConfig& c) { return fmt_f(c.pipe.budget_log2); },
        [](RunConfig& c, const std::string& k, const std::string& v) {
            c.pipe.budget_log2 = parse_f(k, v);
        });
    add("codec", "policy",
        [](const RunConfig& c) {
            return std::string(c.pipe.policy == BudgetPolicy::Reject ? "reject" : "drop_agent");
        },
        [](RunConfig& c, const std::string& k, const std::string& v) {
            if (v == "reject") {
                c.pipe.policy = BudgetPolicy::Reject;
            } else if (v == "drop_agent") {
                c.pipe.policy = BudgetPolicy::DropAgent;
            } else {
                throw ConfigError("config: bad policy for " + k + ": '" + v + "'");
            }
        });

    add("ablation", "suite",
        [](const RunConfig& c) { return std::string(ablation_suite_name(c.suite)); },
        [](RunConfig& c, const std::string&, const std::string& v) {
            c.suite = ablation_suite_from_name(v);
        });
    add("ablation", "seeds",
        [](const RunConfig& c) { return render_seeds(c.seeds); },
        [](RunConfig& c, const std::string&, const std::string& v) {
            c.seeds = parse_seed_list(v);
        });
    return t;
}

const Field* find_field(const std::vector<Field>& table, const std::string& section,
                        const std::string& key) {
    for (const Field& f : table) {
        if (section == f.section && key == f.key) return &f;
    }
    return nullptr;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t comma = csv.find(',', pos);
        if (comma == std::string::npos) comma = csv.size();
        const std::string item = trim(csv.substr(pos, comma - pos));
        if (item.empty()) throw ConfigError("config: empty entry in seed list '" + csv + "'");
        seeds.push_back(parse_u64("seeds", item));
        pos = comma + 1;
        if (comma == csv.size()) break;
    }
    if (seeds.empty()) throw ConfigError("config: empty seed list");
    return seeds;
}

RunConfig parse_config_text(const std::string& text) {
    const auto table = field_table();
    RunConfig cfg;
    std::string section;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(line_no));
            }
            section = trim(line.substr(1, line.size() - 2));
            bool known = false;
            for (const Field& f : table) {
                if (section == f.section) known = true;
            }
            if (!known) throw ConfigError("config: unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: expected key=value at line " + std::to_string(line_no));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            throw ConfigError("config: key '" + key + "' appears before any section");
        }
        const Field* f = find_field(table, section, key);
        if (f == nullptr) {
            throw ConfigError("config: unknown key '" + section + "." + key + "'");
        }
        f->set(cfg, section + "." + key, value);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    return parse_config_text(read_text_file(path));
}

std::string render_config(const RunConfig& cfg) {
    const auto table = field_table();
    std::string out;
    std::string section;
    for (const Field& f : table) {
        if (section != f.section) {
            if (!out.empty()) out += "\n";
            section = f.section;
            out += "[" + section + "]\n";
        }
        out += std::string(f.key) + " = " + f.get(cfg) + "\n";
    }
    return out;
}

void save_config(const RunConfig& cfg, const std::string& path) {
    write_text_file(path, render_config(cfg));
}

void apply_override(RunConfig& cfg, const std::string& dotted_key, const std::string& value) {
    const std::size_t dot = dotted_key.find('.');
    if (dot == std::string::npos) {
        throw ConfigError("config: override key must be section.name, got '" + dotted_key + "'");
    }
    const auto table = field_table();
    const std::string section = dotted_key.substr(0, dot);
    const std::string key = dotted_key.substr(dot + 1);
    const Field* f = find_field(table, section, key);
    if (f == nullptr) throw ConfigError("config: unknown key '" + dotted_key + "'");
    f->set(cfg, dotted_key, trim(value));
}

}  // namespace wavecomm
