#include "physedit/harness.hpp"

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "physedit/kernels.hpp"

namespace physedit {
namespace {

constexpr std::uint64_t kAttentionSeedTag = 0x6174746EULL;  // "attn"

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void parse_fail(const std::string& origin, int line,
                             const std::string& message) {
    throw ParseError(origin + ":" + std::to_string(line) + ": " + message);
}

double parse_real(const std::string& origin, int line, const std::string& key,
                  const std::string& value) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        parse_fail(origin, line, key + " expects a number, got '" + value + "'");
    }
    if (used != value.size()) {
        parse_fail(origin, line, key + " expects a number, got '" + value + "'");
    }
    return out;
}

long long parse_int(const std::string& origin, int line, const std::string& key,
                    const std::string& value) {
    std::size_t used = 0;
    long long out = 0;
    try {
        out = std::stoll(value, &used);
    } catch (const std::exception&) {
        parse_fail(origin, line,
                   key + " expects an integer, got '" + value + "'");
    }
    if (used != value.size()) {
        parse_fail(origin, line,
                   key + " expects an integer, got '" + value + "'");
    }
    return out;
}

std::uint64_t parse_u64(const std::string& origin, int line,
                        const std::string& key, const std::string& value) {
    std::size_t used = 0;
    unsigned long long out = 0;
    try {
        out = std::stoull(value, &used);
    } catch (const std::exception&) {
        parse_fail(origin, line,
                   key + " expects an unsigned integer, got '" + value + "'");
    }
    if (used != value.size()) {
        parse_fail(origin, line,
                   key + " expects an unsigned integer, got '" + value + "'");
    }
    return out;
}

bool parse_flag(const std::string& origin, int line, const std::string& key,
                const std::string& value) {
    if (value == "on" || value == "true" || value == "yes" || value == "1") {
        return true;
    }
    if (value == "off" || value == "false" || value == "no" || value == "0") {
        return false;
    }
    parse_fail(origin, line, key + " expects on/off, got '" + value + "'");
}

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-' ||
                        c == '.';
        if (!ok) return false;
    }
    return true;
}

// Partially parsed config block; mode-dependent keys stay optional so
// misplaced ones can be rejected once the mode is known.
struct ConfigBlock {
    int line = 0;
    std::string name;
    std::optional<RunConfigSpec::Mode> mode;
    std::optional<int> reasoning_steps;
    std::optional<int> reasoning_frames;
    std::optional<bool> rpfi;
};

RunConfigSpec finish_config_block(const std::string& origin,
                                  const ConfigBlock& block) {
    RunConfigSpec spec;
    if (block.name.empty()) {
        parse_fail(origin, block.line, "config block is missing a name");
    }
    spec.name = block.name;
    spec.mode = block.mode.value_or(RunConfigSpec::Mode::Adaptive);
    if (spec.mode == RunConfigSpec::Mode::Baseline) {
        if (block.rpfi.has_value()) {
            parse_fail(origin, block.line,
                       "rpfi only applies to adaptive configs (config '" +
                           spec.name + "')");
        }
        spec.reasoning_steps = block.reasoning_steps.value_or(10);
        spec.reasoning_frames = block.reasoning_frames.value_or(8);
    } else {
        if (block.reasoning_steps.has_value() ||
            block.reasoning_frames.has_value()) {
            parse_fail(origin, block.line,
                       "reasoning_steps/reasoning_frames only apply to "
                       "baseline configs (config '" +
                           spec.name + "')");
        }
        spec.rpfi = block.rpfi.value_or(false);
    }
    return spec;
}

ReportRow run_one(const SuiteConfig& cfg, const KeywordPredictor& predictor,
                  int scenario_index, int config_index) {
    const ScenarioEntry& entry =
        cfg.scenarios[static_cast<std::size_t>(scenario_index)];
    const RunConfigSpec& rc =
        cfg.configs[static_cast<std::size_t>(config_index)];

    ReportRow row;
    row.scenario = entry.name;
    row.bucket = entry.spec.expected_complexity;
    row.config = rc.name;
    try {
        const std::uint64_t scenario_seed =
            suite_scenario_seed(cfg, scenario_index);
        Scenario scenario = make_scenario(entry.spec, scenario_seed);

        AttentionParams attention;
        attention.signal = cfg.attention_signal;
        attention.noise_level = cfg.attention_noise;
        attention.layer = cfg.srm.layer;
        OracleBackbone backbone(std::move(scenario), attention,
                                suite_attention_seed(scenario_seed));

        EditResult result = [&] {
            if (rc.mode == RunConfigSpec::Mode::Baseline) {
                BaselineOptions options;
                options.total_steps = cfg.total_steps;
                options.reasoning_steps = rc.reasoning_steps;
                options.reasoning_frames = rc.reasoning_frames;
                options.t_max = cfg.t_max;
                options.t_min = cfg.t_min;
                options.seed = scenario_seed;
                return run_baseline(backbone, backbone.scenario().reference,
                                    backbone.scenario().instruction, options);
            }
            EditOptions options;
            options.srm = cfg.srm;
            options.rpfi.enabled = rc.rpfi;
            options.rpfi.beta = cfg.beta;
            options.total_steps = cfg.total_steps;
            options.t_max = cfg.t_max;
            options.t_min = cfg.t_min;
            options.seed = scenario_seed;
            return run_edit(backbone, backbone.scenario().reference,
                            backbone.scenario().instruction, predictor,
                            options);
        }();

        row.metrics = evaluate_edit(result, backbone.scenario());
        if (result.complexity.has_value()) {
            row.predicted = result.complexity->top_level();
        }
    } catch (const std::exception& e) {
        row.error = e.what();
    } catch (...) {
        row.error = "unknown failure";
    }
    return row;
}

int level_index(ComplexityLevel level) {
    switch (level) {
        case ComplexityLevel::Low: return 0;
        case ComplexityLevel::Medium: return 1;
        case ComplexityLevel::High: return 2;
    }
    return 1;
}

constexpr ComplexityLevel kLevels[3] = {
    ComplexityLevel::Low, ComplexityLevel::Medium, ComplexityLevel::High};

}  // namespace

std::uint64_t suite_scenario_seed(const SuiteConfig& config,
                                  int scenario_index) {
    if (scenario_index < 0 ||
        scenario_index >= static_cast<int>(config.scenarios.size())) {
        throw IndexError("scenario index " + std::to_string(scenario_index) +
                         " outside the suite");
    }
    // Keyed by name, not position: a scenario keeps its seed when the suite
    // is reordered or subset (names are unique by validation).
    return kernels::derive_stream(
        config.seed,
        fnv1a64(config.scenarios[static_cast<std::size_t>(scenario_index)].name));
}

std::uint64_t suite_attention_seed(std::uint64_t scenario_seed) {
    return kernels::derive_stream(scenario_seed, kAttentionSeedTag);
}

void SuiteConfig::validate() const {
    if (configs.empty()) {
        throw ConfigError("suite needs at least one config block");
    }
    if (scenarios.empty()) {
        throw ConfigError("suite needs at least one scenario block");
    }
    if (total_steps < 1) {
        throw ConfigError("total_steps must be >= 1, got " +
                          std::to_string(total_steps));
    }
    if (!(t_max > t_min)) {
        throw ConfigError("t_max must exceed t_min");
    }
    srm.validate();
    if (!(beta > 1.0)) {
        throw ConfigError("beta must be > 1, got " + std::to_string(beta));
    }
    for (double w : {weight_low, weight_medium, weight_high}) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ConfigError("bucket weights must be non-negative");
        }
    }
    if (attention_signal < 0.0 || attention_noise < 0.0) {
        throw ConfigError("attention signal/noise levels must be >= 0");
    }

    std::set<std::string> config_names;
    for (const RunConfigSpec& rc : configs) {
        if (!valid_name(rc.name)) {
            throw ConfigError("invalid config name '" + rc.name +
                              "' (use letters, digits, '_', '-', '.')");
        }
        if (!config_names.insert(rc.name).second) {
            throw ConfigError("duplicate config name '" + rc.name + "'");
        }
        if (rc.mode == RunConfigSpec::Mode::Baseline) {
            if (rc.reasoning_steps < 0 || rc.reasoning_steps > total_steps) {
                throw ConfigError("config '" + rc.name +
                                  "': reasoning_steps outside [0, " +
                                  std::to_string(total_steps) + "]");
            }
            if (rc.reasoning_frames < 1) {
                throw ConfigError("config '" + rc.name +
                                  "': reasoning_frames must be >= 1");
            }
        }
    }

    std::set<std::string> scenario_names;
    for (const ScenarioEntry& entry : scenarios) {
        if (!valid_name(entry.name)) {
            throw ConfigError("invalid scenario name '" + entry.name +
                              "' (use letters, digits, '_', '-', '.')");
        }
        if (!scenario_names.insert(entry.name).second) {
            throw ConfigError("duplicate scenario name '" + entry.name + "'");
        }
        const ScenarioSpec& s = entry.spec;
        if (s.channels < 1 || s.height < 1 || s.width < 1) {
            throw ConfigError("scenario '" + entry.name +
                              "': grid dimensions must be positive");
        }
        if (s.trajectory_frames < 2) {
            throw ConfigError("scenario '" + entry.name +
                              "': trajectory_frames must be >= 2");
        }
        if (!std::isfinite(s.magnitude)) {
            throw ConfigError("scenario '" + entry.name +
                              "': magnitude must be finite");
        }
        if (s.instruction.empty()) {
            throw ConfigError("scenario '" + entry.name +
                              "' is missing an instruction");
        }
        if (s.kind != EditKind::GlobalShift) {
            if (s.region_h < 1 || s.region_w < 1 || s.region_y0 < 0 ||
                s.region_x0 < 0 || s.region_y0 + s.region_h > s.height ||
                s.region_x0 + s.region_w > s.width) {
                throw ConfigError("scenario '" + entry.name +
                                  "': region falls outside the grid");
            }
        }
    }
}

SuiteConfig parse_config(std::istream& in, const std::string& origin) {
    SuiteConfig cfg;
    enum class Section { Top, Scenario, Config };
    Section section = Section::Top;
    ScenarioEntry scenario;
    ConfigBlock config_block;
    int block_line = 0;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line == "scenario {" || line == "config {") {
            if (section != Section::Top) {
                parse_fail(origin, line_no, "blocks cannot be nested");
            }
            if (line[0] == 's') {
                section = Section::Scenario;
                scenario = ScenarioEntry{};
            } else {
                section = Section::Config;
                config_block = ConfigBlock{};
                config_block.line = line_no;
            }
            block_line = line_no;
            continue;
        }
        if (line == "}") {
            if (section == Section::Top) {
                parse_fail(origin, line_no, "'}' without an open block");
            }
            if (section == Section::Scenario) {
                if (scenario.name.empty()) {
                    parse_fail(origin, block_line,
                               "scenario block is missing a name");
                }
                cfg.scenarios.push_back(std::move(scenario));
            } else {
                cfg.configs.push_back(finish_config_block(origin, config_block));
            }
            section = Section::Top;
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            parse_fail(origin, line_no, "expected key = value, got '" + line +
                                            "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) parse_fail(origin, line_no, "empty key");
        if (value.empty()) {
            parse_fail(origin, line_no, "key '" + key + "' has no value");
        }

        if (section == Section::Top) {
            if (key == "seed") {
                cfg.seed = parse_u64(origin, line_no, key, value);
            } else if (key == "total_steps") {
                cfg.total_steps =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "t_max") {
                cfg.t_max = parse_real(origin, line_no, key, value);
            } else if (key == "t_min") {
                cfg.t_min = parse_real(origin, line_no, key, value);
            } else if (key == "tau") {
                cfg.srm.tau = parse_real(origin, line_no, key, value);
            } else if (key == "kernel") {
                cfg.srm.kernel =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "layer") {
                cfg.srm.layer =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "beta") {
                cfg.beta = parse_real(origin, line_no, key, value);
            } else if (key == "lexicon") {
                cfg.lexicon_path = value;
            } else if (key == "weight_low") {
                cfg.weight_low = parse_real(origin, line_no, key, value);
            } else if (key == "weight_medium") {
                cfg.weight_medium = parse_real(origin, line_no, key, value);
            } else if (key == "weight_high") {
                cfg.weight_high = parse_real(origin, line_no, key, value);
            } else if (key == "attention_signal") {
                cfg.attention_signal = parse_real(origin, line_no, key, value);
            } else if (key == "attention_noise") {
                cfg.attention_noise = parse_real(origin, line_no, key, value);
            } else {
                parse_fail(origin, line_no, "unknown key '" + key + "'");
            }
        } else if (section == Section::Scenario) {
            ScenarioSpec& s = scenario.spec;
            if (key == "name") {
                scenario.name = value;
            } else if (key == "kind") {
                try {
                    s.kind = parse_edit_kind(value);
                } catch (const ParseError& e) {
                    parse_fail(origin, line_no, e.what());
                }
            } else if (key == "channels") {
                s.channels =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "height") {
                s.height =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "width") {
                s.width =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "region_y0") {
                s.region_y0 =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "region_x0") {
                s.region_x0 =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "region_h") {
                s.region_h =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "region_w") {
                s.region_w =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "magnitude") {
                s.magnitude = parse_real(origin, line_no, key, value);
            } else if (key == "trajectory_frames") {
                s.trajectory_frames =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "instruction") {
                s.instruction = value;
            } else if (key == "expected") {
                try {
                    s.expected_complexity = parse_level(value);
                } catch (const ParseError& e) {
                    parse_fail(origin, line_no, e.what());
                }
            } else {
                parse_fail(origin, line_no,
                           "unknown scenario key '" + key + "'");
            }
        } else {
            if (key == "name") {
                config_block.name = value;
            } else if (key == "mode") {
                if (value == "baseline") {
                    config_block.mode = RunConfigSpec::Mode::Baseline;
                } else if (value == "adaptive") {
                    config_block.mode = RunConfigSpec::Mode::Adaptive;
                } else {
                    parse_fail(origin, line_no,
                               "mode expects baseline or adaptive, got '" +
                                   value + "'");
                }
            } else if (key == "reasoning_steps") {
                config_block.reasoning_steps =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "reasoning_frames") {
                config_block.reasoning_frames =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "rpfi") {
                config_block.rpfi = parse_flag(origin, line_no, key, value);
            } else {
                parse_fail(origin, line_no, "unknown config key '" + key + "'");
            }
        }
    }
    if (section != Section::Top) {
        parse_fail(origin, block_line, "unterminated block");
    }
    cfg.validate();
    return cfg;
}

SuiteConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file '" + path + "'");
    }
    return parse_config(in, path);
}

double mask_iou(const SpatialMask& mask, const SpatialMap& region) {
    mask.require_same_shape(region, "mask_iou");
    long long intersection = 0;
    long long uni = 0;
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        const bool a = mask.values[i] > 0.5;
        const bool b = region.values[i] != 0.0;
        intersection += (a && b) ? 1 : 0;
        uni += (a || b) ? 1 : 0;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(intersection) / static_cast<double>(uni);
}

Metrics evaluate_edit(const EditResult& result, const Scenario& scenario) {
    const LatentFrame& final_frame = result.final_frame;
    final_frame.require_same_shape(scenario.reference, "evaluate_edit");
    const LatentFrame& target = scenario.final_target();
    const SpatialMap& region = scenario.gt_region;
    if (region.height != final_frame.height ||
        region.width != final_frame.width) {
        throw DimensionError("evaluate_edit: region does not match the frame");
    }

    double edit_sum = 0.0;
    double preserve_sum = 0.0;
    std::size_t edit_n = 0;
    std::size_t preserve_n = 0;
    for (int c = 0; c < final_frame.channels; ++c) {
        for (int y = 0; y < final_frame.height; ++y) {
            for (int x = 0; x < final_frame.width; ++x) {
                if (region.at(y, x) != 0.0) {
                    const double d = final_frame.at(c, y, x) - target.at(c, y, x);
                    edit_sum += d * d;
                    ++edit_n;
                } else {
                    const double d =
                        final_frame.at(c, y, x) - scenario.reference.at(c, y, x);
                    preserve_sum += d * d;
                    ++preserve_n;
                }
            }
        }
    }

    Metrics metrics;
    metrics.edit_mse = edit_n ? edit_sum / static_cast<double>(edit_n) : 0.0;
    metrics.preserve_mse =
        preserve_n ? preserve_sum / static_cast<double>(preserve_n) : 0.0;
    metrics.mask_iou = mask_iou(result.mask_used, region);
    metrics.frame_steps = result.cost.total();
    return metrics;
}

Report run_suite(const SuiteConfig& config, int jobs) {
    config.validate();
    if (jobs < 1) {
        throw ConfigError("jobs must be >= 1, got " + std::to_string(jobs));
    }

    Lexicon lexicon = config.lexicon_path.empty()
                          ? Lexicon::builtin()
                          : Lexicon::from_file(config.lexicon_path);
    const KeywordPredictor predictor(std::move(lexicon));

    const int n_scenarios = static_cast<int>(config.scenarios.size());
    const int n_configs = static_cast<int>(config.configs.size());
    const int n_rows = n_scenarios * n_configs;

    Report report;
    report.rows.resize(static_cast<std::size_t>(n_rows));

    // Rows land at their declaration-order index, so the report is identical
    // for any job count or schedule.
#pragma omp parallel for if (jobs > 1) num_threads(jobs) schedule(dynamic)
    for (int j = 0; j < n_rows; ++j) {
        report.rows[static_cast<std::size_t>(j)] =
            run_one(config, predictor, j / n_configs, j % n_configs);
    }

    for (const ReportRow& row : report.rows) {
        if (!row.error.empty()) ++report.failed_rows;
    }

    for (const RunConfigSpec& rc : config.configs) {
        if (rc.mode == RunConfigSpec::Mode::Baseline) {
            report.baseline_config = rc.name;
            break;
        }
    }

    const double weights[3] = {config.weight_low, config.weight_medium,
                               config.weight_high};

    // Per (config, bucket) means over successful rows.
    struct Accum {
        int count = 0;
        double edit = 0.0, preserve = 0.0, iou = 0.0, steps = 0.0;
    };
    std::vector<Accum> bucket_accums(static_cast<std::size_t>(n_configs) * 3);
    std::vector<Accum> config_accums(static_cast<std::size_t>(n_configs));
    for (int j = 0; j < n_rows; ++j) {
        const ReportRow& row = report.rows[static_cast<std::size_t>(j)];
        if (!row.error.empty()) continue;
        const int ci = j % n_configs;
        Accum& bucket =
            bucket_accums[static_cast<std::size_t>(ci) * 3 +
                          static_cast<std::size_t>(level_index(row.bucket))];
        Accum& total = config_accums[static_cast<std::size_t>(ci)];
        for (Accum* a : {&bucket, &total}) {
            a->count += 1;
            a->edit += row.metrics.edit_mse;
            a->preserve += row.metrics.preserve_mse;
            a->iou += row.metrics.mask_iou;
            a->steps += row.metrics.frame_steps;
        }
    }

    // Bucket aggregates plus per-config weighted means.
    const int baseline_ci = [&] {
        for (int ci = 0; ci < n_configs; ++ci) {
            if (config.configs[static_cast<std::size_t>(ci)].name ==
                report.baseline_config) {
                return ci;
            }
        }
        return -1;
    }();

    auto bucket_mean_steps = [&](int ci, int level) -> double {
        const Accum& a = bucket_accums[static_cast<std::size_t>(ci) * 3 +
                                       static_cast<std::size_t>(level)];
        return a.count > 0 ? a.steps / a.count : 0.0;
    };
    auto weighted_mean_steps = [&](int ci) -> double {
        double num = 0.0, den = 0.0;
        for (int level = 0; level < 3; ++level) {
            const Accum& a = bucket_accums[static_cast<std::size_t>(ci) * 3 +
                                           static_cast<std::size_t>(level)];
            if (a.count == 0) continue;
            num += weights[level] * (a.steps / a.count);
            den += weights[level];
        }
        return den > 0.0 ? num / den : 0.0;
    };

    for (int ci = 0; ci < n_configs; ++ci) {
        const std::string& name =
            config.configs[static_cast<std::size_t>(ci)].name;
        for (int level = 0; level < 3; ++level) {
            const Accum& a = bucket_accums[static_cast<std::size_t>(ci) * 3 +
                                           static_cast<std::size_t>(level)];
            if (a.count == 0) continue;
            BucketAggregate agg;
            agg.config = name;
            agg.bucket = kLevels[level];
            agg.count = a.count;
            agg.mean_edit_mse = a.edit / a.count;
            agg.mean_preserve_mse = a.preserve / a.count;
            agg.mean_mask_iou = a.iou / a.count;
            agg.mean_frame_steps = a.steps / a.count;
            if (baseline_ci >= 0) {
                const double base = bucket_mean_steps(baseline_ci, level);
                agg.speedup_vs_baseline =
                    agg.mean_frame_steps > 0.0 ? base / agg.mean_frame_steps
                                               : 0.0;
            }
            report.buckets.push_back(std::move(agg));
        }

        const Accum& total = config_accums[static_cast<std::size_t>(ci)];
        ConfigAggregate agg;
        agg.config = name;
        agg.count = total.count;
        if (total.count > 0) {
            agg.mean_edit_mse = total.edit / total.count;
            agg.mean_preserve_mse = total.preserve / total.count;
            agg.mean_mask_iou = total.iou / total.count;
            agg.mean_frame_steps = total.steps / total.count;
        }
        agg.weighted_mean_frame_steps = weighted_mean_steps(ci);
        if (baseline_ci >= 0 && total.count > 0) {
            const Accum& base =
                config_accums[static_cast<std::size_t>(baseline_ci)];
            if (base.count > 0 && agg.mean_frame_steps > 0.0) {
                agg.speedup_vs_baseline =
                    (base.steps / base.count) / agg.mean_frame_steps;
            }
            const double base_weighted = weighted_mean_steps(baseline_ci);
            if (agg.weighted_mean_frame_steps > 0.0) {
                agg.weighted_speedup_vs_baseline =
                    base_weighted / agg.weighted_mean_frame_steps;
            }
        }
        report.configs.push_back(std::move(agg));
    }

    // Classification confusion for the configs that predict.
    for (int ci = 0; ci < n_configs; ++ci) {
        const RunConfigSpec& rc = config.configs[static_cast<std::size_t>(ci)];
        if (rc.mode != RunConfigSpec::Mode::Adaptive) continue;
        ConfusionEntry entry;
        entry.config = rc.name;
        bool any = false;
        for (int j = ci; j < n_rows; j += n_configs) {
            const ReportRow& row = report.rows[static_cast<std::size_t>(j)];
            if (!row.error.empty() || !row.predicted.has_value()) continue;
            entry.counts[level_index(row.bucket)][level_index(*row.predicted)] +=
                1;
            any = true;
        }
        if (any) report.confusion.push_back(std::move(entry));
    }

    return report;
}

}  // namespace physedit
