#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "physedit/card.hpp"
#include "physedit/errors.hpp"
#include "physedit/sampler.hpp"
#include "physedit/srm.hpp"
#include "physedit/toy_backbone.hpp"

namespace physedit {

/// One configuration to run over every scenario.
struct RunConfigSpec {
    enum class Mode { Baseline, Adaptive };

    std::string name;
    Mode mode = Mode::Adaptive;
    // Baseline mode: fixed allocation.
    int reasoning_steps = 10;
    int reasoning_frames = 8;
    // Adaptive mode: optional injection on top of the adaptive path.
    bool rpfi = false;
};

struct ScenarioEntry {
    std::string name;
    ScenarioSpec spec;
};

/// Parsed suite description: global parameters, configurations, scenarios.
struct SuiteConfig {
    std::uint64_t seed = 0;
    int total_steps = 30;
    double t_max = 1.0;
    double t_min = 0.0;
    SrmParams srm;          // tau = 0.1, kernel = 5
    double beta = 1.5;      // injection relaxation factor
    std::string lexicon_path;  // empty -> compiled-in lexicon
    // Bucket weights for the weighted aggregates; non-negative.
    double weight_low = 1.0;
    double weight_medium = 1.0;
    double weight_high = 1.0;
    // Synthetic attention shape used by the oracle backbone.
    double attention_signal = 4.0;
    double attention_noise = 0.0;

    std::vector<RunConfigSpec> configs;
    std::vector<ScenarioEntry> scenarios;

    /// Throws ConfigError unless there is at least one scenario and one
    /// configuration, weights are non-negative, and names are unique.
    void validate() const;
};

/// Parses the key = value / block config format; `origin` labels error
/// messages (usually the file path). Unknown keys fail fast with the line
/// number.
SuiteConfig parse_config(std::istream& in, const std::string& origin);
SuiteConfig load_config(const std::string& path);

/// Per-scenario seed the suite derives from the global seed and the
/// scenario's name; shared so single-scenario tools reproduce suite rows
/// exactly.
std::uint64_t suite_scenario_seed(const SuiteConfig& config,
                                  int scenario_index);
/// Seed for the synthetic attention noise of one scenario run.
std::uint64_t suite_attention_seed(std::uint64_t scenario_seed);

/// Desk-scale quality proxies for one edit.
struct Metrics {
    double edit_mse = 0.0;      // MSE vs. target inside gt_region
    double preserve_mse = 0.0;  // MSE vs. reference outside gt_region
    double mask_iou = 0.0;      // IoU of {mask > 0.5} vs. gt_region
    int frame_steps = 0;        // ledger total
};

/// IoU of the binarized mask {value > 0.5} against the binary region map;
/// an empty union counts as perfect agreement (1.0).
double mask_iou(const SpatialMask& mask, const SpatialMap& region);

Metrics evaluate_edit(const EditResult& result, const Scenario& scenario);

struct ReportRow {
    std::string scenario;
    ComplexityLevel bucket = ComplexityLevel::Medium;  // expected label
    std::string config;
    Metrics metrics;
    std::string error;  // empty on success
    std::optional<ComplexityLevel> predicted;  // adaptive configs only
};

struct BucketAggregate {
    std::string config;
    ComplexityLevel bucket = ComplexityLevel::Medium;
    int count = 0;  // successful rows only
    double mean_edit_mse = 0.0;
    double mean_preserve_mse = 0.0;
    double mean_mask_iou = 0.0;
    double mean_frame_steps = 0.0;
    double speedup_vs_baseline = 0.0;  // 0 when no baseline configuration ran
};

struct ConfigAggregate {
    std::string config;
    int count = 0;
    double mean_edit_mse = 0.0;
    double mean_preserve_mse = 0.0;
    double mean_mask_iou = 0.0;
    double mean_frame_steps = 0.0;
    double weighted_mean_frame_steps = 0.0;  // bucket-weighted mean of bucket means
    double speedup_vs_baseline = 0.0;
    double weighted_speedup_vs_baseline = 0.0;
};

/// expected -> predicted counts for one configuration.
struct ConfusionEntry {
    std::string config;
    int counts[3][3] = {};  // [expected][predicted], order low/medium/high
};

struct Report {
    std::vector<ReportRow> rows;             // scenario-major declaration order
    std::vector<BucketAggregate> buckets;    // config order, then low/medium/high
    std::vector<ConfigAggregate> configs;    // declaration order
    std::vector<ConfusionEntry> confusion;   // adaptive configs, declaration order
    std::string baseline_config;             // speedup reference ("" if none)
    int failed_rows = 0;
};

/// Runs every (scenario x configuration) pair. Individual run failures are
/// recorded on their row and the suite continues. `jobs` > 1 runs scenarios
/// on a worker pool; rows are merged in declaration order either way, so the
/// report is identical for any job count.
Report run_suite(const SuiteConfig& config, int jobs = 1);

/// Fixed-schema row table: header
/// scenario,bucket,config,edit_mse,preserve_mse,mask_iou,frame_steps
/// Failed rows carry nan metrics and 0 frame-steps.
void write_csv(const Report& report, std::ostream& out);
/// Full report (rows, aggregates, confusion) as minified-stable JSON:
/// alphabetically ordered keys, 9-significant-digit reals.
void write_json(const Report& report, std::ostream& out);
/// format is "csv" or "json"; throws ConfigError otherwise, IoError when the
/// path cannot be written.
void emit_report(const Report& report, const std::string& format,
                 const std::string& path);

}  // namespace physedit
