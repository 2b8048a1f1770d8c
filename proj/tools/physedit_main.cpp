#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "physedit/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRun = 2;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string lexicon;
    std::string out = "-";
    std::string format = "csv";
    bool rpfi = false;
    std::optional<double> rpfi_beta;
    std::optional<int> baseline_nr;
    std::optional<int> baseline_r;
    int jobs = 1;
    std::string scenario_name;
    std::string instruction;
};

physedit::SuiteConfig load_suite(const CommonFlags& flags) {
    physedit::SuiteConfig cfg = physedit::load_config(flags.config_path);
    if (flags.seed) cfg.seed = *flags.seed;
    if (!flags.lexicon.empty()) cfg.lexicon_path = flags.lexicon;
    if (flags.rpfi_beta) cfg.beta = *flags.rpfi_beta;
    if (flags.rpfi) {
        for (physedit::RunConfigSpec& rc : cfg.configs) {
            if (rc.mode == physedit::RunConfigSpec::Mode::Adaptive) {
                rc.rpfi = true;
            }
        }
    }
    if (flags.baseline_nr || flags.baseline_r) {
        for (physedit::RunConfigSpec& rc : cfg.configs) {
            if (rc.mode == physedit::RunConfigSpec::Mode::Baseline) {
                if (flags.baseline_nr) rc.reasoning_steps = *flags.baseline_nr;
                if (flags.baseline_r) rc.reasoning_frames = *flags.baseline_r;
            }
        }
    }
    cfg.validate();
    return cfg;
}

void write_report(const physedit::Report& report, const CommonFlags& flags) {
    if (flags.format != "csv" && flags.format != "json") {
        throw physedit::ConfigError("unknown report format '" + flags.format +
                                    "' (expected csv or json)");
    }
    if (flags.out == "-") {
        if (flags.format == "csv") {
            physedit::write_csv(report, std::cout);
        } else {
            physedit::write_json(report, std::cout);
        }
        return;
    }
    physedit::emit_report(report, flags.format, flags.out);
}

const physedit::ScenarioEntry& pick_scenario(const physedit::SuiteConfig& cfg,
                                             const std::string& name) {
    if (name.empty()) return cfg.scenarios.front();
    for (const physedit::ScenarioEntry& entry : cfg.scenarios) {
        if (entry.name == name) return entry;
    }
    throw physedit::ConfigError("no scenario named '" + name +
                                "' in the config");
}

physedit::Lexicon pick_lexicon(const std::string& path) {
    return path.empty() ? physedit::Lexicon::builtin()
                        : physedit::Lexicon::from_file(path);
}

int cmd_run(const CommonFlags& flags) {
    const physedit::SuiteConfig cfg = load_suite(flags);
    const physedit::Report report = physedit::run_suite(cfg, flags.jobs);
    write_report(report, flags);
    if (report.failed_rows > 0) {
        std::cerr << report.failed_rows << " run(s) failed; see the report\n";
        return kExitRun;
    }
    return kExitOk;
}

int cmd_edit(const CommonFlags& flags) {
    physedit::SuiteConfig cfg = load_suite(flags);
    const physedit::ScenarioEntry& entry =
        pick_scenario(cfg, flags.scenario_name);

    // Single-scenario suite. Per-scenario seeds derive from the scenario
    // name, so this run reproduces the corresponding full-suite row exactly.
    physedit::SuiteConfig one = cfg;
    one.scenarios = {entry};
    if (flags.baseline_nr) {
        physedit::RunConfigSpec baseline;
        baseline.name = "baseline";
        baseline.mode = physedit::RunConfigSpec::Mode::Baseline;
        baseline.reasoning_steps = *flags.baseline_nr;
        baseline.reasoning_frames = flags.baseline_r.value_or(8);
        one.configs = {baseline};
    } else {
        physedit::RunConfigSpec adaptive;
        adaptive.name = flags.rpfi ? "adaptive-rpfi" : "adaptive";
        adaptive.mode = physedit::RunConfigSpec::Mode::Adaptive;
        adaptive.rpfi = flags.rpfi;
        one.configs = {adaptive};
    }
    one.validate();

    const physedit::Report report = physedit::run_suite(one, 1);
    write_report(report, flags);
    if (report.failed_rows > 0) {
        std::cerr << "run failed: " << report.rows.front().error << '\n';
        return kExitRun;
    }
    return kExitOk;
}

int cmd_mask(const CommonFlags& flags) {
    const physedit::SuiteConfig cfg = load_suite(flags);
    const physedit::ScenarioEntry& entry =
        pick_scenario(cfg, flags.scenario_name);

    const int index = [&] {
        for (std::size_t i = 0; i < cfg.scenarios.size(); ++i) {
            if (cfg.scenarios[i].name == entry.name) return static_cast<int>(i);
        }
        return 0;
    }();
    // Same derivations as run_suite, so the printed mask is the suite's mask.
    const std::uint64_t scenario_seed = physedit::suite_scenario_seed(cfg, index);

    physedit::Scenario scenario =
        physedit::make_scenario(entry.spec, scenario_seed);
    physedit::AttentionParams attention;
    attention.signal = cfg.attention_signal;
    attention.noise_level = cfg.attention_noise;
    attention.layer = cfg.srm.layer;
    physedit::OracleBackbone backbone(
        std::move(scenario), attention,
        physedit::suite_attention_seed(scenario_seed));

    physedit::NoiseSource root(scenario_seed);
    physedit::NoiseSource pilot_noise = root.fork(physedit::kPilotNoiseTag);
    const physedit::PilotResult pilot = physedit::compute_srm(
        backbone, backbone.scenario().instruction,
        backbone.scenario().reference, /*reasoning_frames=*/1, cfg.t_max,
        cfg.srm, pilot_noise);

    std::cout << "scenario " << entry.name << '\n';
    std::cout << "coverage " << physedit::mask_coverage(pilot.mask) << '\n';
    std::cout << "iou "
              << physedit::mask_iou(pilot.mask, backbone.scenario().gt_region)
              << '\n';
    std::cout << "pilot_frame_steps " << pilot.pilot_frame_steps << '\n';
    return kExitOk;
}

int cmd_classify(const CommonFlags& flags) {
    const physedit::Lexicon lexicon = pick_lexicon(flags.lexicon);
    const physedit::ComplexityDistribution dist =
        physedit::classify_instruction(flags.instruction, lexicon);
    const physedit::Allocation alloc =
        physedit::allocate(dist, physedit::ComplexityLevels{});
    std::cout << "complexity " << physedit::level_name(dist.top_level()) << '\n';
    std::cout << "reasoning_steps " << alloc.reasoning_steps << '\n';
    std::cout << "reasoning_frames " << alloc.reasoning_frames << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "physedit: adaptive spatio-temporal denoising scheduler benchmark"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        CLI::Option* cfg =
            cmd->add_option("--config", flags.config_path, "suite config file");
        if (needs_config) cfg->required();
        cmd->add_option("--seed", flags.seed, "override the config seed");
        cmd->add_option("--lexicon", flags.lexicon,
                        "keyword lexicon file (default: compiled-in)");
    };

    CLI::App* run = app.add_subcommand("run", "run a full suite");
    add_common(run, true);
    run->add_option("--out", flags.out, "report path ('-' for stdout)");
    run->add_option("--format", flags.format, "report format: csv or json");
    run->add_flag("--rpfi", flags.rpfi, "enable injection on adaptive configs");
    run->add_option("--rpfi-beta", flags.rpfi_beta, "injection relaxation beta");
    run->add_option("--baseline-nr", flags.baseline_nr,
                    "override baseline reasoning steps");
    run->add_option("--baseline-r", flags.baseline_r,
                    "override baseline reasoning frames");
    run->add_option("--jobs", flags.jobs, "parallel scenario workers");

    CLI::App* edit = app.add_subcommand("edit", "run a single scenario");
    add_common(edit, true);
    edit->add_option("--scenario", flags.scenario_name,
                     "scenario name (default: first in config)");
    edit->add_option("--out", flags.out, "report path ('-' for stdout)");
    edit->add_option("--format", flags.format, "report format: csv or json");
    edit->add_flag("--rpfi", flags.rpfi, "enable injection");
    edit->add_option("--rpfi-beta", flags.rpfi_beta, "injection relaxation beta");
    edit->add_option("--baseline-nr", flags.baseline_nr,
                     "run the baseline path with this many reasoning steps");
    edit->add_option("--baseline-r", flags.baseline_r,
                     "baseline reasoning frames");

    CLI::App* mask = app.add_subcommand("mask", "compute only the SRM mask");
    add_common(mask, true);
    mask->add_option("--scenario", flags.scenario_name,
                     "scenario name (default: first in config)");

    CLI::App* classify =
        app.add_subcommand("classify", "classify an instruction");
    classify->add_option("instruction", flags.instruction, "instruction text")
        ->required();
    classify->add_option("--lexicon", flags.lexicon,
                         "keyword lexicon file (default: compiled-in)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(flags);
        if (edit->parsed()) return cmd_edit(flags);
        if (mask->parsed()) return cmd_mask(flags);
        if (classify->parsed()) return cmd_classify(flags);
    } catch (const physedit::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const physedit::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const physedit::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const physedit::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRun;
    }
    return kExitOk;
}
