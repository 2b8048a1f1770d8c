#include "physedit/sampler.hpp"

#include <string>
#include <utility>

#include "physedit/kernels.hpp"

namespace physedit {
namespace {

struct CoreInputs {
    ReasoningConfig config;
    SpatialMask mask;
    RpfiParams rpfi;
    std::uint64_t seed = 0;
    bool keep_trace = false;
    int pilot_frame_steps = 0;
    std::optional<ComplexityDistribution> complexity;
    std::vector<std::string> warnings;
};

void require_velocity_shape(const VelocityStack& v, const LatentStack& z) {
    v.require_same_shape(z, "backbone velocity");
    for (const LatentFrame& frame : v.frames) {
        frame.require_finite("backbone velocity");
    }
}

/// Shared two-stage loop behind run_edit and run_baseline.
EditResult run_core(const Backbone& backbone, const LatentFrame& ref,
                    const std::string& instruction, CoreInputs in) {
    ref.require_finite("run: reference");
    in.rpfi.validate();
    if (in.mask.height != ref.height || in.mask.width != ref.width) {
        throw DimensionError("run: mask is " + std::to_string(in.mask.height) +
                             "x" + std::to_string(in.mask.width) +
                             " but the reference is " +
                             std::to_string(ref.height) + "x" +
                             std::to_string(ref.width));
    }

    const int n_r = in.config.reasoning_steps;
    const int r = in.config.reasoning_frames;
    const int n_total = in.config.total_steps;
    const TimeSchedule& times = in.config.schedule;

    NoiseSource source(in.seed);
    LatentStack eps =
        sample_noise(source, r + 1, ref.channels, ref.height, ref.width);

    LatentStack z_full;
    z_full.frames.reserve(static_cast<std::size_t>(r) + 2);
    z_full.frames.push_back(ref);
    for (LatentFrame& frame : eps.frames) z_full.frames.push_back(frame);

    ReferenceNoiseCache cache;
    if (in.rpfi.enabled) {
        cache.clean_reference = ref;
        cache.eps_ref = eps;
    }

    EditTrace trace;
    if (in.keep_trace) {
        trace.init_noise = eps;
        trace.stacks.reserve(static_cast<std::size_t>(n_total));
    }

    CostLedger cost;
    cost.pilot_frame_steps = in.pilot_frame_steps;
    cost.stage1_stack_frames = r + 2;
    cost.stage1_noise_frames = r + 1;

    // Stage 1: joint steps over conditioning + reasoning + output frames.
    for (int n = 0; n < n_r; ++n) {
        const double t = times[n];
        const double t_next = times[n + 1];
        const VelocityStack v =
            backbone.evaluate(z_full, t, instruction, ref, nullptr);
        require_velocity_shape(v, z_full);
        z_full = euler_step(z_full, v, t, t_next);
        z_full.frames[0] = ref;  // conditioning frame stays clean
        if (in.rpfi.enabled) {
            const SpatialMask mask_n = relaxed_mask(in.mask, n, n_r, in.rpfi.beta);
            z_full = inject(z_full, cache, mask_n, t_next);
        }
        cost.stage1_frame_steps += z_full.frame_count();
        if (in.keep_trace) trace.stacks.push_back(z_full);
    }

    // Transition: drop the reasoning frames, keep conditioning + output.
    LatentStack z_pair;
    z_pair.frames.reserve(2);
    z_pair.frames.push_back(ref);
    z_pair.frames.push_back(std::move(z_full.frames.back()));

    // Stage 2: finish the remaining steps on the 2-frame stack.
    for (int n = n_r; n < n_total; ++n) {
        const double t = times[n];
        const double t_next = times[n + 1];
        const VelocityStack v =
            backbone.evaluate(z_pair, t, instruction, ref, nullptr);
        require_velocity_shape(v, z_pair);
        z_pair = euler_step(z_pair, v, t, t_next);
        z_pair.frames[0] = ref;
        cost.stage2_frame_steps += z_pair.frame_count();
        if (in.keep_trace) trace.stacks.push_back(z_pair);
    }

    return EditResult{std::move(z_pair.frames[1]),
                      cost,
                      std::move(in.config),
                      std::move(in.mask),
                      std::move(in.complexity),
                      std::move(in.warnings),
                      in.keep_trace ? std::optional<EditTrace>(std::move(trace))
                                    : std::nullopt};
}

}  // namespace

ReasoningConfig::ReasoningConfig(int reasoning_steps_, int reasoning_frames_,
                                 int total_steps_, TimeSchedule schedule_)
    : reasoning_steps(reasoning_steps_),
      reasoning_frames(reasoning_frames_),
      total_steps(total_steps_),
      schedule(std::move(schedule_)) {
    if (total_steps < 1) {
        throw ConfigError("total step count must be >= 1, got " +
                          std::to_string(total_steps));
    }
    if (reasoning_steps < 0 || reasoning_steps > total_steps) {
        throw ConfigError("reasoning step count " +
                          std::to_string(reasoning_steps) +
                          " outside [0, " + std::to_string(total_steps) + "]");
    }
    if (reasoning_frames < 1) {
        throw ConfigError("reasoning frame count must be >= 1, got " +
                          std::to_string(reasoning_frames));
    }
    if (schedule.step_count() != total_steps) {
        throw ConfigError("schedule has " +
                          std::to_string(schedule.step_count()) +
                          " steps but the run needs " +
                          std::to_string(total_steps));
    }
}

LatentStack euler_step(const LatentStack& z, const VelocityStack& v, double t,
                       double t_next) {
    z.validate("euler_step");
    v.require_same_shape(z, "euler_step");
    if (!(t_next < t)) {
        throw ScheduleError("euler_step requires t_next < t, got t=" +
                            std::to_string(t) + ", t_next=" +
                            std::to_string(t_next));
    }
    const double dt = t_next - t;
    LatentStack out;
    out.frames.reserve(z.frames.size());
    for (std::size_t f = 0; f < z.frames.size(); ++f) {
        const LatentFrame& zf = z.frames[f];
        LatentFrame step(zf.channels, zf.height, zf.width);
        kernels::euler_update(zf.values, v.frames[f].values, dt, step.values);
        out.frames.push_back(std::move(step));
    }
    return out;
}

EditResult run_edit(const Backbone& backbone, const LatentFrame& ref,
                    const std::string& instruction,
                    const ComplexityPredictor& predictor,
                    const EditOptions& options) {
    options.srm.validate();
    options.rpfi.validate();

    std::vector<std::string> warnings;
    std::optional<ComplexityDistribution> complexity;
    Allocation alloc;
    if (options.forced_allocation) {
        alloc = *options.forced_allocation;
    } else {
        complexity = predictor.predict(instruction);
        alloc = allocate(*complexity, options.levels);
    }
    if (alloc.reasoning_steps > options.total_steps) {
        warnings.push_back("reasoning step allocation " +
                           std::to_string(alloc.reasoning_steps) +
                           " exceeds total steps " +
                           std::to_string(options.total_steps) +
                           "; clamped");
        alloc.reasoning_steps = options.total_steps;
    }

    // Validate the full sampling plan before the pilot pass so a broken
    // allocation or schedule costs no backbone evaluation (and fails with the
    // same error whether or not a mask override skips the pilot).
    ReasoningConfig config(
        alloc.reasoning_steps, alloc.reasoning_frames, options.total_steps,
        make_schedule(options.total_steps, options.t_max, options.t_min));

    NoiseSource root(options.seed);
    int pilot_cost = 0;
    SpatialMask mask;
    if (options.mask_override) {
        mask = *options.mask_override;
    } else {
        NoiseSource pilot_noise = root.fork(kPilotNoiseTag);
        PilotResult pilot =
            compute_srm(backbone, instruction, ref, alloc.reasoning_frames,
                        options.t_max, options.srm, pilot_noise);
        mask = std::move(pilot.mask);
        pilot_cost = pilot.pilot_frame_steps;
    }

    return run_core(backbone, ref, instruction,
                    CoreInputs{std::move(config), std::move(mask), options.rpfi,
                               options.seed, options.keep_trace, pilot_cost,
                               std::move(complexity), std::move(warnings)});
}

EditResult run_baseline(const Backbone& backbone, const LatentFrame& ref,
                        const std::string& instruction,
                        const BaselineOptions& options) {
    ReasoningConfig config(
        options.reasoning_steps, options.reasoning_frames, options.total_steps,
        make_schedule(options.total_steps, options.t_max, options.t_min));
    SpatialMask ones(ref.height, ref.width, 1.0);
    return run_core(backbone, ref, instruction,
                    CoreInputs{std::move(config), std::move(ones), RpfiParams{},
                               options.seed, options.keep_trace,
                               /*pilot_frame_steps=*/0, std::nullopt, {}});
}

}  // namespace physedit
