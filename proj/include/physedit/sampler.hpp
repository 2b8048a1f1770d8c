#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "physedit/backbone.hpp"
#include "physedit/card.hpp"
#include "physedit/errors.hpp"
#include "physedit/latent.hpp"
#include "physedit/rpfi.hpp"
#include "physedit/srm.hpp"

namespace physedit {

/// Substream tag for the SRM pilot noise frame. The pilot draws from a fork
/// of the run's seed so the main initialization noise is bit-identical
/// whether or not a pilot pass runs.
inline constexpr std::uint64_t kPilotNoiseTag = 0x70696C6F74ULL;

/// Frozen per-run sampling plan.
struct ReasoningConfig {
    int reasoning_steps;   // N_r*: joint steps over the full stack
    int reasoning_frames;  // r*: reasoning frames between conditioning and output
    int total_steps;       // N
    TimeSchedule schedule;

    /// Throws ConfigError unless 0 <= reasoning_steps <= total_steps,
    /// reasoning_frames >= 1, and the schedule has exactly total_steps steps.
    ReasoningConfig(int reasoning_steps, int reasoning_frames, int total_steps,
                    TimeSchedule schedule);
};

/// Exact frame-step accounting: one frame-step = one frame evaluated by the
/// backbone in one Euler step.
struct CostLedger {
    int pilot_frame_steps = 0;   // 2 when the SRM pilot ran, else 0
    int stage1_frame_steps = 0;  // reasoning_steps * (reasoning_frames + 2)
    int stage2_frame_steps = 0;  // (total_steps - reasoning_steps) * 2
    // Stack geometry, recorded both ways: frames per stage-1 evaluation
    // including the conditioning frame, and the freshly sampled noise frames
    // (conditioning frame excluded).
    int stage1_stack_frames = 0;  // reasoning_frames + 2
    int stage1_noise_frames = 0;  // reasoning_frames + 1

    int total() const {
        return pilot_frame_steps + stage1_frame_steps + stage2_frame_steps;
    }
};

/// Per-step snapshots for debugging and exactness checks.
struct EditTrace {
    LatentStack init_noise;            // the noise stack that seeded the run
    std::vector<LatentStack> stacks;   // state after each Euler step (and injection)
};

struct EditResult {
    LatentFrame final_frame;
    CostLedger cost;
    ReasoningConfig config_used;
    SpatialMask mask_used;
    std::optional<ComplexityDistribution> complexity;  // absent when forced
    std::vector<std::string> warnings;
    std::optional<EditTrace> trace;
};

struct EditOptions {
    ComplexityLevels levels;
    SrmParams srm;
    RpfiParams rpfi;
    int total_steps = 30;
    double t_max = 1.0;
    double t_min = 0.0;
    std::uint64_t seed = 0;
    bool keep_trace = false;
    /// Bypass the complexity predictor with a fixed (N_r*, r*).
    std::optional<Allocation> forced_allocation;
    /// Bypass the SRM pilot with a caller-supplied mask (pilot cost 0).
    std::optional<SpatialMask> mask_override;
};

struct BaselineOptions {
    int total_steps = 30;
    int reasoning_steps = 10;
    int reasoning_frames = 8;
    double t_max = 1.0;
    double t_min = 0.0;
    std::uint64_t seed = 0;
    bool keep_trace = false;
};

/// One forward Euler step z + (t_next - t) * v for every frame.
/// Throws ScheduleError unless t_next < t.
LatentStack euler_step(const LatentStack& z, const VelocityStack& v, double t,
                       double t_next);

/// Full adaptive edit: complexity prediction -> (N_r*, r*) allocation -> SRM
/// pilot mask -> two-stage sampling with optional injection. reasoning_steps
/// above total_steps is clamped with a recorded warning. Deterministic: the
/// result is a pure function of (backbone, ref, instruction, options).
EditResult run_edit(const Backbone& backbone, const LatentFrame& ref,
                    const std::string& instruction,
                    const ComplexityPredictor& predictor,
                    const EditOptions& options);

/// Fixed-allocation reference path: no predictor, no pilot (all-ones mask),
/// no injection. run_edit forced to the same (N_r, r) with an all-ones mask
/// override and injection off is bit-identical to this.
EditResult run_baseline(const Backbone& backbone, const LatentFrame& ref,
                        const std::string& instruction,
                        const BaselineOptions& options);

}  // namespace physedit
