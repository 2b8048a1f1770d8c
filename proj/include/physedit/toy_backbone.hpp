#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "physedit/backbone.hpp"
#include "physedit/card.hpp"
#include "physedit/errors.hpp"
#include "physedit/latent.hpp"
#include "physedit/srm.hpp"

namespace physedit {

enum class EditKind { RegionRecolor, RegionReplace, GlobalShift };

const char* edit_kind_name(EditKind kind);
EditKind parse_edit_kind(const std::string& name);

/// Deterministic synthetic edit-task description.
struct ScenarioSpec {
    int channels = 1;
    int height = 16;
    int width = 16;
    EditKind kind = EditKind::RegionRecolor;
    // Rectangle edit locus (ignored for GlobalShift, which edits everywhere).
    int region_y0 = 0;
    int region_x0 = 0;
    int region_h = 0;
    int region_w = 0;
    double magnitude = 1.0;
    /// Length of the stored ground-truth trajectory (>= 2).
    int trajectory_frames = 5;
    std::string instruction;
    ComplexityLevel expected_complexity = ComplexityLevel::Medium;
};

/// Ground truth for one edit: reference frame, per-frame target trajectory
/// (frame 0 = reference, last frame = edited result, intermediates linear
/// blends), and the binary edit locus.
struct Scenario {
    LatentFrame reference;
    LatentStack targets;
    SpatialMap gt_region;  // 1 inside the edit locus, 0 outside
    std::string instruction;
    ComplexityLevel expected_complexity = ComplexityLevel::Medium;

    const LatentFrame& final_target() const { return targets.frames.back(); }
};

/// Builds the scenario: reference drawn from the seed, final target =
/// reference + magnitude inside the edit locus (everywhere for GlobalShift).
/// Throws DimensionError when the region falls outside the grid.
Scenario make_scenario(const ScenarioSpec& spec, std::uint64_t seed);

/// Synthetic-attention shape parameters.
struct AttentionParams {
    double signal = 4.0;       // level inside the edit locus
    double noise_level = 0.0;  // uniform background noise amplitude
    int tokens = 3;
    int heads = 2;
    int layer = 12;
};

/// Per (token, head, frame) map = signal * indicator(gt_region) + uniform
/// noise in [0, noise_level); GlobalShift scenarios get the signal everywhere.
/// Pure function of (scenario, params, frames, seed).
AttentionMaps synth_attention(const Scenario& scenario,
                              const AttentionParams& params, int frames,
                              std::uint64_t seed);

/// Exact conditional velocity toward per-frame targets: v = (z - target) / t
/// for t > 0 and 0 at t = 0. One Euler step from any point of the linear
/// interpolant lands back on the interpolant, so integrating to t = 0
/// reproduces the target to rounding error. `targets` is resampled to the
/// stack length by blending reference -> final (endpoints copied exactly).
VelocityStack oracle_velocity(const LatentStack& z, double t,
                              const LatentStack& targets);

/// Backbone that knows the answer: oracle velocity toward the scenario
/// targets plus synthetic attention concentrated on the edit locus.
class OracleBackbone final : public Backbone {
  public:
    OracleBackbone(Scenario scenario, AttentionParams attention,
                   std::uint64_t attention_seed);

    bool provides_attention() const override { return true; }
    VelocityStack evaluate(const LatentStack& z, double t,
                           const std::string& instruction,
                           const LatentFrame& reference,
                           AttentionMaps* attention_out) const override;
    std::unique_ptr<Backbone> clone() const override;

    const Scenario& scenario() const { return scenario_; }

  private:
    Scenario scenario_;
    AttentionParams attention_;
    std::uint64_t attention_seed_;
};

/// Wraps a backbone and adds deterministic pseudo-random noise of the given
/// scale to every velocity value — a stand-in for an imperfect learned model.
/// The perturbation is a pure function of (seed, t, frame, element), so runs
/// remain reproducible and clones behave identically.
class PerturbedBackbone final : public Backbone {
  public:
    PerturbedBackbone(std::unique_ptr<Backbone> inner, double scale,
                      std::uint64_t seed);

    bool provides_attention() const override {
        return inner_->provides_attention();
    }
    VelocityStack evaluate(const LatentStack& z, double t,
                           const std::string& instruction,
                           const LatentFrame& reference,
                           AttentionMaps* attention_out) const override;
    std::unique_ptr<Backbone> clone() const override;

  private:
    std::unique_ptr<Backbone> inner_;
    double scale_;
    std::uint64_t seed_;
};

}  // namespace physedit
