#include "physedit/toy_backbone.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <utility>

#include "physedit/kernels.hpp"

namespace physedit {
namespace {

constexpr std::uint64_t kReferenceNoiseTag = 0x726566ULL;      // "ref"
constexpr std::uint64_t kPerturbationBaseTag = 0x7065727475ULL;  // "pertu"

/// Target for stack frame f of F: the trajectory resampled to the live stack
/// length. Endpoints are copied bit-exactly; intermediates blend
/// reference -> final, matching the stored trajectory's linear construction.
LatentFrame resampled_target(const Scenario& scenario, int f, int frame_count) {
    const LatentFrame& ref = scenario.reference;
    const LatentFrame& fin = scenario.final_target();
    if (f == 0) return ref;
    if (f == frame_count - 1) return fin;
    const double u =
        static_cast<double>(f) / static_cast<double>(frame_count - 1);
    LatentFrame out(ref.channels, ref.height, ref.width);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] = ref.values[i] + u * (fin.values[i] - ref.values[i]);
    }
    return out;
}

}  // namespace

const char* edit_kind_name(EditKind kind) {
    switch (kind) {
        case EditKind::RegionRecolor: return "region-recolor";
        case EditKind::RegionReplace: return "region-replace";
        case EditKind::GlobalShift: return "global-shift";
    }
    throw InputError("invalid edit kind value");
}

EditKind parse_edit_kind(const std::string& name) {
    if (name == "region-recolor") return EditKind::RegionRecolor;
    if (name == "region-replace") return EditKind::RegionReplace;
    if (name == "global-shift") return EditKind::GlobalShift;
    throw ParseError("unknown edit kind '" + name +
                     "' (expected region-recolor, region-replace, or "
                     "global-shift)");
}

Scenario make_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
    if (spec.channels <= 0 || spec.height <= 0 || spec.width <= 0) {
        throw DimensionError("scenario grid dimensions must be positive");
    }
    if (spec.trajectory_frames < 2) {
        throw DimensionError("scenario trajectory needs >= 2 frames, got " +
                             std::to_string(spec.trajectory_frames));
    }
    if (!std::isfinite(spec.magnitude)) {
        throw InputError("scenario magnitude must be finite");
    }

    Scenario scenario;
    scenario.instruction = spec.instruction;
    scenario.expected_complexity = spec.expected_complexity;

    NoiseSource ref_noise = NoiseSource(seed).fork(kReferenceNoiseTag);
    scenario.reference = sample_noise(ref_noise, 1, spec.channels, spec.height,
                                      spec.width)
                             .frames[0];

    scenario.gt_region = SpatialMap(spec.height, spec.width, 0.0);
    if (spec.kind == EditKind::GlobalShift) {
        for (double& v : scenario.gt_region.values) v = 1.0;
    } else {
        if (spec.region_h < 1 || spec.region_w < 1 || spec.region_y0 < 0 ||
            spec.region_x0 < 0 || spec.region_y0 + spec.region_h > spec.height ||
            spec.region_x0 + spec.region_w > spec.width) {
            throw DimensionError(
                "scenario region [" + std::to_string(spec.region_y0) + ":" +
                std::to_string(spec.region_y0 + spec.region_h) + ", " +
                std::to_string(spec.region_x0) + ":" +
                std::to_string(spec.region_x0 + spec.region_w) +
                ") falls outside the " + std::to_string(spec.height) + "x" +
                std::to_string(spec.width) + " grid");
        }
        for (int y = spec.region_y0; y < spec.region_y0 + spec.region_h; ++y) {
            for (int x = spec.region_x0; x < spec.region_x0 + spec.region_w;
                 ++x) {
                scenario.gt_region.at(y, x) = 1.0;
            }
        }
    }

    // Final target: reference shifted by the magnitude inside the locus.
    // RegionRecolor and RegionReplace share this arithmetic — they differ in
    // labeling (and the instructions that go with them), not in the latent
    // math of a constant-offset edit.
    LatentFrame final_target = scenario.reference;
    for (int c = 0; c < spec.channels; ++c) {
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                if (scenario.gt_region.at(y, x) != 0.0) {
                    final_target.at(c, y, x) += spec.magnitude;
                }
            }
        }
    }

    scenario.targets.frames.reserve(
        static_cast<std::size_t>(spec.trajectory_frames));
    scenario.targets.frames.push_back(scenario.reference);
    for (int j = 1; j < spec.trajectory_frames - 1; ++j) {
        const double u = static_cast<double>(j) /
                         static_cast<double>(spec.trajectory_frames - 1);
        LatentFrame blend(spec.channels, spec.height, spec.width);
        for (std::size_t i = 0; i < blend.values.size(); ++i) {
            blend.values[i] =
                scenario.reference.values[i] +
                u * (final_target.values[i] - scenario.reference.values[i]);
        }
        scenario.targets.frames.push_back(std::move(blend));
    }
    scenario.targets.frames.push_back(std::move(final_target));
    return scenario;
}

AttentionMaps synth_attention(const Scenario& scenario,
                              const AttentionParams& params, int frames,
                              std::uint64_t seed) {
    if (params.tokens < 1 || params.heads < 1 || frames < 1) {
        throw InputError("attention dimensions must be >= 1");
    }
    if (params.signal < 0.0 || params.noise_level < 0.0) {
        throw InputError("attention signal and noise levels must be >= 0");
    }
    const SpatialMap& region = scenario.gt_region;
    AttentionMaps maps(params.tokens, params.heads, frames, region.height,
                       region.width);
    maps.layer = params.layer;
    const std::size_t plane = maps.plane_size();
    for (int s = 0; s < maps.slice_count(); ++s) {
        for (std::size_t p = 0; p < plane; ++p) {
            const std::size_t i = static_cast<std::size_t>(s) * plane + p;
            const double noise =
                params.noise_level > 0.0
                    ? params.noise_level * kernels::counter_unit(seed, i)
                    : 0.0;
            maps.weights[i] = params.signal * region.values[p] + noise;
        }
    }
    return maps;
}

VelocityStack oracle_velocity(const LatentStack& z, double t,
                              const LatentStack& targets) {
    z.validate("oracle_velocity");
    targets.validate("oracle_velocity targets");
    targets.frames[0].require_same_shape(z.frames[0], "oracle_velocity");

    VelocityStack v;
    v.frames.reserve(z.frames.size());
    for (std::size_t f = 0; f < z.frames.size(); ++f) {
        const LatentFrame& zf = z.frames[f];
        LatentFrame vf(zf.channels, zf.height, zf.width, 0.0);
        if (t > 0.0) {
            const LatentFrame& target = targets.frames[f];
            for (std::size_t i = 0; i < vf.values.size(); ++i) {
                vf.values[i] = (zf.values[i] - target.values[i]) / t;
            }
        }
        v.frames.push_back(std::move(vf));
    }
    return v;
}

OracleBackbone::OracleBackbone(Scenario scenario, AttentionParams attention,
                               std::uint64_t attention_seed)
    : scenario_(std::move(scenario)),
      attention_(attention),
      attention_seed_(attention_seed) {
    scenario_.targets.validate("oracle scenario targets");
    scenario_.reference.require_same_shape(scenario_.targets.frames[0],
                                           "oracle scenario");
}

VelocityStack OracleBackbone::evaluate(const LatentStack& z, double t,
                                       const std::string& /*instruction*/,
                                       const LatentFrame& /*reference*/,
                                       AttentionMaps* attention_out) const {
    z.validate("oracle evaluate");
    LatentStack targets;
    targets.frames.reserve(z.frames.size());
    for (int f = 0; f < z.frame_count(); ++f) {
        targets.frames.push_back(
            resampled_target(scenario_, f, z.frame_count()));
    }
    if (attention_out != nullptr) {
        *attention_out = synth_attention(scenario_, attention_, z.frame_count(),
                                         attention_seed_);
    }
    return oracle_velocity(z, t, targets);
}

std::unique_ptr<Backbone> OracleBackbone::clone() const {
    return std::make_unique<OracleBackbone>(*this);
}

PerturbedBackbone::PerturbedBackbone(std::unique_ptr<Backbone> inner,
                                     double scale, std::uint64_t seed)
    : inner_(std::move(inner)), scale_(scale), seed_(seed) {
    if (inner_ == nullptr) {
        throw InputError("perturbed backbone needs an inner backbone");
    }
    if (!(scale_ >= 0.0) || !std::isfinite(scale_)) {
        throw InputError("perturbation scale must be finite and >= 0");
    }
}

VelocityStack PerturbedBackbone::evaluate(const LatentStack& z, double t,
                                          const std::string& instruction,
                                          const LatentFrame& reference,
                                          AttentionMaps* attention_out) const {
    VelocityStack v = inner_->evaluate(z, t, instruction, reference,
                                       attention_out);
    if (scale_ == 0.0) return v;
    const std::uint64_t t_bits = std::bit_cast<std::uint64_t>(t);
    for (std::size_t f = 0; f < v.frames.size(); ++f) {
        const std::uint64_t stream = kernels::derive_stream(
            seed_, kPerturbationBaseTag ^ (t_bits + f * 0x9E3779B97F4A7C15ULL));
        std::vector<double>& values = v.frames[f].values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            values[i] += scale_ * kernels::counter_normal(stream, i);
        }
    }
    return v;
}

std::unique_ptr<Backbone> PerturbedBackbone::clone() const {
    return std::unique_ptr<Backbone>(
        new PerturbedBackbone(inner_->clone(), scale_, seed_));
}

}  // namespace physedit
