#include "physedit/srm.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "physedit/backbone.hpp"
#include "physedit/kernels.hpp"

namespace physedit {

SpatialMap::SpatialMap(int height_, int width_, double fill)
    : height(height_), width(width_) {
    if (height <= 0 || width <= 0) {
        throw DimensionError("spatial map dimensions must be positive, got " +
                             std::to_string(height_) + "x" +
                             std::to_string(width_));
    }
    values.assign(static_cast<std::size_t>(height) * width, fill);
}

void SpatialMap::require_same_shape(const SpatialMap& other,
                                    const char* what) const {
    if (!same_shape(other)) {
        throw DimensionError(std::string(what) + ": map shapes differ (" +
                             std::to_string(height) + "x" +
                             std::to_string(width) + " vs " +
                             std::to_string(other.height) + "x" +
                             std::to_string(other.width) + ")");
    }
}

AttentionMaps::AttentionMaps(int tokens_, int heads_, int frames_, int height_,
                             int width_, double fill)
    : tokens(tokens_),
      heads(heads_),
      frames(frames_),
      height(height_),
      width(width_) {
    if (tokens <= 0 || heads <= 0 || frames <= 0 || height <= 0 || width <= 0) {
        throw DimensionError("attention map dimensions must be positive");
    }
    weights.assign(static_cast<std::size_t>(slice_count()) * plane_size(), fill);
}

void AttentionMaps::validate() const {
    if (tokens < 1 || heads < 1 || frames < 1 || height < 1 || width < 1) {
        throw InputError("attention maps are empty");
    }
    if (weights.size() !=
        static_cast<std::size_t>(slice_count()) * plane_size()) {
        throw DimensionError("attention weight count does not match dimensions");
    }
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw InputError(
                "attention weights must be finite and non-negative");
        }
    }
}

void SrmParams::validate() const {
    if (!(tau > 0.0)) {
        throw ConfigError("srm tau must be positive, got " +
                          std::to_string(tau));
    }
    if (kernel < 1 || kernel % 2 == 0) {
        throw ConfigError("srm blur kernel width must be odd and >= 1, got " +
                          std::to_string(kernel));
    }
}

std::vector<double> gaussian_taps(int k) {
    if (k < 1 || k % 2 == 0) {
        throw ConfigError("blur kernel width must be odd and >= 1, got " +
                          std::to_string(k));
    }
    if (k == 1) return {1.0};
    const int radius = (k - 1) / 2;
    const double sigma = static_cast<double>(k - 1) / 4.0;
    std::vector<double> taps(static_cast<std::size_t>(k));
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double x = static_cast<double>(i) / sigma;
        const double w = std::exp(-0.5 * x * x);
        taps[static_cast<std::size_t>(i + radius)] = w;
        total += w;
    }
    for (double& w : taps) w /= total;
    return taps;
}

RawMap aggregate_attention(const AttentionMaps& maps) {
    maps.validate();
    RawMap out(maps.height, maps.width);
    kernels::plane_mean(maps.weights, maps.slice_count(), out.values);
    return out;
}

SpatialMask threshold_mask(const RawMap& raw, double tau) {
    if (!(tau > 0.0)) {
        throw ConfigError("threshold tau must be positive, got " +
                          std::to_string(tau));
    }
    if (raw.values.empty()) {
        throw InputError("cannot threshold an empty map");
    }
    const double mu =
        kernels::fixed_sum(raw.values) / static_cast<double>(raw.size());
    SpatialMask out(raw.height, raw.width);
    kernels::shifted_sigmoid(raw.values, mu, tau, out.values);
    return out;
}

SpatialMask blur_mask(const SpatialMask& mask, int k) {
    const std::vector<double> taps = gaussian_taps(k);
    if (k == 1) return mask;
    SpatialMask rows(mask.height, mask.width);
    kernels::conv_rows(mask.values, mask.height, mask.width, taps, rows.values);
    SpatialMask out(mask.height, mask.width);
    kernels::conv_cols(rows.values, mask.height, mask.width, taps, out.values);
    // Normalized non-negative taps keep values inside [0, 1] up to rounding;
    // pin the invariant exactly.
    for (double& v : out.values) v = std::clamp(v, 0.0, 1.0);
    return out;
}

double mask_coverage(const SpatialMask& mask) {
    if (mask.values.empty()) {
        throw InputError("cannot take coverage of an empty mask");
    }
    return kernels::fixed_sum(mask.values) / static_cast<double>(mask.size());
}

PilotResult compute_srm(const Backbone& backbone, const std::string& instruction,
                        const LatentFrame& ref, int reasoning_frames,
                        double t_max, const SrmParams& params,
                        NoiseSource& noise) {
    params.validate();
    if (reasoning_frames < 1) {
        throw InputError("reasoning frame count must be >= 1, got " +
                         std::to_string(reasoning_frames));
    }
    if (!backbone.provides_attention()) {
        throw CapabilityError(
            "backbone does not expose attention maps; cannot compute the "
            "spatial reasoning mask");
    }

    LatentStack pilot = sample_noise(noise, 1, ref.channels, ref.height, ref.width);
    LatentStack stack;
    stack.frames.reserve(2);
    stack.frames.push_back(ref);
    stack.frames.push_back(std::move(pilot.frames[0]));

    AttentionMaps attention;
    (void)backbone.evaluate(stack, t_max, instruction, ref, &attention);

    PilotResult result;
    result.mask = blur_mask(
        threshold_mask(aggregate_attention(attention), params.tau),
        params.kernel);
    result.pilot_frame_steps = stack.frame_count();
    return result;
}

}  // namespace physedit
