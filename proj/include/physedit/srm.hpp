#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "physedit/errors.hpp"
#include "physedit/latent.hpp"

namespace physedit {

class Backbone;

/// Plain h x w real grid, row-major.
struct SpatialMap {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    SpatialMap() = default;
    SpatialMap(int height, int width, double fill = 0.0);

    std::size_t size() const { return values.size(); }
    double& at(int y, int x) {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    double at(int y, int x) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    bool same_shape(const SpatialMap& other) const {
        return height == other.height && width == other.width;
    }
    void require_same_shape(const SpatialMap& other, const char* what) const;
};

/// Aggregated attention before thresholding: finite, non-negative when the
/// attention weights are.
using RawMap = SpatialMap;
/// Soft spatial reasoning mask; every value in closed [0, 1].
using SpatialMask = SpatialMap;

/// Instruction-conditioned cross-attention weights indexed
/// [token][head][frame][y][x]; non-negative, not necessarily normalized (the
/// downstream threshold is shift-invariant, so either convention gives the
/// same mask).
struct AttentionMaps {
    int tokens = 0;
    int heads = 0;
    int frames = 0;
    int height = 0;
    int width = 0;
    int layer = 0;

    std::vector<double> weights;

    AttentionMaps() = default;
    AttentionMaps(int tokens, int heads, int frames, int height, int width,
                  double fill = 0.0);

    std::size_t plane_size() const {
        return static_cast<std::size_t>(height) * width;
    }
    int slice_count() const { return tokens * heads * frames; }
    double& at(int token, int head, int frame, int y, int x) {
        return weights[(((static_cast<std::size_t>(token) * heads + head) *
                             frames +
                         frame) *
                            height +
                        y) *
                           width +
                       x];
    }
    double at(int token, int head, int frame, int y, int x) const {
        return const_cast<AttentionMaps*>(this)->at(token, head, frame, y, x);
    }
    /// Throws InputError on empty/ill-sized maps or negative/non-finite
    /// weights.
    void validate() const;
};

struct SrmParams {
    double tau = 0.1;
    int kernel = 5;
    int layer = 12;  // backbone layer the attention is read from (pass-through)

    /// Throws ConfigError unless tau > 0 and kernel is odd and >= 1.
    void validate() const;
};

/// Normalized Gaussian taps of odd width k: sigma = (k - 1) / 4, truncated
/// and renormalized; k = 1 yields the identity kernel {1}.
std::vector<double> gaussian_taps(int k);

/// Mean over tokens, heads and frames at each (y, x).
RawMap aggregate_attention(const AttentionMaps& maps);

/// sigmoid((raw - mean(raw)) / tau) elementwise; the mean runs over the whole
/// grid, making the op invariant to constant shifts of the raw map.
SpatialMask threshold_mask(const RawMap& raw, double tau);

/// Separable Gaussian blur, replicate border padding.
SpatialMask blur_mask(const SpatialMask& mask, int k);

/// Mean mask value, in [0, 1].
double mask_coverage(const SpatialMask& mask);

struct PilotResult {
    SpatialMask mask;
    int pilot_frame_steps = 0;
};

/// Runs the single pilot backbone evaluation at t_max over a 2-frame stack
/// (reference + one noise frame drawn from `noise`) and feeds the attention
/// through aggregate -> threshold -> blur. The pilot always costs 2
/// frame-steps regardless of `reasoning_frames` (accepted for validation and
/// future full-stack pilots). Throws CapabilityError if the backbone does not
/// expose attention.
PilotResult compute_srm(const Backbone& backbone, const std::string& instruction,
                        const LatentFrame& ref, int reasoning_frames,
                        double t_max, const SrmParams& params,
                        NoiseSource& noise);

}  // namespace physedit
