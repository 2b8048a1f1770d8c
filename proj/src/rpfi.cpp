#include "physedit/rpfi.hpp"

#include <algorithm>
#include <string>

#include "physedit/kernels.hpp"

namespace physedit {

void RpfiParams::validate() const {
    if (enabled && !(beta > 1.0)) {
        throw ConfigError("rpfi beta must be > 1, got " + std::to_string(beta));
    }
}

LatentFrame noised_reference(const LatentFrame& z_c, const LatentFrame& eps_ref,
                             double t_n) {
    return interpolate_latent(z_c, eps_ref, t_n);
}

SpatialMask relaxed_mask(const SpatialMask& mask, int n, int n_r, double beta) {
    if (!(beta > 1.0)) {
        throw ConfigError("rpfi beta must be > 1, got " + std::to_string(beta));
    }
    if (n < 0 || n >= n_r) {
        throw IndexError("relaxation step index " + std::to_string(n) +
                         " outside [0, " + std::to_string(n_r) + ")");
    }
    const double alpha =
        std::min(1.0, static_cast<double>(n) / static_cast<double>(n_r) * beta);
    SpatialMask out(mask.height, mask.width);
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        out.values[i] = alpha * mask.values[i] + (1.0 - alpha);
    }
    return out;
}

LatentStack inject(const LatentStack& z_full, const ReferenceNoiseCache& cache,
                   const SpatialMask& mask_n, double t_n) {
    z_full.validate("inject");
    const LatentFrame& first = z_full.frames[0];
    if (mask_n.height != first.height || mask_n.width != first.width) {
        throw DimensionError("inject: mask is " + std::to_string(mask_n.height) +
                             "x" + std::to_string(mask_n.width) +
                             " but latent frames are " +
                             std::to_string(first.height) + "x" +
                             std::to_string(first.width));
    }
    if (cache.eps_ref.frame_count() != z_full.frame_count() - 1) {
        throw DimensionError(
            "inject: noise cache holds " +
            std::to_string(cache.eps_ref.frame_count()) +
            " frames but the stack has " +
            std::to_string(z_full.frame_count() - 1) + " injectable frames");
    }
    cache.clean_reference.require_same_shape(first, "inject");

    LatentStack out;
    out.frames.reserve(z_full.frames.size());
    out.frames.push_back(z_full.frames[0]);
    for (int f = 1; f < z_full.frame_count(); ++f) {
        const LatentFrame& z_f = z_full.frames[static_cast<std::size_t>(f)];
        const LatentFrame z_ref = noised_reference(
            cache.clean_reference,
            cache.eps_ref.frames[static_cast<std::size_t>(f - 1)], t_n);
        LatentFrame blended(z_f.channels, z_f.height, z_f.width);
        kernels::masked_blend(z_f.values, z_ref.values, mask_n.values,
                              z_f.channels, blended.values);
        out.frames.push_back(std::move(blended));
    }
    return out;
}

}  // namespace physedit
