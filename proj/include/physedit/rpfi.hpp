#pragma once

#include "physedit/errors.hpp"
#include "physedit/latent.hpp"
#include "physedit/srm.hpp"

namespace physedit {

/// Region-preserving feature injection settings. Off by default: the headline
/// configuration runs CARD + SRM only, injection is exploratory.
struct RpfiParams {
    bool enabled = false;
    double beta = 1.5;

    /// Throws ConfigError when enabled with beta <= 1.
    void validate() const;
};

/// Clean reference plus the exact noise the sampler used to initialize the
/// reasoning stack. eps_ref must be bit-identical to that initialization
/// noise (frame j of the cache seeded stack frame j+1), so the injected
/// noised reference matches what an independent denoise of the preserved
/// region would have produced.
struct ReferenceNoiseCache {
    LatentFrame clean_reference;
    LatentStack eps_ref;
};

/// (1 - t_n) * z_c + t_n * eps_ref: the reference re-noised to the current
/// noise level.
LatentFrame noised_reference(const LatentFrame& z_c, const LatentFrame& eps_ref,
                             double t_n);

/// alpha_n = min(1, n / N_r * beta); output = alpha_n * mask + (1 - alpha_n).
/// The schedule starts fully relaxed (step 0 keeps every region untouched)
/// and tightens to full injection once n / N_r reaches 1 / beta.
/// Throws IndexError unless 0 <= n < n_r, ConfigError unless beta > 1.
SpatialMask relaxed_mask(const SpatialMask& mask, int n, int n_r, double beta);

/// Blends the noised reference into every reasoning frame and the output
/// frame where the mask is low; the conditioning frame (index 0) passes
/// through untouched. Stack frame f (f >= 1) pairs with cache noise frame
/// f - 1, matching the initialization layout.
LatentStack inject(const LatentStack& z_full, const ReferenceNoiseCache& cache,
                   const SpatialMask& mask_n, double t_n);

}  // namespace physedit
