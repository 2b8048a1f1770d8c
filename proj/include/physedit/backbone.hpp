#pragma once

#include <memory>
#include <string>

#include "physedit/latent.hpp"
#include "physedit/srm.hpp"

namespace physedit {

/// Predicted velocity per frame; always the same shape as the evaluated stack.
using VelocityStack = LatentStack;

/// Velocity-field model evaluated by the sampler. Implementations must be
/// safe for concurrent read-only evaluation or deep-copyable via clone();
/// the harness clones one backbone per worker.
class Backbone {
  public:
    virtual ~Backbone() = default;

    /// Whether evaluate() can fill instruction-conditioned attention maps.
    virtual bool provides_attention() const = 0;

    /// Velocity for every frame of `z` at time t. When `attention_out` is
    /// non-null and provides_attention() is true, the cross-attention maps
    /// for this evaluation are written there; callers that only need the
    /// velocity pass nullptr.
    virtual VelocityStack evaluate(const LatentStack& z, double t,
                                   const std::string& instruction,
                                   const LatentFrame& reference,
                                   AttentionMaps* attention_out) const = 0;

    virtual std::unique_ptr<Backbone> clone() const = 0;
};

}  // namespace physedit
