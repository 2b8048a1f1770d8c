#pragma once

#include <cstdint>
#include <vector>

#include "physedit/errors.hpp"

namespace physedit {

/// One latent frame: `channels` planes of height x width doubles, stored
/// plane-contiguous ([c][y][x]).
struct LatentFrame {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> values;

    LatentFrame() = default;
    LatentFrame(int channels, int height, int width, double fill = 0.0);

    std::size_t size() const { return values.size(); }
    std::size_t plane_size() const {
        return static_cast<std::size_t>(height) * width;
    }

    double& at(int c, int y, int x) {
        return values[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return values[(static_cast<std::size_t>(c) * height + y) * width + x];
    }

    bool same_shape(const LatentFrame& other) const {
        return channels == other.channels && height == other.height &&
               width == other.width;
    }
    /// Throws DimensionError unless both frames have identical dimensions.
    void require_same_shape(const LatentFrame& other, const char* what) const;
    /// Throws InputError if any stored value is NaN or infinite.
    void require_finite(const char* what) const;
};

/// Ordered list of dimension-identical latent frames. Frame 0 is by
/// convention the clean conditioning frame inside the sampler.
struct LatentStack {
    std::vector<LatentFrame> frames;

    LatentStack() = default;
    explicit LatentStack(std::vector<LatentFrame> frames);

    int frame_count() const { return static_cast<int>(frames.size()); }
    std::size_t total_values() const;

    /// Throws unless non-empty with uniform frame shapes.
    void validate(const char* what) const;
    void require_same_shape(const LatentStack& other, const char* what) const;
    bool bit_equal(const LatentStack& other) const;
};

/// Strictly decreasing time values t_max = steps[0] > ... > steps[N] = t_min.
class TimeSchedule {
  public:
    explicit TimeSchedule(std::vector<double> steps);

    const std::vector<double>& steps() const { return steps_; }
    double operator[](int i) const { return steps_[static_cast<std::size_t>(i)]; }
    /// Number of integration steps N (one less than the stored values).
    int step_count() const { return static_cast<int>(steps_.size()) - 1; }
    double t_max() const { return steps_.front(); }
    double t_min() const { return steps_.back(); }

  private:
    std::vector<double> steps_;
};

/// N+1 uniformly spaced values from t_max down to t_min.
TimeSchedule make_schedule(int steps, double t_max, double t_min);

/// Deterministic seeded noise stream. Sample i is a pure function of
/// (seed, i): identical seeds replay the identical sequence across runs, and
/// whole stacks can be filled in parallel without changing a single bit.
/// Single-owner mutable; fork() derives an independent stream.
class NoiseSource {
  public:
    explicit NoiseSource(std::uint64_t seed) : seed_(seed) {}

    double next_normal();
    std::uint64_t seed() const { return seed_; }
    std::uint64_t position() const { return position_; }
    void skip(std::uint64_t count) { position_ += count; }
    NoiseSource fork(std::uint64_t tag) const;

  private:
    friend LatentStack sample_noise(NoiseSource&, int, int, int, int);
    std::uint64_t seed_;
    std::uint64_t position_ = 0;
};

/// Standard-normal stack of `frames` frames, laid out frame by frame along
/// the stream; advances the source position by the number of values drawn.
LatentStack sample_noise(NoiseSource& source, int frames, int channels,
                         int height, int width);

/// Elementwise (1-t)*z0 + t*eps for t in [0,1].
LatentFrame interpolate_latent(const LatentFrame& z0, const LatentFrame& eps,
                               double t);

}  // namespace physedit
