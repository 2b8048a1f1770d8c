#include "physedit/latent.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "physedit/kernels.hpp"

namespace physedit {

LatentFrame::LatentFrame(int channels_, int height_, int width_, double fill)
    : channels(channels_), height(height_), width(width_) {
    if (channels <= 0 || height <= 0 || width <= 0) {
        throw DimensionError("latent frame dimensions must be positive, got " +
                             std::to_string(channels_) + "x" +
                             std::to_string(height_) + "x" +
                             std::to_string(width_));
    }
    values.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

void LatentFrame::require_same_shape(const LatentFrame& other,
                                     const char* what) const {
    if (!same_shape(other)) {
        throw DimensionError(std::string(what) + ": frame shapes differ (" +
                             std::to_string(channels) + "x" +
                             std::to_string(height) + "x" +
                             std::to_string(width) + " vs " +
                             std::to_string(other.channels) + "x" +
                             std::to_string(other.height) + "x" +
                             std::to_string(other.width) + ")");
    }
}

void LatentFrame::require_finite(const char* what) const {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InputError(std::string(what) +
                             ": latent frame contains a non-finite value");
        }
    }
}

LatentStack::LatentStack(std::vector<LatentFrame> frames_)
    : frames(std::move(frames_)) {}

std::size_t LatentStack::total_values() const {
    std::size_t total = 0;
    for (const LatentFrame& f : frames) total += f.size();
    return total;
}

void LatentStack::validate(const char* what) const {
    if (frames.empty()) {
        throw DimensionError(std::string(what) + ": latent stack is empty");
    }
    for (std::size_t i = 1; i < frames.size(); ++i) {
        frames[i].require_same_shape(frames[0], what);
    }
}

void LatentStack::require_same_shape(const LatentStack& other,
                                     const char* what) const {
    if (frames.size() != other.frames.size()) {
        throw DimensionError(std::string(what) + ": stack frame counts differ (" +
                             std::to_string(frames.size()) + " vs " +
                             std::to_string(other.frames.size()) + ")");
    }
    for (std::size_t i = 0; i < frames.size(); ++i) {
        frames[i].require_same_shape(other.frames[i], what);
    }
}

bool LatentStack::bit_equal(const LatentStack& other) const {
    if (frames.size() != other.frames.size()) return false;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (!frames[i].same_shape(other.frames[i])) return false;
        if (frames[i].values != other.frames[i].values) return false;
    }
    return true;
}

TimeSchedule::TimeSchedule(std::vector<double> steps) : steps_(std::move(steps)) {
    if (steps_.size() < 2) {
        throw ScheduleError("time schedule needs at least two values, got " +
                            std::to_string(steps_.size()));
    }
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (!std::isfinite(steps_[i])) {
            throw ScheduleError("time schedule contains a non-finite value");
        }
        if (i > 0 && steps_[i] >= steps_[i - 1]) {
            throw ScheduleError(
                "time schedule must be strictly decreasing (violated at index " +
                std::to_string(i) + ")");
        }
    }
}

TimeSchedule make_schedule(int steps, double t_max, double t_min) {
    if (steps < 1) {
        throw ScheduleError("schedule step count must be >= 1, got " +
                            std::to_string(steps));
    }
    if (!(t_max > t_min)) {
        throw ScheduleError("schedule requires t_max > t_min");
    }
    std::vector<double> values(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) {
        const double u = static_cast<double>(i) / steps;
        values[static_cast<std::size_t>(i)] = t_max + u * (t_min - t_max);
    }
    // Pin the endpoints so t_min = 0 lands exactly on 0.
    values.front() = t_max;
    values.back() = t_min;
    return TimeSchedule(std::move(values));
}

double NoiseSource::next_normal() {
    const double v = kernels::counter_normal(seed_, position_);
    ++position_;
    return v;
}

NoiseSource NoiseSource::fork(std::uint64_t tag) const {
    return NoiseSource(kernels::derive_stream(seed_, tag));
}

LatentStack sample_noise(NoiseSource& source, int frames, int channels,
                         int height, int width) {
    if (frames <= 0) {
        throw DimensionError("noise stack frame count must be positive, got " +
                             std::to_string(frames));
    }
    LatentStack stack;
    stack.frames.reserve(static_cast<std::size_t>(frames));
    for (int f = 0; f < frames; ++f) {
        LatentFrame frame(channels, height, width);
        kernels::normal_fill(source.seed_, source.position_, frame.values);
        source.position_ += frame.size();
        stack.frames.push_back(std::move(frame));
    }
    return stack;
}

LatentFrame interpolate_latent(const LatentFrame& z0, const LatentFrame& eps,
                               double t) {
    z0.require_same_shape(eps, "interpolate_latent");
    if (!(t >= 0.0 && t <= 1.0)) {
        throw ScheduleError("interpolation time must lie in [0, 1], got " +
                            std::to_string(t));
    }
    LatentFrame out(z0.channels, z0.height, z0.width);
    kernels::affine_blend(z0.values, eps.values, 1.0 - t, t, out.values);
    return out;
}

}  // namespace physedit
