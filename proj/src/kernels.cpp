#include "physedit/kernels.hpp"

#include <cmath>
#include <string>

#include "physedit/errors.hpp"

namespace physedit::kernels {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline double stable_sigmoid(double a) {
    if (a >= 0.0) {
        return 1.0 / (1.0 + std::exp(-a));
    }
    const double e = std::exp(a);
    return e / (1.0 + e);
}

inline int clamp_index(int i, int n) {
    if (i < 0) return 0;
    if (i >= n) return n - 1;
    return i;
}

void require_lengths(bool ok, const char* kernel) {
    if (!ok) {
        throw DimensionError(std::string(kernel) +
                             ": span lengths are inconsistent");
    }
}

void require_grid(std::span<const double> in, std::span<const double> out,
                  int height, int width, std::span<const double> taps,
                  const char* kernel) {
    if (taps.empty() || taps.size() % 2 == 0) {
        throw ConfigError(std::string(kernel) +
                          ": tap count must be odd, got " +
                          std::to_string(taps.size()));
    }
    const bool dims_ok = height >= 1 && width >= 1;
    const auto n = static_cast<std::size_t>(height) *
                   static_cast<std::size_t>(width);
    require_lengths(dims_ok && in.size() == n && out.size() == n, kernel);
}

}  // namespace

std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

double counter_unit(std::uint64_t seed, std::uint64_t index) {
    return static_cast<double>(counter_u64(seed, index) >> 11) * 0x1.0p-53;
}

double counter_normal(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t pair = index >> 1;
    // u1 in (0,1] so the log is finite; u2 in [0,1).
    const double u1 =
        static_cast<double>((counter_u64(seed, 2 * pair) >> 11) + 1) * 0x1.0p-53;
    const double u2 = counter_unit(seed, 2 * pair + 1);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = kTwoPi * u2;
    return (index & 1) ? radius * std::sin(angle) : radius * std::cos(angle);
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ mix64(tag + 0x632BE59BD9B4E019ULL));
}

double fixed_sum(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
}

// ---------------------------------------------------------------------------
// OpenMP variants
// ---------------------------------------------------------------------------

void affine_blend(std::span<const double> a, std::span<const double> b,
                  double wa, double wb, std::span<double> out) {
    require_lengths(a.size() == b.size() && a.size() == out.size(),
                    "affine_blend");
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for if (n >= kParallelGrain)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i] = wa * a[i] + wb * b[i];
    }
}

void euler_update(std::span<const double> z, std::span<const double> v,
                  double dt, std::span<double> out) {
    require_lengths(z.size() == v.size() && z.size() == out.size(),
                    "euler_update");
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for if (n >= kParallelGrain)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i] = z[i] + dt * v[i];
    }
}

void masked_blend(std::span<const double> z, std::span<const double> ref,
                  std::span<const double> mask, int channels,
                  std::span<double> out) {
    const std::size_t plane = mask.size();
    require_lengths(channels >= 1 &&
                        z.size() == plane * static_cast<std::size_t>(channels) &&
                        ref.size() == z.size() && out.size() == z.size(),
                    "masked_blend");
    const auto splane = static_cast<std::ptrdiff_t>(plane);
    const auto schannels = static_cast<std::ptrdiff_t>(channels);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for collapse(2) if (n >= kParallelGrain)
    for (std::ptrdiff_t c = 0; c < schannels; ++c) {
        for (std::ptrdiff_t p = 0; p < splane; ++p) {
            const std::ptrdiff_t i = c * splane + p;
            const double m = mask[p];
            out[i] = m * z[i] + (1.0 - m) * ref[i];
        }
    }
}

void plane_mean(std::span<const double> in, int slices, std::span<double> out) {
    const std::size_t plane = out.size();
    require_lengths(slices >= 1 &&
                        in.size() == plane * static_cast<std::size_t>(slices),
                    "plane_mean");
    const auto splane = static_cast<std::ptrdiff_t>(plane);
    const double inv = 1.0 / static_cast<double>(slices);
#pragma omp parallel for if (splane >= kParallelGrain)
    for (std::ptrdiff_t p = 0; p < splane; ++p) {
        double acc = 0.0;
        for (int s = 0; s < slices; ++s) {
            acc += in[static_cast<std::ptrdiff_t>(s) * splane + p];
        }
        out[p] = acc * inv;
    }
}

void shifted_sigmoid(std::span<const double> in, double mu, double tau,
                     std::span<double> out) {
    require_lengths(in.size() == out.size(), "shifted_sigmoid");
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
    const double inv_tau = 1.0 / tau;
#pragma omp parallel for if (n >= kParallelGrain)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i] = stable_sigmoid((in[i] - mu) * inv_tau);
    }
}

void conv_rows(std::span<const double> in, int height, int width,
               std::span<const double> taps, std::span<double> out) {
    require_grid(in, out, height, width, taps, "conv_rows");
    const int half = static_cast<int>(taps.size() / 2);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(height) * width;
#pragma omp parallel for if (n >= kParallelGrain)
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int j = -half; j <= half; ++j) {
                acc += taps[j + half] * in[static_cast<std::ptrdiff_t>(y) * width +
                                           clamp_index(x + j, width)];
            }
            out[static_cast<std::ptrdiff_t>(y) * width + x] = acc;
        }
    }
}

void conv_cols(std::span<const double> in, int height, int width,
               std::span<const double> taps, std::span<double> out) {
    require_grid(in, out, height, width, taps, "conv_cols");
    const int half = static_cast<int>(taps.size() / 2);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(height) * width;
#pragma omp parallel for if (n >= kParallelGrain)
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int j = -half; j <= half; ++j) {
                acc += taps[j + half] *
                       in[static_cast<std::ptrdiff_t>(clamp_index(y + j, height)) * width + x];
            }
            out[static_cast<std::ptrdiff_t>(y) * width + x] = acc;
        }
    }
}

void normal_fill(std::uint64_t seed, std::uint64_t first_index,
                 std::span<double> out) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for if (n >= kParallelGrain)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i] = counter_normal(seed, first_index + static_cast<std::uint64_t>(i));
    }
}

// ---------------------------------------------------------------------------
// Serial reference implementations
// ---------------------------------------------------------------------------

namespace serial {

void affine_blend(std::span<const double> a, std::span<const double> b,
                  double wa, double wb, std::span<double> out) {
    require_lengths(a.size() == b.size() && a.size() == out.size(),
                    "serial::affine_blend");
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = wa * a[i] + wb * b[i];
    }
}

void euler_update(std::span<const double> z, std::span<const double> v,
                  double dt, std::span<double> out) {
    require_lengths(z.size() == v.size() && z.size() == out.size(),
                    "serial::euler_update");
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = z[i] + dt * v[i];
    }
}

void masked_blend(std::span<const double> z, std::span<const double> ref,
                  std::span<const double> mask, int channels,
                  std::span<double> out) {
    const std::size_t plane = mask.size();
    require_lengths(channels >= 1 &&
                        z.size() == plane * static_cast<std::size_t>(channels) &&
                        ref.size() == z.size() && out.size() == z.size(),
                    "serial::masked_blend");
    for (int c = 0; c < channels; ++c) {
        for (std::size_t p = 0; p < plane; ++p) {
            const std::size_t i = static_cast<std::size_t>(c) * plane + p;
            out[i] = mask[p] * z[i] + (1.0 - mask[p]) * ref[i];
        }
    }
}

void plane_mean(std::span<const double> in, int slices, std::span<double> out) {
    const std::size_t plane = out.size();
    require_lengths(slices >= 1 &&
                        in.size() == plane * static_cast<std::size_t>(slices),
                    "serial::plane_mean");
    const double inv = 1.0 / static_cast<double>(slices);
    for (std::size_t p = 0; p < plane; ++p) {
        double acc = 0.0;
        for (int s = 0; s < slices; ++s) {
            acc += in[static_cast<std::size_t>(s) * plane + p];
        }
        out[p] = acc * inv;
    }
}

void shifted_sigmoid(std::span<const double> in, double mu, double tau,
                     std::span<double> out) {
    require_lengths(in.size() == out.size(), "serial::shifted_sigmoid");
    const double inv_tau = 1.0 / tau;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = stable_sigmoid((in[i] - mu) * inv_tau);
    }
}

void conv_rows(std::span<const double> in, int height, int width,
               std::span<const double> taps, std::span<double> out) {
    require_grid(in, out, height, width, taps, "serial::conv_rows");
    const int half = static_cast<int>(taps.size() / 2);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int j = -half; j <= half; ++j) {
                acc += taps[j + half] * in[static_cast<std::size_t>(y) * width +
                                           clamp_index(x + j, width)];
            }
            out[static_cast<std::size_t>(y) * width + x] = acc;
        }
    }
}

void conv_cols(std::span<const double> in, int height, int width,
               std::span<const double> taps, std::span<double> out) {
    require_grid(in, out, height, width, taps, "serial::conv_cols");
    const int half = static_cast<int>(taps.size() / 2);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int j = -half; j <= half; ++j) {
                acc += taps[j + half] *
                       in[static_cast<std::size_t>(clamp_index(y + j, height)) * width + x];
            }
            out[static_cast<std::size_t>(y) * width + x] = acc;
        }
    }
}

void normal_fill(std::uint64_t seed, std::uint64_t first_index,
                 std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = counter_normal(seed, first_index + i);
    }
}

double fixed_sum(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
}

}  // namespace serial

}  // namespace physedit::kernels
