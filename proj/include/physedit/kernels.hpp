#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "physedit/errors.hpp"

// Data-parallel inner loops shared by the latent, mask and sampling modules.
// Every kernel exists twice: the OpenMP variant in physedit::kernels (what the
// library calls) and a plain serial reference in physedit::kernels::serial.
// The two are bit-identical for any input and any thread count: each output
// element is computed independently and every per-element accumulation runs in
// a fixed order. Tests compare the pair; bench/kernel_bench.cpp times it.
// Kernels validate span lengths up front (DimensionError) and convolution tap
// counts (ConfigError); the per-call cost is negligible next to the loops.

namespace physedit::kernels {

// Element count below which the OpenMP variants skip the parallel region.
inline constexpr std::ptrdiff_t kParallelGrain = 1 << 14;

// out = wa*a + wb*b
void affine_blend(std::span<const double> a, std::span<const double> b,
                  double wa, double wb, std::span<double> out);

// out = z + dt*v
void euler_update(std::span<const double> z, std::span<const double> v,
                  double dt, std::span<double> out);

// out = m*z + (1-m)*ref, the 2D weight plane broadcast over `channels` planes.
// z, ref and out hold channels * mask.size() values.
void masked_blend(std::span<const double> z, std::span<const double> ref,
                  std::span<const double> mask, int channels,
                  std::span<double> out);

// out[p] = mean over `slices` stacked planes of in[s*out.size() + p].
void plane_mean(std::span<const double> in, int slices, std::span<double> out);

// out = sigmoid((in - mu) / tau)
void shifted_sigmoid(std::span<const double> in, double mu, double tau,
                     std::span<double> out);

// Separable convolution passes over a height x width grid, replicate padding
// at the borders. taps.size() must be odd.
void conv_rows(std::span<const double> in, int height, int width,
               std::span<const double> taps, std::span<double> out);
void conv_cols(std::span<const double> in, int height, int width,
               std::span<const double> taps, std::span<double> out);

// Fills out with standard-normal draws from the counter stream, positions
// [first_index, first_index + out.size()).
void normal_fill(std::uint64_t seed, std::uint64_t first_index,
                 std::span<double> out);

// Fixed-order accumulation; never parallelized so means and coverage values
// do not depend on the thread count.
double fixed_sum(std::span<const double> v);

// Deterministic counter stream: value i is a pure function of (seed, i), so
// streams can be forked, replayed and filled in parallel.
//   counter_u64    SplitMix64 finalizer applied to seed + (i+1)*0x9E3779B97F4A7C15
//   counter_unit   top 53 bits mapped to [0,1)
//   counter_normal Box-Muller: pair p = i/2 consumes uniforms (2p, 2p+1);
//                  even i takes the cosine branch, odd i the sine branch
std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t index);
double counter_unit(std::uint64_t seed, std::uint64_t index);
double counter_normal(std::uint64_t seed, std::uint64_t index);

// Derives an independent stream seed from (seed, tag).
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag);

namespace serial {

void affine_blend(std::span<const double> a, std::span<const double> b,
                  double wa, double wb, std::span<double> out);
void euler_update(std::span<const double> z, std::span<const double> v,
                  double dt, std::span<double> out);
void masked_blend(std::span<const double> z, std::span<const double> ref,
                  std::span<const double> mask, int channels,
                  std::span<double> out);
void plane_mean(std::span<const double> in, int slices, std::span<double> out);
void shifted_sigmoid(std::span<const double> in, double mu, double tau,
                     std::span<double> out);
void conv_rows(std::span<const double> in, int height, int width,
               std::span<const double> taps, std::span<double> out);
void conv_cols(std::span<const double> in, int height, int width,
               std::span<const double> taps, std::span<double> out);
void normal_fill(std::uint64_t seed, std::uint64_t first_index,
                 std::span<double> out);
double fixed_sum(std::span<const double> v);

}  // namespace serial

}  // namespace physedit::kernels
