#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <doctest.h>

#include "physedit/errors.hpp"
#include "physedit/kernels.hpp"
#include "physedit/latent.hpp"

using namespace physedit;

TEST_CASE("LatentFrame stores plane-contiguous values") {
    LatentFrame f(2, 3, 4, 0.5);
    CHECK(f.size() == 24);
    CHECK(f.plane_size() == 12);
    CHECK(f.values[0] == 0.5);
    f.at(1, 2, 3) = -7.0;
    // [c][y][x] layout: (1*3 + 2)*4 + 3 = 23.
    CHECK(f.values[23] == -7.0);
    CHECK(f.at(1, 2, 3) == -7.0);
}

TEST_CASE("LatentFrame rejects non-positive dimensions") {
    CHECK_THROWS_AS(LatentFrame(0, 2, 2), DimensionError);
    CHECK_THROWS_AS(LatentFrame(1, -1, 2), DimensionError);
    CHECK_THROWS_AS(LatentFrame(1, 2, 0), DimensionError);
}

TEST_CASE("LatentFrame shape and finiteness guards") {
    LatentFrame a(1, 2, 2);
    LatentFrame b(1, 2, 3);
    CHECK(a.same_shape(a));
    CHECK_FALSE(a.same_shape(b));
    CHECK_THROWS_AS(a.require_same_shape(b, "test"), DimensionError);
    CHECK_NOTHROW(a.require_finite("test"));
    a.values[1] = std::nan("");
    CHECK_THROWS_AS(a.require_finite("test"), InputError);
    a.values[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(a.require_finite("test"), InputError);
}

TEST_CASE("LatentStack validation and bit equality") {
    LatentStack stack;
    CHECK_THROWS_AS(stack.validate("test"), DimensionError);

    stack.frames = {LatentFrame(1, 2, 2, 1.0), LatentFrame(1, 2, 2, 2.0)};
    CHECK_NOTHROW(stack.validate("test"));
    CHECK(stack.frame_count() == 2);
    CHECK(stack.total_values() == 8);

    LatentStack copy = stack;
    CHECK(stack.bit_equal(copy));
    copy.frames[1].values[3] =
        std::nextafter(copy.frames[1].values[3], 3.0);
    CHECK_FALSE(stack.bit_equal(copy));

    LatentStack shorter;
    shorter.frames = {stack.frames[0]};
    CHECK_FALSE(stack.bit_equal(shorter));
    CHECK_THROWS_AS(stack.require_same_shape(shorter, "test"), DimensionError);

    stack.frames.push_back(LatentFrame(1, 2, 3));
    CHECK_THROWS_AS(stack.validate("test"), DimensionError);
}

TEST_CASE("TimeSchedule requires strictly decreasing values") {
    const TimeSchedule ok({1.0, 0.5, 0.0});
    CHECK(ok.step_count() == 2);
    CHECK(ok.t_max() == 1.0);
    CHECK(ok.t_min() == 0.0);
    CHECK(ok[1] == 0.5);

    CHECK_THROWS_AS(TimeSchedule({1.0}), ScheduleError);
    CHECK_THROWS_AS(TimeSchedule({}), ScheduleError);
    CHECK_THROWS_AS(TimeSchedule({1.0, 1.0}), ScheduleError);
    CHECK_THROWS_AS(TimeSchedule({0.5, 0.7}), ScheduleError);
    CHECK_THROWS_AS(TimeSchedule({1.0, 0.5, 0.5}), ScheduleError);
    CHECK_THROWS_AS(TimeSchedule({1.0, std::nan(""), 0.0}), ScheduleError);
}

TEST_CASE("make_schedule spaces uniformly and pins the endpoints") {
    const TimeSchedule s = make_schedule(4, 0.8, 0.0);
    REQUIRE(s.steps().size() == 5);
    CHECK(s[0] == 0.8);  // endpoints are pinned bit-exactly
    CHECK(s[4] == 0.0);
    CHECK(s[1] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(s[2] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(s[3] == doctest::Approx(0.2).epsilon(1e-12));

    const TimeSchedule one = make_schedule(1, 1.0, 0.0);
    CHECK(one.step_count() == 1);
    CHECK(one[0] == 1.0);
    CHECK(one[1] == 0.0);

    const TimeSchedule sub = make_schedule(3, 0.9, 0.1);
    CHECK(sub.t_max() == 0.9);
    CHECK(sub.t_min() == 0.1);

    CHECK_THROWS_AS(make_schedule(0, 1.0, 0.0), ScheduleError);
    CHECK_THROWS_AS(make_schedule(-2, 1.0, 0.0), ScheduleError);
    CHECK_THROWS_AS(make_schedule(5, 0.0, 0.0), ScheduleError);
    CHECK_THROWS_AS(make_schedule(5, 0.2, 0.5), ScheduleError);
}

TEST_CASE("NoiseSource replays the counter stream") {
    NoiseSource a(42);
    NoiseSource b(42);
    for (int i = 0; i < 16; ++i) {
        const double expected = kernels::counter_normal(42, static_cast<std::uint64_t>(i));
        CHECK(a.next_normal() == expected);
        CHECK(b.next_normal() == expected);
    }
    CHECK(a.position() == 16);

    NoiseSource other(43);
    bool all_equal = true;
    NoiseSource again(42);
    for (int i = 0; i < 16; ++i) {
        all_equal = all_equal && (other.next_normal() == again.next_normal());
    }
    CHECK_FALSE(all_equal);
}

TEST_CASE("NoiseSource skip and fork") {
    NoiseSource src(7);
    src.skip(5);
    CHECK(src.position() == 5);
    CHECK(src.next_normal() == kernels::counter_normal(7, 5));

    const NoiseSource base(7);
    NoiseSource f1 = base.fork(1);
    NoiseSource f2 = base.fork(2);
    NoiseSource f1_again = base.fork(1);
    CHECK(f1.seed() == kernels::derive_stream(7, 1));
    CHECK(f1.seed() != f2.seed());
    CHECK(f1.seed() != base.seed());
    CHECK(f1.position() == 0);
    CHECK(f1.next_normal() == f1_again.next_normal());
    CHECK(f1.next_normal() != f2.next_normal());
}

TEST_CASE("sample_noise fills frames along the stream") {
    NoiseSource src(99);
    const LatentStack stack = sample_noise(src, 3, 2, 4, 5);
    REQUIRE(stack.frame_count() == 3);
    CHECK(stack.frames[0].channels == 2);
    CHECK(stack.frames[0].height == 4);
    CHECK(stack.frames[0].width == 5);
    CHECK(src.position() == 3 * 2 * 4 * 5);

    // Bit-identical to drawing the same values one at a time.
    NoiseSource replay(99);
    for (const LatentFrame& frame : stack.frames) {
        for (double v : frame.values) {
            CHECK(v == replay.next_normal());
        }
    }

    // A second call continues the stream instead of restarting it.
    const LatentStack next = sample_noise(src, 1, 2, 4, 5);
    CHECK(next.frames[0].values[0] == kernels::counter_normal(99, 120));
    CHECK_FALSE(next.frames[0].values == stack.frames[0].values);

    NoiseSource bad(1);
    CHECK_THROWS_AS(sample_noise(bad, 0, 1, 2, 2), DimensionError);
    CHECK_THROWS_AS(sample_noise(bad, 1, 0, 2, 2), DimensionError);
}

TEST_CASE("sampled noise is approximately standard normal") {
    NoiseSource src(2026);
    const LatentStack stack = sample_noise(src, 4, 1, 100, 100);
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (const LatentFrame& frame : stack.frames) {
        for (double v : frame.values) {
            sum += v;
            sum_sq += v * v;
            ++n;
        }
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sum_sq / static_cast<double>(n) - mean * mean;
    CHECK(n == 40000);
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("interpolate_latent endpoints are exact") {
    LatentFrame z0(2, 3, 3);
    LatentFrame eps(2, 3, 3);
    NoiseSource src(5);
    for (double& v : z0.values) v = src.next_normal();
    for (double& v : eps.values) v = src.next_normal();

    // (1-t)*z0 + t*eps multiplies by exactly 1.0 and 0.0 at the endpoints.
    CHECK(interpolate_latent(z0, eps, 0.0).values == z0.values);
    CHECK(interpolate_latent(z0, eps, 1.0).values == eps.values);

    const LatentFrame mid = interpolate_latent(z0, eps, 0.25);
    for (std::size_t i = 0; i < mid.size(); ++i) {
        CHECK(mid.values[i] ==
              doctest::Approx(0.75 * z0.values[i] + 0.25 * eps.values[i])
                  .epsilon(1e-12));
    }

    LatentFrame wrong(2, 3, 4);
    CHECK_THROWS_AS(interpolate_latent(z0, wrong, 0.5), DimensionError);
    CHECK_THROWS_AS(interpolate_latent(z0, eps, 1.25), ScheduleError);
    CHECK_THROWS_AS(interpolate_latent(z0, eps, -0.1), ScheduleError);
    CHECK_THROWS_AS(interpolate_latent(z0, eps, std::nan("")), ScheduleError);
}
