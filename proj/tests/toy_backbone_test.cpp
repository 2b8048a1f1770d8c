#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>

#include <doctest.h>

#include "physedit/errors.hpp"
#include "physedit/latent.hpp"
#include "physedit/sampler.hpp"
#include "physedit/toy_backbone.hpp"

using namespace physedit;

namespace {

ScenarioSpec demo_spec() {
    ScenarioSpec spec;
    spec.channels = 2;
    spec.height = 6;
    spec.width = 7;
    spec.kind = EditKind::RegionReplace;
    spec.region_y0 = 1;
    spec.region_x0 = 2;
    spec.region_h = 3;
    spec.region_w = 4;
    spec.magnitude = 2.5;
    spec.trajectory_frames = 5;
    spec.instruction = "replace the lamp with a plant";
    spec.expected_complexity = ComplexityLevel::Medium;
    return spec;
}

double max_abs_diff(const LatentFrame& a, const LatentFrame& b) {
    REQUIRE(a.same_shape(b));
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    }
    return worst;
}

}  // namespace

TEST_CASE("edit kind names round-trip") {
    for (EditKind kind : {EditKind::RegionRecolor, EditKind::RegionReplace,
                          EditKind::GlobalShift}) {
        CHECK(parse_edit_kind(edit_kind_name(kind)) == kind);
    }
    CHECK_THROWS_AS(parse_edit_kind("recolor"), ParseError);
    CHECK_THROWS_AS(parse_edit_kind(""), ParseError);
}

TEST_CASE("make_scenario builds a consistent ground truth") {
    const Scenario scenario = make_scenario(demo_spec(), 42);

    CHECK(scenario.instruction == "replace the lamp with a plant");
    CHECK(scenario.expected_complexity == ComplexityLevel::Medium);
    REQUIRE(scenario.targets.frame_count() == 5);

    // Frame 0 of the trajectory is the reference, bit for bit.
    CHECK(scenario.targets.frames[0].values == scenario.reference.values);

    // The final target differs from the reference by the magnitude inside the
    // locus and matches it exactly outside.
    const LatentFrame& fin = scenario.final_target();
    for (int c = 0; c < 2; ++c) {
        for (int y = 0; y < 6; ++y) {
            for (int x = 0; x < 7; ++x) {
                const bool inside = y >= 1 && y < 4 && x >= 2 && x < 6;
                CHECK(scenario.gt_region.at(y, x) == (inside ? 1.0 : 0.0));
                if (inside) {
                    CHECK(fin.at(c, y, x) ==
                          doctest::Approx(scenario.reference.at(c, y, x) + 2.5));
                } else {
                    CHECK(fin.at(c, y, x) == scenario.reference.at(c, y, x));
                }
            }
        }
    }

    // Intermediates blend linearly: frame j sits at u = j / (F - 1).
    for (int j = 1; j < 4; ++j) {
        const double u = static_cast<double>(j) / 4.0;
        const LatentFrame& frame = scenario.targets.frames[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < frame.size(); ++i) {
            const double expected =
                scenario.reference.values[i] +
                u * (fin.values[i] - scenario.reference.values[i]);
            CHECK(frame.values[i] == doctest::Approx(expected).epsilon(1e-12));
        }
    }

    // Same spec + same seed reproduces the scenario bit for bit.
    const Scenario again = make_scenario(demo_spec(), 42);
    CHECK(again.reference.values == scenario.reference.values);
    CHECK(again.targets.bit_equal(scenario.targets));
    const Scenario other = make_scenario(demo_spec(), 43);
    CHECK_FALSE(other.reference.values == scenario.reference.values);
}

TEST_CASE("global shifts edit every cell; zero magnitude edits none") {
    ScenarioSpec spec = demo_spec();
    spec.kind = EditKind::GlobalShift;
    const Scenario global = make_scenario(spec, 1);
    for (double v : global.gt_region.values) CHECK(v == 1.0);
    CHECK(max_abs_diff(global.final_target(), global.reference) ==
          doctest::Approx(2.5));

    ScenarioSpec still = demo_spec();
    still.magnitude = 0.0;
    const Scenario quiet = make_scenario(still, 1);
    CHECK(quiet.final_target().values == quiet.reference.values);
}

TEST_CASE("make_scenario validates the spec") {
    ScenarioSpec spec = demo_spec();
    spec.region_x0 = 4;  // 4 + 4 > 7
    CHECK_THROWS_AS(make_scenario(spec, 1), DimensionError);
    spec = demo_spec();
    spec.region_h = 0;
    CHECK_THROWS_AS(make_scenario(spec, 1), DimensionError);
    spec = demo_spec();
    spec.trajectory_frames = 1;
    CHECK_THROWS_AS(make_scenario(spec, 1), DimensionError);
    spec = demo_spec();
    spec.channels = 0;
    CHECK_THROWS_AS(make_scenario(spec, 1), DimensionError);
    spec = demo_spec();
    spec.magnitude = std::nan("");
    CHECK_THROWS_AS(make_scenario(spec, 1), InputError);

    // GlobalShift ignores the rectangle, so an out-of-grid region is fine.
    spec = demo_spec();
    spec.kind = EditKind::GlobalShift;
    spec.region_x0 = 100;
    CHECK_NOTHROW(make_scenario(spec, 1));
}

TEST_CASE("synth_attention concentrates on the edit locus") {
    const Scenario scenario = make_scenario(demo_spec(), 7);
    AttentionParams params;
    params.signal = 4.0;
    params.noise_level = 0.0;
    const AttentionMaps maps = synth_attention(scenario, params, 3, 9);

    CHECK(maps.tokens == 3);
    CHECK(maps.heads == 2);
    CHECK(maps.frames == 3);
    CHECK(maps.layer == 12);
    CHECK_NOTHROW(maps.validate());
    for (int tok = 0; tok < maps.tokens; ++tok) {
        for (int hd = 0; hd < maps.heads; ++hd) {
            for (int f = 0; f < maps.frames; ++f) {
                CHECK(maps.at(tok, hd, f, 2, 3) == 4.0);   // inside
                CHECK(maps.at(tok, hd, f, 0, 0) == 0.0);  // outside
            }
        }
    }

    // Noise lives in [0, noise_level) and is seed-deterministic.
    params.noise_level = 0.25;
    const AttentionMaps noisy = synth_attention(scenario, params, 3, 9);
    const AttentionMaps noisy_again = synth_attention(scenario, params, 3, 9);
    CHECK(noisy.weights == noisy_again.weights);
    bool saw_nonzero = false;
    for (std::size_t i = 0; i < noisy.weights.size(); ++i) {
        const double delta = noisy.weights[i] - maps.weights[i];
        CHECK(delta >= 0.0);
        CHECK(delta < 0.25);
        saw_nonzero = saw_nonzero || delta > 0.0;
    }
    CHECK(saw_nonzero);
    const AttentionMaps reseeded = synth_attention(scenario, params, 3, 10);
    CHECK_FALSE(reseeded.weights == noisy.weights);

    CHECK_THROWS_AS(synth_attention(scenario, params, 0, 9), InputError);
    params.signal = -1.0;
    CHECK_THROWS_AS(synth_attention(scenario, params, 3, 9), InputError);
}

TEST_CASE("oracle_velocity points at the per-frame targets") {
    const Scenario scenario = make_scenario(demo_spec(), 3);
    LatentStack z;
    z.frames = {scenario.reference, LatentFrame(2, 6, 7, 0.0)};
    LatentStack targets;
    targets.frames = {scenario.reference, scenario.final_target()};

    // At t = 1 the velocity is exactly z - target (division by 1.0).
    const VelocityStack v1 = oracle_velocity(z, 1.0, targets);
    for (std::size_t i = 0; i < v1.frames[1].size(); ++i) {
        CHECK(v1.frames[1].values[i] ==
              0.0 - scenario.final_target().values[i]);
    }
    // A frame already sitting on its target has zero velocity.
    for (double v : v1.frames[0].values) CHECK(v == 0.0);

    // At t = 0 every velocity is zero by convention.
    const VelocityStack v0 = oracle_velocity(z, 0.0, targets);
    for (const LatentFrame& frame : v0.frames) {
        for (double v : frame.values) CHECK(v == 0.0);
    }

    // At t = 0.5 the magnitude doubles relative to t = 1.
    const VelocityStack vh = oracle_velocity(z, 0.5, targets);
    for (std::size_t i = 0; i < vh.frames[1].size(); ++i) {
        CHECK(vh.frames[1].values[i] ==
              doctest::Approx(2.0 * v1.frames[1].values[i]).epsilon(1e-12));
    }

    LatentStack bad;
    CHECK_THROWS_AS(oracle_velocity(bad, 0.5, targets), DimensionError);
    LatentStack wrong;
    wrong.frames = {LatentFrame(1, 6, 7, 0.0), LatentFrame(1, 6, 7, 0.0)};
    CHECK_THROWS_AS(oracle_velocity(wrong, 0.5, targets), DimensionError);
}

TEST_CASE("one oracle Euler step lands back on the interpolant") {
    const Scenario scenario = make_scenario(demo_spec(), 5);
    NoiseSource noise(17);
    const LatentStack eps = sample_noise(noise, 2, 2, 6, 7);
    LatentStack targets;
    targets.frames = {scenario.reference, scenario.final_target()};

    // Start on the interpolant at t = 0.8 and step to t = 0.3.
    LatentStack z;
    z.frames = {interpolate_latent(targets.frames[0], eps.frames[0], 0.8),
                interpolate_latent(targets.frames[1], eps.frames[1], 0.8)};
    const VelocityStack v = oracle_velocity(z, 0.8, targets);
    const LatentStack stepped = euler_step(z, v, 0.8, 0.3);
    for (int f = 0; f < 2; ++f) {
        const LatentFrame expected = interpolate_latent(
            targets.frames[static_cast<std::size_t>(f)],
            eps.frames[static_cast<std::size_t>(f)], 0.3);
        CHECK(max_abs_diff(stepped.frames[static_cast<std::size_t>(f)],
                           expected) < 1e-12);
    }
}

TEST_CASE("OracleBackbone resamples targets to the stack length") {
    const Scenario scenario = make_scenario(demo_spec(), 21);
    const OracleBackbone backbone(scenario, AttentionParams{}, 99);

    // 2-frame stack of zeros at t = 1: velocity of the output frame is
    // -final_target, conditioning frame is -reference.
    LatentStack pair;
    pair.frames = {LatentFrame(2, 6, 7, 0.0), LatentFrame(2, 6, 7, 0.0)};
    const VelocityStack v = backbone.evaluate(pair, 1.0, "x", scenario.reference,
                                              nullptr);
    for (std::size_t i = 0; i < v.frames[1].size(); ++i) {
        CHECK(v.frames[0].values[i] == 0.0 - scenario.reference.values[i]);
        CHECK(v.frames[1].values[i] == 0.0 - scenario.final_target().values[i]);
    }

    // 5-frame stack: interior frame f targets the u = f/4 blend.
    LatentStack five;
    for (int f = 0; f < 5; ++f) five.frames.push_back(LatentFrame(2, 6, 7, 0.0));
    const VelocityStack v5 = backbone.evaluate(five, 1.0, "x",
                                               scenario.reference, nullptr);
    for (int f = 1; f < 4; ++f) {
        const double u = static_cast<double>(f) / 4.0;
        for (std::size_t i = 0; i < v5.frames[0].size(); ++i) {
            const double target =
                scenario.reference.values[i] +
                u * (scenario.final_target().values[i] -
                     scenario.reference.values[i]);
            CHECK(v5.frames[static_cast<std::size_t>(f)].values[i] ==
                  doctest::Approx(0.0 - target).epsilon(1e-12));
        }
    }

    // Attention comes back when requested, sized to the stack.
    AttentionMaps attention;
    (void)backbone.evaluate(five, 1.0, "x", scenario.reference, &attention);
    CHECK(attention.frames == 5);
    CHECK(attention.tokens == 3);
    CHECK(attention.heads == 2);
    CHECK_NOTHROW(attention.validate());

    CHECK(backbone.provides_attention());
    const std::unique_ptr<Backbone> copy = backbone.clone();
    const VelocityStack vc = copy->evaluate(pair, 1.0, "x", scenario.reference,
                                            nullptr);
    CHECK(vc.frames[1].values == v.frames[1].values);
}

TEST_CASE("PerturbedBackbone adds reproducible noise") {
    const Scenario scenario = make_scenario(demo_spec(), 33);
    auto make_oracle = [&] {
        return std::make_unique<OracleBackbone>(scenario, AttentionParams{}, 1);
    };
    LatentStack z;
    z.frames = {scenario.reference, LatentFrame(2, 6, 7, 0.0)};

    // Scale 0 is the exact identity wrapper.
    const PerturbedBackbone clean(make_oracle(), 0.0, 5);
    const VelocityStack base =
        make_oracle()->evaluate(z, 0.5, "x", scenario.reference, nullptr);
    const VelocityStack same = clean.evaluate(z, 0.5, "x", scenario.reference,
                                              nullptr);
    CHECK(same.bit_equal(base));

    const PerturbedBackbone noisy(make_oracle(), 0.05, 5);
    const VelocityStack a = noisy.evaluate(z, 0.5, "x", scenario.reference,
                                           nullptr);
    const VelocityStack b = noisy.evaluate(z, 0.5, "x", scenario.reference,
                                           nullptr);
    CHECK(a.bit_equal(b));
    CHECK_FALSE(a.bit_equal(base));

    // The perturbation depends on t and on the seed.
    const VelocityStack at_other_t = noisy.evaluate(z, 0.25, "x",
                                                    scenario.reference, nullptr);
    const VelocityStack base_other_t =
        make_oracle()->evaluate(z, 0.25, "x", scenario.reference, nullptr);
    LatentFrame delta_a(2, 6, 7);
    LatentFrame delta_b(2, 6, 7);
    for (std::size_t i = 0; i < delta_a.size(); ++i) {
        delta_a.values[i] = a.frames[1].values[i] - base.frames[1].values[i];
        delta_b.values[i] =
            at_other_t.frames[1].values[i] - base_other_t.frames[1].values[i];
    }
    CHECK_FALSE(delta_a.values == delta_b.values);

    const PerturbedBackbone reseeded(make_oracle(), 0.05, 6);
    const VelocityStack c = reseeded.evaluate(z, 0.5, "x", scenario.reference,
                                              nullptr);
    CHECK_FALSE(c.bit_equal(a));

    // Perturbation magnitudes track the scale.
    double worst = 0.0;
    for (std::size_t i = 0; i < delta_a.size(); ++i) {
        worst = std::max(worst, std::abs(delta_a.values[i]));
    }
    CHECK(worst > 0.0);
    CHECK(worst < 0.05 * 6.0);  // ~N(0, 0.05), six sigma

    // Clones behave identically and attention passes through.
    const std::unique_ptr<Backbone> copy = noisy.clone();
    CHECK(copy->provides_attention());
    const VelocityStack d = copy->evaluate(z, 0.5, "x", scenario.reference,
                                           nullptr);
    CHECK(d.bit_equal(a));

    CHECK_THROWS_AS(PerturbedBackbone(nullptr, 0.05, 5), InputError);
    CHECK_THROWS_AS(PerturbedBackbone(make_oracle(), -0.1, 5), InputError);
    CHECK_THROWS_AS(PerturbedBackbone(make_oracle(), std::nan(""), 5),
                    InputError);
}

TEST_CASE("perturbed runs still approach the target") {
    const ScenarioSpec spec = demo_spec();
    const Scenario scenario = make_scenario(spec, 8);
    const PerturbedBackbone backbone(
        std::make_unique<OracleBackbone>(scenario, AttentionParams{}, 2), 0.05,
        77);
    BaselineOptions options;
    const EditResult result =
        run_baseline(backbone, scenario.reference, spec.instruction, options);
    // Noise of scale 0.05 cannot push the 30-step result far off the target.
    CHECK(max_abs_diff(result.final_frame, scenario.final_target()) < 0.1);
    // But it must not be bit-exact either — the perturbation is real.
    CHECK(max_abs_diff(result.final_frame, scenario.final_target()) > 0.0);
}
