#include "doctest.h"

#include "oracles.hpp"
#include "relbias/error.hpp"
#include "relbias/fusion.hpp"

#include <vector>

using namespace relbias;

TEST_CASE("dr_compute is elementwise absolute difference") {
    const std::vector<double> a{1, 0, 1, 0};
    const std::vector<double> b{1, 1, 0, 0};
    CHECK(dr_compute(a, b) == std::vector<double>{0, 1, 1, 0});
    const std::vector<double> s{-1, 1};
    const std::vector<double> t{1, 1};
    CHECK(dr_compute(s, t) == std::vector<double>{2, 0});
    const std::vector<double> short_v{1};
    CHECK_THROWS_AS(dr_compute(a, short_v), ConfigError);
}

TEST_CASE("dr_compute is zero exactly on equal pairs (exhaustive n <= 6)") {
    for (int n = 1; n <= 6; ++n) {
        const std::uint64_t count = std::uint64_t{1} << n;
        for (std::uint64_t i = 0; i < count; ++i) {
            for (std::uint64_t j = 0; j < count; ++j) {
                const auto p = data::encode({data::index_to_bits(i, n), data::index_to_bits(j, n)},
                                            data::Representation::zero_one);
                const auto dr = dr_compute(std::span(p).first(n), std::span(p).subspan(n));
                const bool all_zero = std::all_of(dr.begin(), dr.end(), [](double v) { return v == 0.0; });
                CHECK(all_zero == (i == j));
            }
        }
    }
}

TEST_CASE("parameter counts and fan-in per fusion mode") {
    ModelSpec spec;
    spec.vector_dim = 10;
    spec.hidden_sizes = {10};
    spec.fusion = FusionMode::plain;
    CHECK(spec.trainable_parameter_count() == 221);
    CHECK(spec.first_layer_fan_in() == 20);

    spec.fusion = FusionMode::early;
    CHECK(spec.first_layer_fan_in() == 30);
    CHECK(spec.trainable_parameter_count() == 30 * 10 + 10 + 11);

    spec.fusion = FusionMode::mid;
    const auto shapes = spec.layer_shapes();
    REQUIRE(shapes.size() == 2);
    CHECK(shapes[0].in_dim == 20);
    CHECK(shapes[1].in_dim == 20);
    CHECK(spec.trainable_parameter_count() == 210 + 21);

    // DR joins only after the first hidden layer.
    spec.hidden_sizes = {7, 5};
    const auto deep = spec.layer_shapes();
    REQUIRE(deep.size() == 3);
    CHECK(deep[1].in_dim == 17);
    CHECK(deep[2].in_dim == 5);
}

TEST_CASE("ModelSpec validation") {
    ModelSpec spec;
    spec.vector_dim = 0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = {};
    spec.hidden_sizes = {};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = {};
    spec.hidden_sizes = {4, 0};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    CHECK(parse_fusion("mid") == FusionMode::mid);
    CHECK_THROWS_AS(parse_fusion("late"), UsageError);
}

TEST_CASE("forward outputs a probability and rejects wrong widths") {
    ModelSpec spec;
    spec.vector_dim = 4;
    for (auto fusion : {FusionMode::plain, FusionMode::early, FusionMode::mid}) {
        spec.fusion = fusion;
        const auto model = build_model(spec, 3);
        const std::vector<double> x{1, 0, 1, 1, 0, 0, 1, 1};
        const double p = model.forward(x);
        CHECK(p > 0.0);
        CHECK(p < 1.0);
        const std::vector<double> bad{1, 0, 1};
        CHECK_THROWS_AS(model.forward(bad), ConfigError);
    }
}

TEST_CASE("analytic gradients match finite differences on random networks") {
    for (std::uint64_t seed = 0; seed < 27; ++seed) {
        auto c = oracle::random_gradient_case(seed);
        auto model = oracle::gradient_model(c, seed + 100);
        const auto batch = oracle::as_batch(c);
        INFO("seed " << seed << " " << c.spec.describe());
        CHECK(oracle::max_gradient_rel_error(model, batch) < oracle::kGradientTolerance);
    }
}

TEST_CASE("hand-set mid-fusion readout separates equal from unequal pairs") {
    for (int n = 1; n <= 5; ++n) {
        const auto model = make_dr_readout_model(n);
        const std::uint64_t count = std::uint64_t{1} << n;
        for (std::uint64_t i = 0; i < count; ++i) {
            for (std::uint64_t j = 0; j < count; ++j) {
                const double p = model.forward_pair({data::index_to_bits(i, n), data::index_to_bits(j, n)});
                CHECK((p >= 0.5) == (i == j));
            }
        }
    }
}
