#include "pwlip/baselines.hpp"
#include "pwlip/bnb.hpp"
#include "pwlip/error.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace pwlip;
using namespace pwlip::testing;

namespace {

const NormPair kTwo{NormOrder::Two};
const NormPair kInfNorm{NormOrder::Inf};

Network affine_net(const Matrix& w) {
    std::vector<Layer> layers{{w, Vector::Zero(w.rows()), make_identity(w.rows())}};
    return Network(std::move(layers));
}

Network relu_sum_net() {
    std::vector<Layer> layers{{Matrix::Identity(2, 2), Vector::Zero(2), make_relu(2)},
                              {Matrix::Ones(1, 2), Vector::Zero(1), make_identity(1)}};
    return Network(std::move(layers));
}

}  // namespace

TEST_CASE("layerwise_bound examples") {
    CHECK(layerwise_bound(abs_net(), kTwo) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(layerwise_bound(affine_net(2 * Matrix::Identity(2, 2)), kTwo) == doctest::Approx(2.0));
    // orthonormal weights around a MaxMin layer
    const double c = std::cos(0.3), s = std::sin(0.3);
    std::vector<Layer> layers{{Matrix{{c, -s}, {s, c}}, Vector::Zero(2), make_maxmin(2)},
                              {Matrix{{c, s}, {-s, c}}, Vector::Zero(2), make_identity(2)}};
    CHECK(layerwise_bound(Network(std::move(layers)), kTwo) == doctest::Approx(1.0).epsilon(1e-12));
    try {
        layerwise_bound(abs_net(), NormPair(NormOrder::One, NormOrder::Two));
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnsupportedNorm);
    }
}

TEST_CASE("symprop_bound examples") {
    CHECK(symprop_bound(abs_net(), Polyhedron(1), kTwo) == doctest::Approx(1.0).epsilon(1e-12));
    // fixed linear on [1, 2]: exact
    CHECK(symprop_bound(abs_net(), Polyhedron::hypercube(1, 1, 2), kTwo) == doctest::Approx(1.0).epsilon(1e-12));
    // no cancellation: envelope [[1, 1]]
    CHECK(symprop_bound(relu_sum_net(), Polyhedron(2), kInfNorm) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(symprop_bound(relu_sum_net(), Polyhedron(2), kTwo) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("sampled_lower_bound examples") {
    for (std::uint64_t seed : {0u, 1u, 2u})
        CHECK(sampled_lower_bound(abs_net(), Polyhedron::hypercube(1, -1, 1), kTwo, 10, seed) == 1.0);
    CHECK(sampled_lower_bound(abs_net(), Polyhedron::hypercube(1, -1, 1), kTwo, 0, 0) == 0.0);
    CHECK(sampled_lower_bound(affine_net(2 * Matrix::Identity(2, 2)), Polyhedron(2), kTwo, 1, 5) ==
          doctest::Approx(2.0));
    try {
        sampled_lower_bound(abs_net(), Polyhedron(Matrix{{1}, {-1}}, Vector::Constant(2, -1)), kTwo, 5, 0);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Infeasible);
    }
}

TEST_CASE("sampler honours the region and gives up on thin regions") {
    Polyhedron tri(Matrix{{1, 1}, {-1, 0}, {0, -1}}, Vector::Map(std::vector<double>{1, 0, 0}.data(), 3));
    RegionSampler s(tri, 3);
    for (int i = 0; i < 500; ++i) CHECK(tri.contains(s.draw(1000), 0.0));
    // |x1 - x2| <= 1e-7 inside the unit square: the bounding box is the whole square
    Polyhedron sliver = stack(Polyhedron::hypercube(2, 0, 1), Polyhedron(Matrix{{1, -1}, {-1, 1}}, Vector::Constant(2, 1e-7)));
    RegionSampler thin(sliver, 4);
    CHECK_THROWS_AS(thin.draw(100), Error);
}

TEST_CASE("property: estimator ordering") {
    Rng rng(81);
    for (int n = 0; n < 20; ++n) {
        const Network net = random_small_net(rng);
        const Polyhedron global(net.input_dim());
        const Polyhedron box = Polyhedron::hypercube(net.input_dim(), -1, 1);
        for (const auto& np : kSymmetricNorms) {
            SolverConfig c;
            c.norm = np;
            const auto rb = solve(net, box, c);
            const auto rg = solve(net, global, c);
            CHECK(sampled_lower_bound(net, box, np, 300, 7) <= rb.glb + 1e-9);
            CHECK(rb.gub <= symprop_bound(net, box, np) + 1e-9);
            CHECK(rg.gub <= symprop_bound(net, global, np) + 1e-9);
            CHECK(rg.gub <= layerwise_bound(net, np) + 1e-9);
        }
    }
}

TEST_CASE("property: sampling is deterministic per seed") {
    Rng rng(82);
    for (int n = 0; n < 10; ++n) {
        const Network net = random_small_net(rng);
        const Polyhedron box = Polyhedron::hypercube(net.input_dim(), -1, 1);
        CHECK(sampled_lower_bound(net, box, kTwo, 200, 42) == sampled_lower_bound(net, box, kTwo, 200, 42));
    }
}
