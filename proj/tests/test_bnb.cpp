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

Vector v1(double a) { return Vector::Constant(1, a); }

Network affine_net(const Matrix& w) {
    std::vector<Layer> layers{{w, Vector::Zero(w.rows()), make_identity(w.rows())}};
    return Network(std::move(layers));
}

// y = ReLU(x1) + ReLU(x2)
Network relu_sum_net() {
    std::vector<Layer> layers{{Matrix::Identity(2, 2), Vector::Zero(2), make_relu(2)},
                              {Matrix::Ones(1, 2), Vector::Zero(1), make_identity(1)}};
    return Network(std::move(layers));
}

SolverConfig config(NormPair np = kTwo) {
    SolverConfig c;
    c.norm = np;
    return c;
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("upper_bound examples") {
    const Network abs = abs_net();
    CHECK(make_root(abs, Polyhedron(1), kTwo).upper == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(make_root(abs, Polyhedron::hypercube(1, 1, 2), kTwo).upper == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(make_root(affine_net(2 * Matrix::Identity(2, 2)), Polyhedron(2), kTwo).upper == doctest::Approx(2.0));
}

TEST_CASE("branch splits |x| into two solved children") {
    const Network net = abs_net();
    const Subproblem root = make_root(net, Polyhedron::hypercube(1, -1, 1), kTwo);
    REQUIRE(root.first_star() == 1);
    const auto br = branch(root, net, 0.0, kTwo);
    REQUIRE(br.children.size() == 2);
    CHECK(br.glb == doctest::Approx(1.0));
    for (const auto& c : br.children) {
        CHECK(c.solved);
        CHECK(c.sub.first_star() == 3);
        CHECK(c.sub.upper == doctest::Approx(1.0));
        CHECK(std::abs(c.sub.prefix.J(0, 0)) == doctest::Approx(1.0));
    }
    CHECK(br.children[0].sub.region.contains(v1(-0.5)) != br.children[1].sub.region.contains(v1(-0.5)));
    CHECK(br.children[0].sub.region.contains(v1(0.5)) != br.children[1].sub.region.contains(v1(0.5)));
}

TEST_CASE("branch on a MaxMin group fixes both members") {
    Rng rng(71);
    std::vector<Layer> layers{{Matrix::Identity(2, 2), Vector::Zero(2), make_maxmin(2)},
                              {random_matrix(rng, 1, 2), Vector::Zero(1), make_identity(1)}};
    const Network net(std::move(layers));
    const Subproblem root = make_root(net, Polyhedron::hypercube(2, -1, 1), kTwo);
    REQUIRE(root.pattern.stars[0] == std::vector<Eigen::Index>{0, 1});
    const auto br = branch(root, net, 0.0, kTwo);
    CHECK(br.children.size() == 2);
    for (const auto& c : br.children) {
        CHECK(c.sub.pattern.stars[0].empty());
        CHECK(c.solved);
    }
}

TEST_CASE("branch omits children with an empty region") {
    // the second ReLU sees x + 10 > 0 on the whole region: only one piece meets it
    std::vector<Layer> layers{{Matrix{{1}, {1}}, Vector::Map(std::vector<double>{0, 10}.data(), 2), make_relu(2)},
                              {Matrix{{1, 1}}, Vector::Zero(1), make_identity(1)}};
    const Network net(std::move(layers));
    const Subproblem root = make_root(net, Polyhedron::hypercube(1, -1, 1), kTwo);
    CHECK(root.pattern.stars[0] == std::vector<Eigen::Index>{0});
    CHECK(branch(root, net, 0.0, kTwo).children.size() == 2);
    const Subproblem solved = make_root(net, Polyhedron::hypercube(1, 1, 2), kTwo);
    CHECK_THROWS_AS(branch(solved, net, 0.0, kTwo), Error);
}

TEST_CASE("ffilter keeps a genuinely mixed neuron starred") {
    const Network net = relu_sum_net();
    const Subproblem root = make_root(net, Polyhedron::hypercube(2, -1, 1), kTwo);
    REQUIRE(root.pattern.stars[0] == (std::vector<Eigen::Index>{0, 1}));
    const auto br = branch(root, net, 0.0, kTwo);
    REQUIRE(br.children.size() == 2);
    for (const auto& c : br.children) {
        CHECK(c.sub.first_star() == 1);
        CHECK(c.sub.pattern.stars[0] == std::vector<Eigen::Index>{1});
        CHECK_FALSE(c.solved);
    }
}

TEST_CASE("ffilter folds identity layers") {
    Rng rng(72);
    std::vector<Layer> layers{{random_matrix(rng, 2, 2), Vector::Zero(2), make_identity(2)},
                              {Matrix::Identity(2, 2), Vector::Zero(2), make_relu(2)},
                              {Matrix::Ones(1, 2), Vector::Zero(1), make_identity(1)}};
    const Network net(std::move(layers));
    Subproblem root = make_root(net, Polyhedron::hypercube(2, -1, 1), kTwo);
    CHECK(root.first_star() == 2);
    CHECK(root.prefix.J.isApprox(net.layer(1).W));
    const Subproblem again = ffilter(root, net);
    CHECK(again.first_star() == 2);
}

TEST_CASE("solve examples") {
    const Network abs = abs_net();
    auto r = solve(abs, Polyhedron(1), config());
    CHECK(r.glb == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.gub == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.status == SolveStatus::Exact);

    r = solve(affine_net(2 * Matrix::Identity(2, 2)), Polyhedron::hypercube(2, -1, 1), config());
    CHECK(r.glb == doctest::Approx(2.0));
    CHECK(r.gub == doctest::Approx(2.0));
    CHECK(r.iterations == 0);
    CHECK(r.status == SolveStatus::Exact);

    auto c = config();
    c.theta = 2;
    c.sample_count = 100;
    r = solve(abs, Polyhedron::hypercube(1, -1, 1), c);
    CHECK(r.iterations == 0);
    CHECK(r.initial_glb == doctest::Approx(1.0));
    CHECK(r.gub <= 2 * r.glb);

    Rng rng(73);
    const Network mm = make_net(rng, 2, {4, 4}, {HiddenKind::MaxMin, HiddenKind::ReLU}, 1);
    c = config();
    c.time_limit = 0.0;
    r = solve(mm, Polyhedron::hypercube(2, -1, 1), c);
    CHECK(r.status == SolveStatus::TimeLimit);
    CHECK(r.glb <= r.gub);
    const auto exact = brute_force_oracle(mm, Polyhedron::hypercube(2, -1, 1), kTwo).value;
    CHECK(r.gub >= exact - 1e-9);

    c = config();
    c.max_iterations = 1;
    r = solve(mm, Polyhedron::hypercube(2, -1, 1), c);
    if (r.status != SolveStatus::Exact) CHECK(r.status == SolveStatus::IterationLimit);
    CHECK(r.iterations <= 1);

    c = config();
    c.time_limit = 0.0;
    CHECK(solve(affine_net(Matrix::Identity(2, 2)), Polyhedron(2), c).status == SolveStatus::Exact);
}

TEST_CASE("solver config validation") {
    auto c = config();
    c.theta = 0.5;
    CHECK_THROWS_AS(solve(abs_net(), Polyhedron(1), c), Error);
    c = config();
    c.threads = 0;
    CHECK_THROWS_AS(solve(abs_net(), Polyhedron(1), c), Error);
    CHECK(to_string(SolveStatus::ApproxReached) == "approx_reached");
    CHECK(to_string(SolveStatus::IterationLimit) == "iteration_limit");
}

TEST_CASE("cancelling ReLU paths: ReLU(x) - ReLU(-x) = x has constant 1") {
    std::vector<Layer> layers{{Matrix{{1}, {-1}}, Vector::Zero(2), make_relu(2)},
                              {Matrix{{1, -1}}, Vector::Zero(1), make_identity(1)}};
    const Network net(std::move(layers));
    for (const auto& omega : {Polyhedron(1), Polyhedron::hypercube(1, -1, 1)}) {
        CHECK(solve(net, omega, config()).gub == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(brute_force_oracle(net, omega, kTwo).value == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("oracle examples") {
    const auto r = brute_force_oracle(abs_net(), Polyhedron(1), kTwo);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.combinations == 4);
    CHECK(r.feasible == 2);

    Matrix w(2, 2);
    w << 1, -2, 3, 4;
    CHECK(brute_force_oracle(affine_net(w), Polyhedron(2), NormPair(NormOrder::One)).value == 6.0);

    // pre-activations x + 5 and 2x + 5 stay positive on [-1, 1]
    std::vector<Layer> layers{{Matrix{{1}, {2}}, Vector::Constant(2, 5), make_relu(2)},
                              {Matrix{{1, 1}}, Vector::Zero(1), make_identity(1)}};
    const auto one = brute_force_oracle(Network(std::move(layers)), Polyhedron::hypercube(1, -1, 1), kTwo);
    CHECK(one.feasible == 1);
    CHECK(one.value == doctest::Approx(3.0));
}

TEST_CASE("oracle guardrail") {
    Rng rng(74);
    const Network big = make_net(rng, 2, {30}, {HiddenKind::ReLU}, 1);
    CHECK(oracle_combinations(big) == std::pow(2.0, 30));
    try {
        brute_force_oracle(big, Polyhedron(2), kTwo);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Guardrail);
        CHECK(std::string(e.what()).find("1073741824") != std::string::npos);
    }
}

TEST_CASE("property: solve matches the oracle for every supported norm pair") {
    Rng rng(75);
    const NormPair pairs[] = {NormPair(NormOrder::One, NormOrder::Two), NormPair(NormOrder::One, NormOrder::Inf),
                              NormPair(NormOrder::Two, NormOrder::Inf), kSymmetricNorms[0], kSymmetricNorms[1],
                              kSymmetricNorms[2]};
    for (int n = 0; n < 12; ++n) {
        const Network net = random_small_net(rng);
        const Polyhedron omega = n % 3 == 0 ? Polyhedron(net.input_dim()) : Polyhedron::hypercube(net.input_dim(), -1, 1);
        for (const auto& np : pairs) {
            const auto r = solve(net, omega, config(np));
            const double exact = brute_force_oracle(net, omega, np).value;
            CAPTURE(np.to_string());
            CHECK(rel_close(exact, reference_constant(net, omega, np), 1e-9));
            CHECK(r.status == SolveStatus::Exact);
            CHECK(rel_close(r.gub, exact, 1e-6));
            CHECK(rel_close(r.glb, exact, 1e-6));
        }
    }
}

TEST_CASE("property: anytime sandwich and child soundness") {
    Rng rng(76);
    for (int n = 0; n < 10; ++n) {
        const Network net = random_small_net(rng);
        auto c = config();
        double last_glb = -1, last_gub = INFINITY;
        bool ok = true;
        c.on_iteration = [&](const IterationTrace& t) {
            ok = ok && t.glb >= last_glb && t.gub <= last_gub && t.glb <= t.gub;
            last_glb = t.glb;
            last_gub = t.gub;
        };
        solve(net, Polyhedron::hypercube(net.input_dim(), -1, 1), c);
        CHECK(ok);

        // every child bound is at most its parent's
        std::vector<Subproblem> stack{make_root(net, Polyhedron::hypercube(net.input_dim(), -1, 1), kTwo)};
        int visited = 0;
        while (!stack.empty() && visited < 50) {
            Subproblem s = std::move(stack.back());
            stack.pop_back();
            ++visited;
            if (s.first_star() > net.depth()) continue;
            for (auto& ch : branch(s, net, 0.0, kTwo).children) {
                CHECK(ch.sub.upper <= s.upper + 1e-9);
                stack.push_back(std::move(ch.sub));
            }
        }
    }
}

TEST_CASE("property: nested boxes give non-decreasing constants") {
    Rng rng(77);
    for (int n = 0; n < 8; ++n) {
        const Network net = random_small_net(rng);
        double prev = 0;
        for (double r : {0.1, 0.3, 1.0}) {
            const auto res = solve(net, Polyhedron::hypercube(net.input_dim(), -r, r), config());
            CHECK(res.gub >= prev - 1e-9);
            prev = res.gub;
        }
        CHECK(prev <= solve(net, Polyhedron(net.input_dim()), config()).gub + 1e-9);
    }
}

TEST_CASE("property: final bounds ignore exploration order and thread count") {
    Rng rng(78);
    for (int n = 0; n < 6; ++n) {
        const Network net = make_net(rng, 2, {4, 4}, {HiddenKind::ReLU, HiddenKind::MaxMin}, 2);
        const Polyhedron omega = Polyhedron::hypercube(2, -1, 1);
        const auto base = solve(net, omega, config());
        for (std::uint64_t seed : {1u, 99u}) {
            auto c = config();
            c.tie_break_seed = seed;
            const auto r = solve(net, omega, c);
            CHECK(r.gub == doctest::Approx(base.gub).epsilon(1e-9));
            CHECK(r.glb == doctest::Approx(base.glb).epsilon(1e-9));
        }
        auto c = config();
        c.threads = 3;
        const auto r = solve(net, omega, c);
        CHECK(r.gub == doctest::Approx(base.gub).epsilon(1e-9));
        CHECK(r.status == SolveStatus::Exact);
    }
}

TEST_CASE("theta terminates within the requested factor") {
    Rng rng(79);
    for (int n = 0; n < 8; ++n) {
        const Network net = random_small_net(rng);
        auto c = config();
        c.theta = 1.5;
        const auto r = solve(net, Polyhedron::hypercube(net.input_dim(), -1, 1), c);
        CHECK(r.gub <= 1.5 * r.glb + 1e-9);
        CHECK(r.glb <= brute_force_oracle(net, Polyhedron::hypercube(net.input_dim(), -1, 1), kTwo).value + 1e-9);
    }
}
