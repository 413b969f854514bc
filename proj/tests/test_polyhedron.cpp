#include "pwlip/error.hpp"
#include "pwlip/polyhedron.hpp"
#include "pwlip/region_io.hpp"
#include "simplex.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace pwlip;
using namespace pwlip::testing;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Polyhedron half(const Vector& a, double b) { return Polyhedron(a.transpose(), Vector::Constant(1, b)); }

Vector v1(double a) { return Vector::Constant(1, a); }

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

Polyhedron random_polytope(Rng& rng, Eigen::Index d, int extra_rows) {
    // bounded: box plus random cuts through a neighbourhood of the origin
    Polyhedron p = Polyhedron::hypercube(d, -2, 2);
    Matrix c = random_matrix(rng, extra_rows, d);
    Vector b = random_vector(rng, extra_rows).cwiseAbs() + Vector::Constant(extra_rows, 0.1);
    return stack(p, Polyhedron(c, b));
}

}  // namespace

TEST_CASE("construction normalizes rows and drops duplicates") {
    Polyhedron p(Matrix{{3, 4}, {3, 4}, {0, 0}}, v1(10).replicate(3, 1));
    CHECK(p.num_constraints() == 1);
    CHECK(p.constraint_matrix().row(0).norm() == doctest::Approx(1.0));
    CHECK(p.bound_vector()(0) == doctest::Approx(2.0));
    CHECK(p.dim() == 2);
    CHECK(Polyhedron(3).unconstrained_space());
    // 0 <= -1 is kept as an infeasible system
    CHECK_FALSE(is_feasible(Polyhedron(Matrix::Zero(1, 2), v1(-1))));
}

TEST_CASE("stack examples") {
    const auto box = Polyhedron::hypercube(2, -1, 1);
    auto s = stack(Polyhedron(2), box);
    CHECK(s.num_constraints() == box.num_constraints());
    CHECK(s.constraint_matrix() == box.constraint_matrix());

    auto line = stack(half(v1(1), 0), half(v1(-1), 0));
    CHECK(line.num_constraints() == 2);
    CHECK(is_feasible(line));
    CHECK_FALSE(has_interior(line));

    Rng rng(1);
    Polyhedron a(random_matrix(rng, 3, 2), random_vector(rng, 3));
    Polyhedron b(random_matrix(rng, 2, 2), random_vector(rng, 2));
    auto ab = stack(a, b);
    CHECK(ab.num_constraints() == 5);
    CHECK(ab.dim() == 2);

    try {
        stack(Polyhedron(2), Polyhedron(3));
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Dimension);
    }
}

TEST_CASE("is_feasible examples") {
    CHECK_FALSE(is_feasible(stack(half(v1(1), -1), half(v1(-1), -1))));
    CHECK(is_feasible(stack(Polyhedron::hypercube(2, -1, 1), half(v2(1, 1), 3))));
    CHECK(is_feasible(stack(half(v2(1, 0), 0), half(v2(-1, 0), 0))));
    CHECK(is_feasible(Polyhedron(4)));
}

TEST_CASE("interior test") {
    CHECK(has_interior(Polyhedron::hypercube(2, 0, 1)));
    CHECK(has_interior(Polyhedron(2)));
    CHECK(has_interior(half(v2(1, 1), -5)));
    CHECK_FALSE(has_interior(Polyhedron::hypercube(2, 1, 1)));
    CHECK_FALSE(has_interior(stack(half(v1(1), -1), half(v1(-1), -1))));
    CHECK(inscribed_radius(Polyhedron::hypercube(2, 0, 0.5)) == doctest::Approx(0.25));
}

TEST_CASE("linear_bounds examples") {
    auto r = linear_bounds(Polyhedron::hypercube(2, -1, 1), v2(1, 0));
    CHECK(r.lo == doctest::Approx(-1));
    CHECK(r.hi == doctest::Approx(1));

    auto u = linear_bounds(Polyhedron(1), v1(1));
    CHECK(u.lo == -kInf);
    CHECK(u.hi == kInf);

    Polyhedron tri(Matrix{{1, 1}, {-1, 0}, {0, -1}}, Vector::Map(std::vector<double>{1, 0, 0}.data(), 3));
    auto t = linear_bounds(tri, v2(1, 1));
    CHECK(t.lo == doctest::Approx(0).epsilon(1e-12));
    CHECK(t.hi == doctest::Approx(1));

    auto half_line = linear_bounds(half(v2(1, 0), 2), v2(1, 0));
    CHECK(half_line.lo == -kInf);
    CHECK(half_line.hi == doctest::Approx(2));

    try {
        linear_bounds(stack(half(v1(1), -1), half(v1(-1), -1)), v1(1));
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Infeasible);
    }
}

TEST_CASE("affine_preimage examples") {
    auto p = affine_preimage(half(v1(1), 0), Matrix::Identity(1, 1), v1(0));
    CHECK(p.contains(v1(-0.5)));
    CHECK_FALSE(p.contains(v1(0.5)));

    auto q = affine_preimage(half(v1(1), 0), Matrix::Constant(1, 1, 2), v1(1));
    CHECK(q.contains(v1(-0.5)));
    CHECK_FALSE(q.contains(v1(-0.49)));

    auto r = affine_preimage(Polyhedron(3), Matrix::Ones(3, 2), Vector::Zero(3));
    CHECK(r.dim() == 2);
    CHECK(r.unconstrained_space());

    CHECK_THROWS_AS(affine_preimage(Polyhedron(3), Matrix::Ones(2, 2), Vector::Zero(2)), Error);
}

TEST_CASE("box with infinite sides") {
    auto b = Polyhedron::box(v2(-1, -kInf), v2(1, 3));
    CHECK(b.num_constraints() == 3);
    auto bb = bounding_box(b);
    CHECK(bb.lower(1) == -kInf);
    CHECK(bb.upper(1) == doctest::Approx(3));
    CHECK_THROWS_AS(Polyhedron::box(v1(2), v1(1)), Error);
}

TEST_CASE("property: feasibility certificates") {
    Rng rng(31);
    int feasible = 0;
    for (int t = 0; t < 300; ++t) {
        const auto d = uniform_int(rng, 1, 4);
        const auto m = uniform_int(rng, 1, 8);
        Polyhedron p(random_matrix(rng, m, d), random_vector(rng, m));
        const bool f = is_feasible(p);
        auto x = feasible_point(p);
        CHECK(f == x.has_value());
        if (x) {
            ++feasible;
            const Vector slack = p.constraint_matrix() * *x - p.bound_vector();
            CHECK(slack.maxCoeff() <= 2 * kFeasTol);
        }
    }
    CHECK(feasible > 0);
    CHECK(feasible < 300);
}

TEST_CASE("property: infeasibility agrees with a dense grid search in 2D") {
    Rng rng(35);
    for (int t = 0; t < 100; ++t) {
        Polyhedron p = stack(Polyhedron::hypercube(2, -1, 1), Polyhedron(random_matrix(rng, 3, 2), random_vector(rng, 3, 0.8)));
        bool hit = false;
        for (int i = 0; i <= 200 && !hit; ++i)
            for (int j = 0; j <= 200 && !hit; ++j) hit = p.contains(v2(-1 + i * 0.01, -1 + j * 0.01), 0.0);
        if (hit) CHECK(is_feasible(p));
        if (!is_feasible(p)) CHECK_FALSE(hit);
    }
}

TEST_CASE("property: preimage membership") {
    Rng rng(32);
    for (int t = 0; t < 200; ++t) {
        const auto d = uniform_int(rng, 1, 3), k = uniform_int(rng, 1, 3), m = uniform_int(rng, 1, 4);
        Polyhedron q(random_matrix(rng, m, k), random_vector(rng, m));
        const Matrix j = random_matrix(rng, k, d);
        const Vector b = random_vector(rng, k);
        const auto pre = affine_preimage(q, j, b);
        for (int s = 0; s < 20; ++s) {
            const Vector x = random_vector(rng, d, 2);
            const Vector slack = q.constraint_matrix() * (j * x + b) - q.bound_vector();
            if (std::abs(slack.maxCoeff()) < 1e-7) continue;  // too close to call
            CHECK(pre.contains(x, 0.0) == q.contains(j * x + b, 0.0));
        }
    }
}

TEST_CASE("property: linear_bounds sandwich sampled points") {
    Rng rng(33);
    for (int t = 0; t < 20; ++t) {
        const auto d = uniform_int(rng, 1, 3);
        const auto p = random_polytope(rng, d, 3);
        const Vector obj = random_vector(rng, d);
        const auto r = linear_bounds(p, obj);
        const auto box = bounding_box(p);
        double seen_lo = kInf, seen_hi = -kInf;
        for (int s = 0; s < 1000; ++s) {
            Vector x;
            if (!sample_in(rng, p, box, x)) break;
            const double v = obj.dot(x);
            seen_lo = std::min(seen_lo, v);
            seen_hi = std::max(seen_hi, v);
            CHECK(v >= r.lo - 1e-9);
            CHECK(v <= r.hi + 1e-9);
        }
    }
}

TEST_CASE("region files") {
    auto g = parse_region(R"({"global": 3})");
    CHECK(g.dim() == 3);
    CHECK(g.unconstrained_space());

    auto b = parse_region(R"({"box": {"lower": [-1, null], "upper": [1, 2]}})");
    CHECK(b.dim() == 2);
    CHECK(b.num_constraints() == 3);

    auto h = parse_region(R"({"dim": 2, "C": [[1, 1]], "c": [1]})");
    CHECK(h.contains(v2(0.5, 0.5)));
    CHECK_FALSE(h.contains(v2(1, 1)));

    for (const char* bad : {"[1]", R"({"global": 0})", R"({"dim": 2, "C": [[1]], "c": [1]})",
                            R"({"box": {"lower": [0], "upper": [1, 2]}})", R"({"global": 2, "extra": 1})",
                            "{nope"}) {
        CHECK_THROWS_AS(parse_region(bad), Error);
    }
    CHECK_THROWS_AS(load_region("/nonexistent/region.json"), Error);
}


TEST_CASE("regression: zero-gain ray at a badly scaled optimum") {
    // inscribed-ball LP from a global-region search: maximize t subject to C x + t <= c, t <= 1.
    // Rounding at tableau scale ~1e3 once left a reduced cost of -1.2e-11 on a ray column.
    const Matrix a{
        {0.29280208105699751, -0.7808038214197387, -0.46477408399982073, 0.29765312803186189, 1},
        {-0.57756201913311822, -0.56913681010804329, -0.52192719953170008, 0.26475914304120607, 1},
        {-0.48267825375652401, 0.46045998585028697, 0.73562713584432682, -0.11769036405236712, 1},
        {-0.39200022214795988, 0.75535168094221328, -0.38622457262759391, -0.35582333177063513, 1},
        {-0.51742396213918962, -0.083722381338367707, 0.68503684263040976, 0.50595210297633408, 1},
        {-0.14916459145646233, 0.56356686648170629, -0.81247873467840148, 0.0045406337664579879, 1},
        {0.61682538681036547, -0.25549232772525643, -0.48049874673883325, 0.568657249177555, 1},
        {-0.67184588321394934, -0.29822971195836095, -0.59277432484853099, -0.32909078977399209, 1},
        {-0.46292073745042178, 0.62730073192427027, -0.38557936520182423, -0.49348428110345188, 1},
        {0.42529686438944686, 0.35851493324276201, -0.79998177519853719, -0.22498617542560151, 1},
        {-0.41265234567264836, -0.556486543449628, 0.52063183298429627, 0.49898222719227014, 1},
        {-0.67531813846752098, -0.60703413570808162, 0.24235023659611871, 0.34164503913229882, 1},
        {-0.51766300881637906, 0.24075105100920804, 0.81580928428194033, -0.092299254712720283, 1},
        {0.36764944443654773, 0.89638387520587492, -0.22716967220019985, 0.098609199919935345, 1},
        {-0.72812426458069124, 0.50075328144733211, -0.38263396548067224, -0.26957829087130208, 1},
        {0.19709609624314067, 0.80644478450407853, -0.48291984224091195, -0.27854688000747324, 1},
        {-0.49412963098052032, -0.50971229510468219, 0.5559475754010178, 0.43237897429442834, 1},
        {-0.66601953919301049, -0.34876912190421189, 0.6436893747951915, -0.14297573848408857, 1},
        {-0.61399459877424223, -0.55064751249946764, 0.562735373257643, 0.055918237979995539, 1},
        {0, 0, 0, 0, 1}};
    const std::vector<double> rhs{0.18575885019670332, -0.17611265769443618, 0.17411064476710933, -0.25672999669600483, 0.063838473151782218, 0.28846837990497937, 0.15366189748372636, 0.32557073192889768, -0.31975236062500834, 0.031383613306038838, -0.15702675968867641, -0.25137639214185875, 0.3655922752853018, -0.041075233902020426, -0.6668761366333269, -0.32026118254061625, -0.11656178267170274, -0.012690536220226322, -0.38363582336729335, 1};
    const auto sol = detail::maximize(a, Vector::Map(rhs.data(), static_cast<Eigen::Index>(rhs.size())),
                                      Vector::Unit(a.cols(), a.cols() - 1));
    CHECK(sol.status == detail::LpStatus::Optimal);
    CHECK(sol.value == doctest::Approx(1.0));
}
