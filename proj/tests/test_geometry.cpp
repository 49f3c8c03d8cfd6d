#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "keyhole/geometry.hpp"
#include "oracles.hpp"

using namespace keyhole;

namespace {

constexpr double kPi = std::numbers::pi;

KeyholeDomain strip(double h, double length, double phi, double position) {
    KeyholeDomain d;
    d.dimension = 2;
    d.height = h;
    d.length = length;
    d.holes.push_back(KeyholeSpec::with_angle(position, phi, 0.1));
    return d;
}

KeyholeDomain slab(double h, double side, double psi, HoleShape shape = HoleShape::circular) {
    KeyholeDomain d;
    d.dimension = 3;
    d.height = h;
    d.length = side;
    d.width = side;
    d.holes.push_back(KeyholeSpec::with_half_angle_3d(0.5 * side, 0.5 * side, psi, 0.1, shape));
    return d;
}

}  // namespace

TEST_CASE("los_angle from width and depth") {
    KeyholeSpec hole;
    hole.width = 0.02;
    hole.depth = 0.1;
    const LosAngle a = los_angle(hole, 2);
    CHECK(a.full_angle == doctest::Approx(2.0 * std::atan(0.1)));
    CHECK(a.half_angle == doctest::Approx(std::atan(0.1)));
    CHECK(a.solid_angle == 0.0);

    const KeyholeSpec fig2 = KeyholeSpec::with_angle(1.0, kPi / 16, 0.1);
    CHECK(los_angle(fig2, 2).full_angle == doctest::Approx(kPi / 16).epsilon(1e-14));

    const KeyholeSpec cone = KeyholeSpec::with_half_angle_3d(1.0, 1.0, kPi / 32, 0.1);
    CHECK(los_angle(cone, 3).solid_angle == doctest::Approx(2.0 * kPi * (1.0 - std::cos(kPi / 32))));
}

TEST_CASE("square hole solid angle matches the pyramid integral") {
    const KeyholeSpec sq = KeyholeSpec::with_half_angle_3d(1.0, 1.0, 0.2, 0.1, HoleShape::square);
    const double t = std::tan(0.2);
    // Solid angle of the square pyramid: integral of dA / (1 + x^2 + y^2)^{3/2} over [-t, t]^2.
    const double direct = oracle::integrate(
        [t](double x) {
            return oracle::integrate([x](double y) { return std::pow(1.0 + x * x + y * y, -1.5); }, -t, t, 1e-12);
        },
        -t, t, 1e-12);
    CHECK(los_angle(sq, 3).solid_angle == doctest::Approx(direct).epsilon(1e-10));
    const double psi = equivalent_cone_half_angle(direct);
    CHECK(2.0 * kPi * (1.0 - std::cos(psi)) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("unfolded images across the two walls") {
    const KeyholeDomain d = strip(0.5, 5.0, kPi / 16, 2.5);
    const Vec3 p{2.7, 0.2, 0.0};
    const auto images = unfold_images(p, d, d.holes[0], 3);
    REQUIRE(images.size() == 4);
    CHECK(images[0].position.y == doctest::Approx(0.2));
    CHECK(images[1].position.y == doctest::Approx(2.0 * 0.5 - 0.2));
    CHECK(images[2].position.y == doctest::Approx(2.0 * 0.5 + 0.2));
    CHECK(images[3].position.y == doctest::Approx(4.0 * 0.5 - 0.2));
    for (const Image& im : images) CHECK(im.position.x == doctest::Approx(0.2));
    CHECK_THROWS_AS(unfold_images({2.0, 0.7, 0.0}, d, d.holes[0], 1), std::invalid_argument);
}

TEST_CASE("classification agrees with an explicit ray tracer") {
    const double h = 0.5;
    const double length = 5.0;
    const double phi = kPi / 16;
    const KeyholeDomain d = strip(h, length, phi, 2.5);
    const KeyholeSpec& hole = d.holes[0];
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> ux(2.5 - 3.5 * h * std::tan(phi / 2), 2.5 + 3.5 * h * std::tan(phi / 2));
    std::uniform_real_distribution<double> uy(0.0, h);
    int checked = 0;
    int connected = 0;
    for (int i = 0; i < 200; ++i) {
        const Vec3 p{ux(gen), uy(gen), 0.0};
        const PathClass pc = classify_path(p, d, hole, 3);
        const oracle::TracedClass traced = oracle::classify_by_tracing(2.5, phi / 2, p.x, p.y, 3, h, length);
        INFO("point (" << p.x << ", " << p.y << ")");
        CHECK(pc.reflections == traced.reflections);
        if (pc.connected() && traced.reflections) {
            CHECK(pc.distance == doctest::Approx(traced.distance).epsilon(1e-8));
            ++connected;
        }
        ++checked;
    }
    CHECK(checked == 200);
    CHECK(connected > 50);
}

TEST_CASE("minimal reflection count and nested radii") {
    const double h = 0.4;
    const KeyholeDomain d = strip(h, 4.0, kPi / 12, 2.0);
    const KeyholeSpec& hole = d.holes[0];
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ux(1.7, 2.3);
    std::uniform_real_distribution<double> uy(0.0, h);
    const double cos_half = std::cos(hole.half_angle());
    for (int i = 0; i < 2000; ++i) {
        const Vec3 p{ux(gen), uy(gen), 0.0};
        const PathClass pc = classify_path(p, d, hole, 4);
        if (!pc.connected()) continue;
        const int c = *pc.reflections;
        // No smaller order sees the point.
        for (int k = 0; k < c; ++k) CHECK(classify_path(p, d, hole, k).reflections == std::nullopt);
        CHECK(pc.distance >= c * h - 1e-12);
        CHECK(pc.distance <= (c + 1) * h / cos_half + 1e-12);
    }
}

TEST_CASE("side walls bound the domain") {
    const KeyholeDomain d = strip(0.5, 5.0, kPi / 16, 2.5);
    CHECK_THROWS_AS(classify_path({5.5, 0.1, 0.0}, d, d.holes[0], 2), std::invalid_argument);
    CHECK(d.contains({0.0, 0.0, 0.0}));
    CHECK_FALSE(d.contains({1.0, -0.01, 0.0}));
}

TEST_CASE("analytic region sizes") {
    const double h = 0.3;
    const double phi = kPi / 16;
    const KeyholeDomain d = strip(h, 5.0, phi, 2.5);
    const double d0 = region_measure(0, d, d.holes[0], MeasureMethod::analytic_approx).value;
    CHECK(d0 == doctest::Approx(0.5 * phi * h * h));
    CHECK(region_measure(1, d, d.holes[0], MeasureMethod::analytic_approx).value == doctest::Approx(2.0 * d0));
    CHECK(region_measure(2, d, d.holes[0], MeasureMethod::analytic_approx).value == doctest::Approx(2.0 * d0));

    const KeyholeDomain s = slab(h, 4.0, kPi / 32);
    const double omega = los_angle(s.holes[0], 3).solid_angle;
    const double v0 = region_measure(0, s, s.holes[0], MeasureMethod::analytic_approx).value;
    CHECK(v0 == doctest::Approx(omega * h * h * h / 3.0));
    for (int c : {1, 2, 3}) {
        CHECK(region_measure(c, s, s.holes[0], MeasureMethod::analytic_approx).value ==
              doctest::Approx(6.0 * c * v0));
    }
}

TEST_CASE("Monte Carlo region sizes in 2D") {
    const KeyholeDomain d = strip(0.3, 5.0, kPi / 16, 2.5);
    const RegionMeasure m0 = region_measure(0, d, d.holes[0], MeasureMethod::montecarlo, 400000, 3);
    const RegionMeasure m1 = region_measure(1, d, d.holes[0], MeasureMethod::montecarlo, 400000, 4);
    const RegionMeasure m2 = region_measure(2, d, d.holes[0], MeasureMethod::montecarlo, 400000, 5);
    // The exact D_0 is the triangle of half-width h tan(phi/2).
    const double triangle = 0.3 * 0.3 * std::tan(kPi / 32);
    CHECK(std::abs(m0.value - triangle) < 4.0 * m0.std_error);
    CHECK(m1.value / m0.value >= 1.9);
    CHECK(m1.value / m0.value <= 2.1);
    CHECK(m2.value / m0.value >= 1.9);
    CHECK(m2.value / m0.value <= 2.1);
    CHECK(m0.samples == 400000);
}

TEST_CASE("region_measure is reproducible and rejects bad input") {
    const KeyholeDomain d = strip(0.3, 5.0, kPi / 16, 2.5);
    const RegionMeasure a = region_measure(1, d, d.holes[0], MeasureMethod::montecarlo, 10000, 9);
    const RegionMeasure b = region_measure(1, d, d.holes[0], MeasureMethod::montecarlo, 10000, 9);
    CHECK(a.value == b.value);
    CHECK_THROWS_AS(region_measure(-1, d, d.holes[0], MeasureMethod::analytic_approx), std::invalid_argument);
    CHECK_THROWS_AS(region_measure(0, d, d.holes[0], MeasureMethod::montecarlo, 0), std::invalid_argument);
}

TEST_CASE("overlapping wedges are detected") {
    KeyholeDomain five;
    five.dimension = 2;
    five.height = 0.3;
    five.length = 5.0;
    for (double x : {0.5, 1.5, 2.5, 3.5, 4.5}) five.holes.push_back(KeyholeSpec::with_angle(x, kPi / 16, 0.1));
    CHECK(overlapping_wedges(five).empty());

    KeyholeDomain close = five;
    close.holes = {KeyholeSpec::with_angle(1.0, kPi / 16, 0.1), KeyholeSpec::with_angle(1.05, kPi / 16, 0.1)};
    const auto pairs = overlapping_wedges(close);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK_FALSE(close.warnings().empty());

    KeyholeDomain cones = slab(0.3, 4.0, kPi / 32);
    cones.holes.push_back(KeyholeSpec::with_half_angle_3d(2.02, 2.02, kPi / 32, 0.1, HoleShape::square));
    CHECK(overlapping_wedges(cones).size() == 1);
    cones.holes[1].position = 3.0;
    CHECK(overlapping_wedges(cones).empty());
}

TEST_CASE("domain and hole validation") {
    KeyholeDomain d = strip(0.3, 5.0, kPi / 16, 2.5);
    CHECK_NOTHROW(d.validate());
    d.holes[0].position = 5.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = strip(0.3, 5.0, kPi / 16, 2.5);
    d.height = 0.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = strip(0.3, 5.0, kPi / 16, 2.5);
    d.dimension = 4;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    KeyholeSpec wide = KeyholeSpec::with_angle(1.0, kPi / 2, 0.5);
    CHECK(wide.validity_warnings().size() == 2);
    CHECK(KeyholeSpec::with_angle(1.0, kPi / 16, 0.1).validity_warnings().empty());
    KeyholeSpec flat;
    flat.width = 0.0;
    flat.depth = 0.1;
    CHECK_THROWS_AS(flat.validate(), std::invalid_argument);
}

TEST_CASE("3D classification uses the cone or the pyramid") {
    const double psi = 0.1;
    const KeyholeDomain circ = slab(0.5, 4.0, psi);
    const KeyholeDomain sq = slab(0.5, 4.0, psi, HoleShape::square);
    const double reach = 0.4 * std::tan(psi);
    // Along the diagonal at 0.9 of the pyramid corner reach: outside the cone, inside the pyramid.
    const Vec3 corner{2.0 + 0.9 * reach, 0.4, 2.0 + 0.9 * reach};
    CHECK(classify_path(corner, circ, circ.holes[0], 0).reflections == std::nullopt);
    CHECK(classify_path(corner, sq, sq.holes[0], 0).reflections == 0);
    const Vec3 axis{2.0, 0.45, 2.0};
    CHECK(classify_path(axis, circ, circ.holes[0], 2).reflections == 0);
    CHECK(classify_path(axis, circ, circ.holes[0], 2).distance == doctest::Approx(0.45));
}
