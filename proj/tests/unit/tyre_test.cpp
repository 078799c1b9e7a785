#include <doctest.h>

#include <cmath>
#include <numbers>

#include "iesp/errors.hpp"
#include "iesp/tyre.hpp"
#include "support.hpp"

using namespace iesp;
using namespace iesp::tyre;

TEST_CASE("free rolling wheel has no slip") {
    const auto s = compute_slip(20.0 / 0.3, 0.3, 20.0, 0.0);
    CHECK(s.sigma == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.alpha == 0.0);
}

TEST_CASE("locked wheel reads sigma = -1") {
    CHECK(compute_slip(0.0, 0.3, 20.0, 0.0).sigma == -1.0);
}

TEST_CASE("slip angle is the contact velocity direction") {
    CHECK(compute_slip(20.0 / 0.3, 0.3, 20.0, 2.0).alpha == doctest::Approx(std::atan(0.1)));
    CHECK(compute_slip(20.0 / 0.3, 0.3, 20.0, 2.0).alpha == doctest::Approx(0.0997).epsilon(1e-3));
}

TEST_CASE("slip stays finite and capped at standstill") {
    const auto s = compute_slip(50.0, 0.3, 0.0, 0.0);
    CHECK(std::isfinite(s.sigma));
    CHECK(s.sigma <= 1.0);
    CHECK(compute_slip(0.0, 0.3, 0.0, 0.0).sigma == 0.0);
}

TEST_CASE("no slip gives no friction") {
    const InflatedFrictionModel m;
    const auto mu = friction_inflated(m, 0.0, 0.0);
    CHECK(mu.mu_long == 0.0);
    CHECK(mu.mu_trasv == 0.0);
}

TEST_CASE("pure longitudinal peak reaches the maximum") {
    const InflatedFrictionModel m;
    const auto mu = friction_inflated(m, m.sigma_p, 0.0);
    CHECK(mu.mu_long == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(mu.mu_trasv == 0.0);
    const auto lat = friction_inflated(m, 0.0, m.alpha_p);
    CHECK(lat.mu_trasv == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(lat.mu_long == 0.0);
}

TEST_CASE("pure sliding keeps the configured share of the peak") {
    const InflatedFrictionModel m;
    CHECK(m.mu_long_pure(1.0) == doctest::Approx(m.sliding_ratio * m.mu_long_max).epsilon(1e-9));
    CHECK(m.mu_trasv_pure(std::numbers::pi / 2) == doctest::Approx(m.sliding_ratio * m.mu_trasv_max).epsilon(1e-9));
}

TEST_CASE("combined slip below the peak sits on the friction ellipse") {
    const InflatedFrictionModel m;
    const double sigma = m.sigma_p / 2;
    const double alpha = 4.0 * std::numbers::pi / 180.0;
    const auto mu = friction_inflated(m, sigma, alpha);
    // Independent check: normalise by the pure-slip semi-axes.
    const double a = m.mu_long_pure(sigma);
    const double b = m.mu_trasv_pure(alpha);
    const double on_ellipse = (mu.mu_long / a) * (mu.mu_long / a) + (mu.mu_trasv / b) * (mu.mu_trasv / b);
    CHECK(std::abs(on_ellipse - 1.0) < 1e-9);
    CHECK(std::abs(ellipse_residual(m, sigma, alpha, mu)) < 1e-9);
}

TEST_CASE("friction ellipse holds over random sub-peak slips") {
    const InflatedFrictionModel m;
    test::Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double sigma = rng.uniform(-m.sigma_p, m.sigma_p);
        const double alpha = rng.uniform(-0.5, 0.5);
        const auto mu = friction_inflated(m, sigma, alpha);
        CHECK(std::abs(ellipse_residual(m, sigma, alpha, mu)) < 1e-9);
    }
}

TEST_CASE("friction surfaces are continuous and odd in their slips") {
    const InflatedFrictionModel m;
    test::Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
        const double sigma = rng.uniform(-1.0, 1.0);
        const double alpha = rng.uniform(-1.4, 1.4);
        const auto mu = friction_inflated(m, sigma, alpha);
        const auto neg = friction_inflated(m, -sigma, -alpha);
        CHECK(neg.mu_long == doctest::Approx(-mu.mu_long).epsilon(1e-12));
        CHECK(neg.mu_trasv == doctest::Approx(-mu.mu_trasv).epsilon(1e-12));
        const auto near = friction_inflated(m, sigma + 1e-8, alpha + 1e-8);
        CHECK(std::abs(near.mu_long - mu.mu_long) < 1e-5);
        CHECK(std::abs(near.mu_trasv - mu.mu_trasv) < 1e-5);
        CHECK(std::hypot(mu.mu_long, mu.mu_trasv) <= std::max(m.mu_long_max, m.mu_trasv_max) + 1e-12);
    }
}

TEST_CASE("no lateral friction without slip angle") {
    const InflatedFrictionModel m;
    for (double sigma : {-1.0, -0.3, 0.05, 0.5})
        CHECK(friction_inflated(m, sigma, 0.0).mu_trasv == 0.0);
}

TEST_CASE("deflated polar has its semi-axes on the axes") {
    const DeflatedFrictionModel d{0.08, 0.03};
    CHECK(friction_deflated(d, 0.0) == doctest::Approx(0.08));
    CHECK(friction_deflated(d, std::numbers::pi / 2) == doctest::Approx(0.03));
    const DeflatedFrictionModel circle{0.05, 0.05};
    CHECK(friction_deflated(circle, std::numbers::pi / 4) == doctest::Approx(0.05));
}

TEST_CASE("deflated polar traces an ellipse") {
    const DeflatedFrictionModel d{0.07, 0.04};
    test::Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(-std::numbers::pi, std::numbers::pi);
        const double mu = friction_deflated(d, a);
        const double expect = std::pow(0.07 * std::cos(a), 2) + std::pow(0.04 * std::sin(a), 2);
        CHECK(mu * mu == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("inflation blends linearly over the deflation time") {
    const BurstEvent e{WheelPosition::RearRight, 6.0, 3.0, {}};
    CHECK(inflation_blend(e, 0.0) == 1.0);
    CHECK(inflation_blend(e, 5.999) == 1.0);
    CHECK(inflation_blend(e, 7.5) == doctest::Approx(0.5));
    CHECK(inflation_blend(e, 9.0) == 0.0);
    CHECK(inflation_blend(e, 20.0) == 0.0);
}

TEST_CASE("fully deflated tyre pushes mu N against the patch velocity") {
    TyreContactState c;
    c.normal_load = 4000.0;
    c.v_long = 3.0;
    c.v_lat = -4.0;
    const DeflatedFrictionModel d{0.05, 0.05};
    const auto f = deflated_force(c, d);
    CHECK(std::hypot(f.f_long, f.f_trasv) == doctest::Approx(200.0));
    CHECK(f.f_long == doctest::Approx(-200.0 * 0.6));
    CHECK(f.f_trasv == doctest::Approx(200.0 * 0.8));

    const TyreModels models{InflatedFrictionModel{}, d};
    const auto blended = tyre_force(c, models, 0.0);
    CHECK(blended.f_long == doctest::Approx(f.f_long));
    CHECK(blended.f_trasv == doctest::Approx(f.f_trasv));
}

TEST_CASE("no load means no force") {
    TyreContactState c;
    c.sigma = -0.2;
    c.alpha = 0.1;
    c.v_long = 20.0;
    c.v_lat = 2.0;
    const TyreModels models;
    for (double blend : {0.0, 0.4, 1.0}) {
        const auto f = tyre_force(c, models, blend);
        CHECK(f.f_long == 0.0);
        CHECK(f.f_trasv == 0.0);
    }
}

TEST_CASE("intact force opposes the slip") {
    TyreContactState c;
    c.normal_load = 3700.0;
    c.sigma = -0.1;
    c.alpha = 0.05;
    const auto f = inflated_force(c, InflatedFrictionModel{});
    CHECK(f.f_long < 0.0);
    CHECK(f.f_trasv < 0.0);
}

TEST_CASE("heavier tyres lose grip per newton") {
    const InflatedFrictionModel m;
    CHECK(m.load_factor(m.reference_load) == 1.0);
    CHECK(m.load_factor(2.0 * m.reference_load) < 1.0);
    CHECK(m.load_factor(0.5 * m.reference_load) > 1.0);
}

TEST_CASE("tyre parameter blocks validate their ranges") {
    InflatedFrictionModel m;
    m.sigma_p = 1.2;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    DeflatedFrictionModel d{0.0, 0.05};
    CHECK_THROWS_AS(d.validate(), ConfigError);
    DeflatedFrictionModel big{1.5, 0.05};
    CHECK_THROWS_AS(big.validate(), ConfigError);
    BurstEvent e;
    e.duration = 0.0;
    CHECK_THROWS_AS(e.validate(), ConfigError);
}

TEST_CASE("wheel names round trip") {
    for (auto w : kWheels)
        CHECK(wheel_from_string(to_string(w)) == w);
    CHECK_THROWS(wheel_from_string("spare"));
}
