#include <doctest.h>

#include <cmath>

#include "iesp/default_rules.hpp"
#include "iesp/errors.hpp"
#include "iesp/esp.hpp"
#include "iesp/vec.hpp"
#include "support.hpp"

using namespace iesp;
using namespace iesp::rules;
using namespace iesp::esp;

namespace {

Iesp make_iesp(IespParameters params = {}) {
    return Iesp(default_delta_m_yaw(), default_torque_cut(), params, 2.6, 1.3, 0.3, 0.75, 0.75);
}

}  // namespace

TEST_CASE("reference yaw rate by hand") {
    CHECK(reference_yaw_rate(0.0, 26.39, 2.6, 0.002) == 0.0);
    const double delta = 0.026;
    const double v = 26.39;
    CHECK(reference_yaw_rate(delta, v, 2.6, 0.0) == doctest::Approx(std::tan(delta) * v / 2.6));
    CHECK(reference_yaw_rate(delta, v, 2.6, 0.0) == doctest::Approx(0.2639).epsilon(1e-3));
    const double divisor = 1.0 + 0.002 * v * v;
    CHECK(reference_yaw_rate(delta, v, 2.6, 0.002) == doctest::Approx(std::tan(delta) * v / 2.6 / divisor));
    CHECK(reference_yaw_rate(delta, v, 2.6, 0.002) == doctest::Approx(0.1103).epsilon(1e-3));
}

TEST_CASE("with k_us = 0 the reference is the neutral-steer rate V tan(delta) / l") {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double delta = -0.5 + i * 0.01;
        for (int j = 0; j < 100; ++j) {
            const double v = j * 0.7;
            worst = std::max(worst, std::abs(reference_yaw_rate(delta, v, 2.6, 0.0) - v * std::tan(delta) / 2.6));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("reference yaw rate is odd in steer and falls with k_us") {
    test::Rng rng(31);
    for (int i = 0; i < 1000; ++i) {
        const double d = rng.uniform(0.001, 0.5);
        const double v = rng.uniform(1.0, 60.0);
        const double k = rng.uniform(0.0, 0.01);
        CHECK(reference_yaw_rate(-d, v, 2.6, k) == -reference_yaw_rate(d, v, 2.6, k));
        CHECK(reference_yaw_rate(d, v, 2.6, k + 0.001) < reference_yaw_rate(d, v, 2.6, k));
    }
}

TEST_CASE("reference slip angle by hand") {
    CHECK(reference_slip_angle(0.0, 20.0, 2.6, 1.3, 0.002, 0.0005) == 0.0);
    CHECK(reference_slip_angle(0.026, 0.0, 2.6, 1.3, 0.002, 0.0005) == doctest::Approx(std::tan(0.026) * 0.5));
    CHECK(reference_slip_angle(0.026, 0.0, 2.6, 1.3, 0.002, 0.0005) == doctest::Approx(0.0130).epsilon(1e-2));
}

TEST_CASE("adherence limit") {
    CHECK(yaw_rate_limit(0.9, 26.39) == doctest::Approx(0.9 * kGravity / 26.39));
    CHECK(yaw_rate_limit(0.9, 26.39) == doctest::Approx(0.3346).epsilon(1e-3));
    CHECK(yaw_rate_limit(0.9, 0.0) == doctest::Approx(0.9 * kGravity / 1.0));
    CHECK(yaw_rate_limit(0.45, 20.0) == doctest::Approx(0.5 * yaw_rate_limit(0.9, 20.0)));
}

TEST_CASE("stability errors by hand") {
    const auto e = compute_errors(0.01, 0.01, 0.4, 0.5, 0.3346);
    CHECK(e.e_beta == 0.0);
    CHECK(e.e_yaw_rate == doctest::Approx(0.4 - 0.3346));
    CHECK(e.e_yaw_rate == doctest::Approx(0.0654));
    CHECK(e.limit_excess == doctest::Approx(0.1654));

    const auto zero = compute_errors(0.02, 0.02, 0.2, 0.2, 0.3);
    CHECK(zero.e_beta == 0.0);
    CHECK(zero.e_yaw_rate == 0.0);
    CHECK(zero.limit_excess <= 0.0);

    const auto left = compute_errors(0.0, 0.0, -0.4, -0.5, 0.3346);
    CHECK(left.e_yaw_rate == doctest::Approx(-0.0654));
}

TEST_CASE("estimator decays to zero on a straight") {
    SlipAngleEstimator est(0.3, 1.0);
    est.reset(0.05);
    for (int i = 0; i < 300; ++i)
        est.update(0.0, 0.0, 25.0, 0.0, 0.01);
    // Ten time constants.
    CHECK(est.estimate() == doctest::Approx(0.05 * std::exp(-10.0)).epsilon(1e-9));
    CHECK(est.valid());
}

TEST_CASE("estimator finds the geometric slip angle of a slow circle") {
    // Low-speed steady circle: the rear axle rolls without slip, so the GC
    // velocity points atan(b / rho) off the body axis.
    const double rho = 50.0, v = 5.0, l = 2.6, b = 1.3, tau = 0.3;
    const double geometric = std::atan(b / rho);
    const double yaw_rate = v / rho;
    const double a_lat = v * v / rho;
    IespParameters params;
    params.k_us = 0.0;
    params.k_ps = 0.0;
    const double target = references(std::atan(l / rho), v, l, b, params).slip_angle_ref;
    SlipAngleEstimator est(tau, 1.0);
    const double dt = 0.01;
    const int steps = static_cast<int>(std::lround(3.5 * tau / dt));
    for (int i = 0; i < steps; ++i)
        est.update(a_lat, yaw_rate, v, target, dt);
    CHECK(std::abs(est.estimate() - geometric) / geometric < 0.05);
}

TEST_CASE("a constant kinematic drift settles at drift * tau") {
    SlipAngleEstimator est(0.4, 1.0);
    // a_lat / V - yaw_rate = 0.05 rad/s
    for (int i = 0; i < 1000; ++i)
        est.update(20.0 * 0.35, 0.3, 20.0, 0.0, 0.01);
    CHECK(est.estimate() == doctest::Approx(0.05 * 0.4).epsilon(1e-9));
}

TEST_CASE("estimator holds below the speed floor") {
    SlipAngleEstimator est(0.3, 1.0);
    est.reset(0.02);
    CHECK(est.update(3.0, 0.5, 0.0, 0.0, 0.01) == 0.02);
    CHECK_FALSE(est.valid());
}

TEST_CASE("corrective moment is zero at the origin and opposes the slip error") {
    const auto iesp = make_iesp();
    CHECK(iesp.corrective_yaw_moment(0.0, 0.0) == 0.0);
    const auto& beta = iesp.yaw_moment_rules().inputs()[0];
    const auto& rate = iesp.yaw_moment_rules().inputs()[1];
    const double b_big = beta.terms().back().center();
    const double r_big = rate.terms().back().center();
    CHECK(iesp.corrective_yaw_moment(b_big, -r_big) < 0.0);
    CHECK(iesp.corrective_yaw_moment(-b_big, r_big) > 0.0);
}

TEST_CASE("torque cut at the label peaks") {
    const auto iesp = make_iesp();
    const auto& limit = iesp.torque_cut_rules().inputs()[0];
    const double expected[] = {0.0, 30.0, 60.0, 95.0};
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(iesp.torque_cut(limit.terms()[i].center()) - expected[i]) < 1e-9);
    CHECK(iesp.torque_cut(-0.3) == 0.0);
    const double s = limit.terms()[1].center(), m = limit.terms()[2].center();
    CHECK(iesp.torque_cut(0.5 * (s + m)) == doctest::Approx(45.0));
}

TEST_CASE("torque cut is bounded and non-decreasing in the excess") {
    const auto iesp = make_iesp();
    double last = -1.0;
    for (double x = -1.0; x <= 1.0; x += 0.001) {
        const double c = iesp.torque_cut(x);
        CHECK(c >= 0.0);
        CHECK(c <= 100.0);
        CHECK(c >= last - 1e-12);
        last = c;
    }
}

TEST_CASE("dispenser by hand") {
    const std::array<double, 4> equal{3000.0, 3000.0, 3000.0, 3000.0};
    const auto none = dispense(0.0, equal, 0.3, 0.75, 0.75);
    for (double d : none.delta)
        CHECK(d == 0.0);

    const auto half = dispense(2000.0, equal, 0.3, 0.75, 0.75);
    CHECK(half.front_moment == doctest::Approx(1000.0));
    CHECK(half.rear_moment == doctest::Approx(1000.0));
    CHECK(half.front_brake == doctest::Approx(2.0 * 0.3 / 0.75 * 1000.0));
    CHECK(half.front_brake == doctest::Approx(800.0));
    CHECK(half.delta[1] == doctest::Approx(800.0));
    CHECK(half.delta[0] == 0.0);
    CHECK(half.delta[3] == doctest::Approx(400.0));
    CHECK(half.delta[2] == doctest::Approx(-400.0));
}

TEST_CASE("dispenser conserves the moment and brakes the side the sign asks for") {
    test::Rng rng(37);
    for (int i = 0; i < 10000; ++i) {
        std::array<double, 4> loads{};
        for (double& n : loads)
            n = rng.uniform(0.0, 8000.0);
        const double m = rng.uniform(-6000.0, 6000.0);
        const auto d = dispense(m, loads, 0.3, 0.75, 0.75);
        CHECK(std::abs(d.front_moment + d.rear_moment - m) <= 1e-12 * std::max(1.0, std::abs(m)));
        if (m > 0.0) {
            CHECK(d.delta[1] >= 0.0);
            CHECK(d.delta[0] == 0.0);
        } else if (m < 0.0) {
            CHECK(d.delta[0] >= 0.0);
            CHECK(d.delta[1] == 0.0);
        }
        const auto b = brake_deltas(d);
        for (double t : b)
            CHECK(t >= 0.0);
    }
}

TEST_CASE("dispenser flags a zero total load") {
    const std::array<double, 4> none{};
    CHECK(dispense(1000.0, none, 0.3, 0.75, 0.75).fault);
}

TEST_CASE("a steady straight run asks for nothing") {
    auto iesp = make_iesp();
    IespInputs in;
    in.speed = 25.0;
    in.loads = {3700.0, 3700.0, 3700.0, 3700.0};
    IespOutput out;
    for (int i = 0; i < 100; ++i)
        out = iesp.tick(in, 0.01);
    CHECK(out.delta_m_yaw == 0.0);
    CHECK(out.torque_cut_percent == 0.0);
    for (double b : out.brake_delta)
        CHECK(b == 0.0);
}

TEST_CASE("parameter checks") {
    IespParameters p;
    p.k_us = -0.1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    IespParameters q;
    q.tau_beta = 0.0;
    CHECK_THROWS_AS(q.validate(), ConfigError);
    CHECK_THROWS_AS(Iesp(default_torque_cut(), default_torque_cut(), {}, 2.6, 1.3, 0.3, 0.75, 0.75), ConfigError);
}
