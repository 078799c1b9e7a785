// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   iesp_acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "iesp/default_rules.hpp"
#include "iesp/esp.hpp"
#include "iesp/export.hpp"
#include "iesp/scenario.hpp"
#include "iesp/simulation.hpp"
#include "iesp/tyre.hpp"
#include "iesp/vehicle.hpp"

using namespace iesp;
using namespace iesp::rules;

namespace {

// Pinned tolerances.
constexpr double kTorqueCutTol = 1e-9;
constexpr double kEquivalenceTol = 1e-12;
constexpr double kLoadSumRelTol = 1e-9;
constexpr double kEllipseTol = 1e-9;
constexpr double kDispenseTol = 1e-12;
constexpr double kOrderTarget = 4.0;
constexpr double kOrderTol = 0.3;
constexpr double kSpinDeg = 360.0;
constexpr double kSpinWindow = 10.0;       // s after the burst
constexpr double kBetaOnMaxDeg = 5.0;
constexpr double kErrorOnMax = 2.0;        // m
constexpr double kHighSpeedErrorMax = 1.5; // m
constexpr double kLockSigma = -0.95;       // wheel counted as locked at or below
constexpr double kLockMaxTime = 0.05;      // s
constexpr double kLockSpeedFloor = 1.0;    // m/s; slip is meaningless at a standstill

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int number;
    const char* title;
    double budget_s;  // runtime limit; 0 = none
    std::function<Outcome()> check;
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::filesystem::path scenario(const char* name) {
    return std::filesystem::path(IESP_DATA_DIR) / "scenarios" / name;
}

Outcome torque_cut_peaks() {
    const esp::Iesp iesp(default_delta_m_yaw(), default_torque_cut(), {}, 2.6, 1.3, 0.3, 0.75, 0.75);
    const auto& limit = iesp.torque_cut_rules().inputs().at(0);
    const double expect[] = {0.0, 30.0, 60.0, 95.0};
    double worst = 0.0;
    std::string got;
    for (std::size_t i = 0; i < 4; ++i) {
        const double v = iesp.torque_cut(limit.terms().at(i).center());
        worst = std::max(worst, std::abs(v - expect[i]));
        got += (i ? "/" : "") + fmt("%.9g", v);
    }
    return {worst <= kTorqueCutTol, "Z/S/M/B -> " + got + fmt(" %%, max dev %.1e", worst)};
}

Outcome reference_equivalence() {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double delta = -0.6 + 1.2 * i / 99.0;
        for (int j = 0; j < 100; ++j) {
            const double v = 70.0 * j / 99.0;
            const double neutral = v * std::tan(delta) / 2.6;
            worst = std::max(worst, std::abs(esp::reference_yaw_rate(delta, v, 2.6, 0.0) - neutral));
        }
    }
    return {worst < kEquivalenceTol, fmt("max |diff| %.2e over 100x100", worst)};
}

Outcome load_conservation() {
    const vehicle::VehicleParameters p;
    const double mg = p.mass * kGravity;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> a(-5.0, 5.0);
    double worst = 0.0;
    int used = 0;
    while (used < 10000) {
        const auto w = vehicle::vertical_loads(p, a(rng), a(rng));
        if (w.any_lifted())
            continue;
        ++used;
        worst = std::max(worst, std::abs(w.total() - mg) / mg);
    }
    return {worst < kLoadSumRelTol, fmt("max rel dev %.2e over %d pairs", worst, used)};
}

Outcome friction_ellipse() {
    const tyre::InflatedFrictionModel m;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> s(-m.sigma_p, m.sigma_p), al(-0.6, 0.6);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double sigma = s(rng), alpha = al(rng);
        // Normalise by the pure-slip semi-axes rather than trusting the model's own residual.
        const auto mu = tyre::friction_inflated(m, sigma, alpha);
        const double a = m.mu_long_pure(std::abs(sigma)), b = m.mu_trasv_pure(std::abs(alpha));
        double r = 0.0;
        if (a > 0.0 && b > 0.0)
            r = std::pow(mu.mu_long / a, 2) + std::pow(mu.mu_trasv / b, 2) - 1.0;
        else
            r = (a > 0.0 ? 0.0 : mu.mu_long) + (b > 0.0 ? 0.0 : mu.mu_trasv);
        worst = std::max(worst, std::abs(r));
    }
    return {worst < kEllipseTol, fmt("max residual %.2e over 10^4 points", worst)};
}

Outcome dispenser_conservation() {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> n(0.0, 8000.0), m(-6000.0, 6000.0);
    double worst = 0.0;
    int sign_errors = 0;
    for (int i = 0; i < 10000; ++i) {
        const std::array<double, 4> loads{n(rng), n(rng), n(rng), n(rng)};
        const double dm = m(rng);
        const auto d = esp::dispense(dm, loads, 0.3, 0.75, 0.75);
        worst = std::max(worst, std::abs(d.front_moment + d.rear_moment - dm) / std::max(1.0, std::abs(dm)));
        // Positive moment brakes the front right, negative the front left.
        const bool ok = dm > 0.0 ? (d.delta[1] > 0.0 && d.delta[0] == 0.0) : (d.delta[0] > 0.0 && d.delta[1] == 0.0);
        if (!ok && d.front_moment != 0.0)
            ++sign_errors;
    }
    return {worst <= kDispenseTol && sign_errors == 0, fmt("max rel dev %.2e, %d sign errors", worst, sign_errors)};
}

double circle_error(double dt) {
    // Two components of the vehicle state vector rotate; the rest stay put.
    constexpr double w = 2.0, t_end = 2.0;
    using V = StateVector<vehicle::VehicleState::kSize>;
    V y{};
    y[0] = 1.0;
    const auto field = [](double, const V& s) {
        V d{};
        d[0] = -w * s[1];
        d[1] = w * s[0];
        return d;
    };
    const int n = static_cast<int>(std::lround(t_end / dt));
    for (int i = 0; i < n; ++i)
        y = vehicle::step(y, i * dt, dt, field);
    return std::hypot(y[0] - std::cos(w * t_end), y[1] - std::sin(w * t_end));
}

Outcome integrator_order() {
    const double e1 = circle_error(0.04), e2 = circle_error(0.02), e3 = circle_error(0.01);
    const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
    const double order = 0.5 * (o1 + o2);
    return {std::abs(order - kOrderTarget) <= kOrderTol, fmt("order %.3f (%.3f, %.3f)", order, o1, o2)};
}

struct HeadlineRun {
    sim::RunResult result;
    sim::RunMetrics metrics;
    sim::Scenario sc;
};

HeadlineRun run_file(const char* name, std::optional<bool> iesp = {}) {
    auto sc = sim::load_scenario(scenario(name));
    if (iesp)
        sc.iesp_enabled = *iesp;
    auto result = sim::run(sc);
    auto metrics = sim::compute_metrics(result.trace, sim::trajectory_of(sc));
    return {std::move(result), metrics, std::move(sc)};
}

Outcome headline_off() {
    const auto r = run_file("bend_burst_rear_right.json", false);
    const double burst = r.sc.burst ? r.sc.burst->time : 0.0;
    const bool in_window = r.metrics.spin && r.metrics.spin_time - burst <= kSpinWindow;
    std::string d = fmt("max |beta| %.1f deg", r.metrics.max_abs_beta_deg);
    d += r.metrics.spin ? fmt(", spin %.2f s after burst", r.metrics.spin_time - burst) : ", no spin";
    if (r.result.fault)
        d += ", fault: " + r.result.fault->message;
    return {in_window && !r.result.fault, d};
}

Outcome headline_on() {
    const auto r = run_file("bend_burst_rear_right.json", true);
    const bool ok = !r.metrics.spin && r.metrics.max_abs_beta_deg <= kBetaOnMaxDeg &&
                    r.metrics.max_track_error <= kErrorOnMax && !r.result.fault;
    return {ok, fmt("max |beta| %.2f deg, max error %.3f m, final mean %.3f m", r.metrics.max_abs_beta_deg,
                    r.metrics.max_track_error, r.metrics.final_track_error_mean)};
}

Outcome high_speed_rear_burst() {
    const auto r = run_file("straight_burst_150.json");
    const bool ok = r.sc.iesp_enabled && !r.metrics.spin && r.metrics.max_track_error <= kHighSpeedErrorMax &&
                    !r.result.fault;
    return {ok, fmt("150 km/h, max |beta| %.3f deg, max error %.3f m", r.metrics.max_abs_beta_deg,
                    r.metrics.max_track_error)};
}

Outcome anti_lock() {
    const auto r = run_file("panic_stop_100.json");
    const double period = r.result.trace.period;
    std::array<double, 4> longest{}, current{};
    for (const auto& s : r.result.trace.samples) {
        for (std::size_t w = 0; w < 4; ++w) {
            const bool locked = s.speed > kLockSpeedFloor && s.brake_pedal > 0.0 && s.sigma[w] <= kLockSigma;
            current[w] = locked ? current[w] + period : 0.0;
            longest[w] = std::max(longest[w], current[w]);
        }
    }
    const double worst = *std::max_element(longest.begin(), longest.end());
    const bool ok = r.result.stopped && worst <= kLockMaxTime && !r.result.fault;
    return {ok, fmt("longest lock %.0f ms, stopped at t = %.2f s", worst * 1000.0, r.result.trace.samples.back().t)};
}

Outcome determinism() {
    const auto sc = sim::load_scenario(scenario("bend_burst_rear_right.json"));
    std::ostringstream a, b;
    sim::write_trace_csv(a, sim::run(sc).trace);
    sim::write_trace_csv(b, sim::run(sc).trace);
    return {a.str() == b.str(), fmt("%zu bytes, %s", a.str().size(), a.str() == b.str() ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "torque cut reproduces the label table", 1.0, torque_cut_peaks},
        {2, "yaw-rate reference equals the neutral formula at k_us = 0", 0.0, reference_equivalence},
        {3, "quasi-static loads sum to the weight", 0.0, load_conservation},
        {4, "sub-peak combined slip lies on the friction ellipse", 0.0, friction_ellipse},
        {5, "dispenser conserves the moment and follows the sign rule", 0.0, dispenser_conservation},
        {6, "integrator converges at fourth order", 10.0, integrator_order},
        {7, "bend burst without stability program spins past 360 deg", 60.0, headline_off},
        {8, "bend burst with stability program stays below 5 deg and 2 m", 60.0, headline_on},
        {9, "150 km/h rear burst on a straight stays within 1.5 m", 60.0, high_speed_rear_burst},
        {10, "panic stop never holds a wheel locked beyond 50 ms", 60.0, anti_lock},
        {11, "repeated runs give byte-identical traces", 120.0, determinism},
    };

    std::set<int> only;
    for (int i = 1; i < argc; ++i)
        only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.number))
            continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0.0 && secs > c.budget_s) {
            o.pass = false;
            o.detail += fmt(" [over the %.0f s budget]", c.budget_s);
        }
        std::printf("%s %2d. %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.number, c.title, o.detail.c_str(), secs);
        if (!o.pass)
            ++failed;
    }
    std::fflush(stdout);
    return failed ? 1 : 0;
}
