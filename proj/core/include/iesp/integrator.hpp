#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace iesp {

template <std::size_t N>
using StateVector = std::array<double, N>;

template <std::size_t N>
StateVector<N> axpy(const StateVector<N>& y, double h, const StateVector<N>& k) {
    StateVector<N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + h * k[i];
    return out;
}

template <std::size_t N>
bool all_finite(const StateVector<N>& y) {
    for (double v : y) {
        if (!std::isfinite(v))
            return false;
    }
    return true;
}

// Classical four-stage Runge-Kutta step of y' = f(t, y).
template <std::size_t N, class Field>
StateVector<N> rk4_step(const StateVector<N>& y, double t, double dt, Field&& f) {
    const StateVector<N> k1 = f(t, y);
    const StateVector<N> k2 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
    const StateVector<N> k3 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
    const StateVector<N> k4 = f(t + dt, axpy(y, dt, k3));
    StateVector<N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace iesp
