#pragma once

#include <array>
#include <optional>

#include "iesp/tyre.hpp"
#include "iesp/vehicle.hpp"

namespace iesp::vehicle {

struct ActuationSet {
    double steer = 0.0;                    // road-wheel angle delta [rad], left-positive
    double throttle = 0.0;                 // [0, 1]
    std::array<double, 4> brake_torque{};  // per wheel, >= 0 [N m]
    double torque_cut_percent = 0.0;       // engine torque reduction [0, 100]

    void validate() const;
    // Engine torque after the cut [N m].
    double engine_torque(const VehicleParameters& p) const;
};

struct WheelReport {
    tyre::TyreContactState contact;
    double kinematic_slip = 0.0;  // sigma from compute_slip()
};

// Everything one derivative evaluation learns about the car.
struct PlantOutputs {
    StateDerivative derivative{};
    std::array<WheelReport, 4> wheels{};
    // Horizontal specific force at the GC in body axes (tyres + aero) [m/s^2].
    double accel_long = 0.0;
    double accel_lat = 0.0;
};

struct TyreSetup {
    tyre::InflatedFrictionModel intact;
    std::optional<tyre::BurstEvent> burst;
};

class Plant {
  public:
    Plant(VehicleParameters params, TyreSetup tyres);

    const VehicleParameters& params() const { return params_; }
    const TyreSetup& tyres() const { return tyres_; }

    double inflation(tyre::WheelPosition w, double t) const;

    PlantOutputs evaluate(const VehicleState& s, const ActuationSet& u, double t) const;

  private:
    VehicleParameters params_;
    TyreSetup tyres_;
};

}  // namespace iesp::vehicle
