#pragma once

#include "wgfocus/units.hpp"

namespace wgfocus {

/// Geometry of a hollow rectangular waveguide.
struct WaveguideSpec {
    double broad_dim_m = 22.9e-3;   ///< a, sets the TE10 cutoff
    double narrow_dim_m = 10.2e-3;  ///< b
    double length_m = 0.25;
    double medium_speed = units::kSpeedOfLight;

    /// Throws ConfigError unless a > b > 0, L > 0, c > 0.
    void validate() const;

    friend bool operator==(const WaveguideSpec&, const WaveguideSpec&) = default;
};

/// Dispersion of the TE10 mode, omega(k) = c * sqrt(k^2 + k_c^2).
///
/// Only propagating frequencies (omega >= omega_c) are in the domain of the
/// inverse relations; anything below cutoff raises EvanescentFrequencyError.
class DispersionModel {
public:
    DispersionModel(double cutoff_angular_frequency, double medium_speed);

    double cutoff_angular_frequency() const { return cutoff_; }
    double cutoff_wavevector() const { return cutoff_ / speed_; }
    double medium_speed() const { return speed_; }

    double omega_of_k(double k) const;
    double k_of_omega(double omega) const;
    /// d omega / d k. Zero at cutoff, approaches c from below.
    double group_velocity(double omega) const;
    /// omega / k. Requires omega strictly above cutoff.
    double phase_velocity(double omega) const;
    double guide_wavelength(double omega) const;

    friend bool operator==(const DispersionModel&, const DispersionModel&) = default;

private:
    double cutoff_;
    double speed_;
};

/// TE10 cutoff from the broad dimension: omega_c = pi c / a.
DispersionModel cutoff_from_geometry(const WaveguideSpec& spec);

/// Cutoff angular frequency of the TE_mn mode; (1,0) equals cutoff_from_geometry.
/// Higher modes are carried for validation only, they never receive field.
double mode_cutoff_angular_frequency(const WaveguideSpec& spec, int m, int n);

}  // namespace wgfocus
