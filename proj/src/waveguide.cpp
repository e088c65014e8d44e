#include "wgfocus/waveguide.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wgfocus/errors.hpp"

namespace wgfocus {

void WaveguideSpec::validate() const {
    if (!(narrow_dim_m > 0.0) || !(broad_dim_m > narrow_dim_m)) {
        throw ConfigError("waveguide: need broad_dim > narrow_dim > 0");
    }
    if (!(length_m > 0.0)) throw ConfigError("waveguide: length must be positive");
    if (!(medium_speed > 0.0)) throw ConfigError("waveguide: medium speed must be positive");
}

DispersionModel::DispersionModel(double cutoff_angular_frequency, double medium_speed)
    : cutoff_(cutoff_angular_frequency), speed_(medium_speed) {
    if (!(cutoff_ > 0.0) || !std::isfinite(cutoff_)) {
        throw ConfigError("dispersion: cutoff frequency must be positive");
    }
    if (!(speed_ > 0.0) || !std::isfinite(speed_)) {
        throw ConfigError("dispersion: medium speed must be positive");
    }
}

double DispersionModel::omega_of_k(double k) const {
    if (!(k >= 0.0)) throw ConfigError("omega_of_k: wavevector must be non-negative");
    return speed_ * std::hypot(k, cutoff_wavevector());
}

double DispersionModel::k_of_omega(double omega) const {
    if (!(omega >= cutoff_)) {
        throw EvanescentFrequencyError("k_of_omega: " + std::to_string(omega) +
                                       " rad/s is below the cutoff");
    }
    // (w - wc)(w + wc) keeps precision close to cutoff.
    return std::sqrt((omega - cutoff_) * (omega + cutoff_)) / speed_;
}

double DispersionModel::group_velocity(double omega) const {
    if (!(omega >= cutoff_)) {
        throw EvanescentFrequencyError("group_velocity: frequency below cutoff");
    }
    return speed_ * std::sqrt((omega - cutoff_) * (omega + cutoff_)) / omega;
}

double DispersionModel::phase_velocity(double omega) const {
    if (!(omega > cutoff_)) {
        throw EvanescentFrequencyError("phase_velocity: frequency must exceed cutoff");
    }
    return omega / k_of_omega(omega);
}

double DispersionModel::guide_wavelength(double omega) const {
    if (!(omega > cutoff_)) {
        throw EvanescentFrequencyError("guide_wavelength: frequency must exceed cutoff");
    }
    return units::kTwoPi / k_of_omega(omega);
}

DispersionModel cutoff_from_geometry(const WaveguideSpec& spec) {
    spec.validate();
    return DispersionModel(std::numbers::pi * spec.medium_speed / spec.broad_dim_m,
                           spec.medium_speed);
}

double mode_cutoff_angular_frequency(const WaveguideSpec& spec, int m, int n) {
    spec.validate();
    if (m < 0 || n < 0 || (m == 0 && n == 0)) {
        throw ConfigError("mode indices must be non-negative and not both zero");
    }
    const double kx = m * std::numbers::pi / spec.broad_dim_m;
    const double ky = n * std::numbers::pi / spec.narrow_dim_m;
    return spec.medium_speed * std::hypot(kx, ky);
}

}  // namespace wgfocus
