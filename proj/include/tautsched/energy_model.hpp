#ifndef TAUTSCHED_ENERGY_MODEL_HPP
#define TAUTSCHED_ENERGY_MODEL_HPP

#include <cmath>
#include <string>

#include "tautsched/common.hpp"
#include "tautsched/schedule.hpp"

namespace tautsched {

enum class ModelKind { UnitShannon, BandlimitedShannon, Monomial };

/// Convex increasing rate->power map f with f(0) = 0.
///
/// UnitShannon:        p = sigma2 * (2^(2r) - 1)
/// BandlimitedShannon: p = (W * sigma2 / h2) * (2^(r/W) - 1)
/// Monomial:           p = r^k   (test-only convex family)
struct EnergyModel {
    ModelKind kind = ModelKind::UnitShannon;
    double bandwidth_hz = 1.0;   // W
    double noise_power = 1.0;    // sigma^2
    double channel_gain = 1.0;   // |h|^2
    double exponent = 2.0;       // k, Monomial only

    static EnergyModel unit_shannon(double sigma2 = 1.0) {
        if (!(sigma2 > 0.0)) throw validation_error("unit_shannon: sigma2 must be positive");
        EnergyModel m;
        m.kind = ModelKind::UnitShannon;
        m.noise_power = sigma2;
        return m;
    }

    static EnergyModel bandlimited_shannon(double bandwidth_hz, double sigma2, double h2) {
        if (!(bandwidth_hz > 0.0) || !(sigma2 > 0.0) || !(h2 > 0.0))
            throw validation_error("bandlimited_shannon: parameters must be positive");
        EnergyModel m;
        m.kind = ModelKind::BandlimitedShannon;
        m.bandwidth_hz = bandwidth_hz;
        m.noise_power = sigma2;
        m.channel_gain = h2;
        return m;
    }

    static EnergyModel monomial(double k = 2.0) {
        if (!(k >= 1.0)) throw validation_error("monomial: exponent must be >= 1");
        EnergyModel m;
        m.kind = ModelKind::Monomial;
        m.exponent = k;
        return m;
    }
};

constexpr double kLn2 = 0.69314718055994530941723212145818;

/// Power (watts) needed to sustain `rate` bits/s.
inline double power_of_rate(const EnergyModel& m, double rate) {
    if (rate < 0.0) throw std::domain_error("power_of_rate: negative rate");
    switch (m.kind) {
        case ModelKind::UnitShannon:
            return m.noise_power * std::expm1(2.0 * rate * kLn2);
        case ModelKind::BandlimitedShannon:
            return m.bandwidth_hz * m.noise_power / m.channel_gain *
                   std::expm1(rate / m.bandwidth_hz * kLn2);
        case ModelKind::Monomial:
            return rate == 0.0 ? 0.0 : std::pow(rate, m.exponent);
    }
    return 0.0;
}

/// Exact inverse of power_of_rate.
inline double rate_of_power(const EnergyModel& m, double power) {
    if (power < 0.0) throw std::domain_error("rate_of_power: negative power");
    switch (m.kind) {
        case ModelKind::UnitShannon:
            return 0.5 * std::log1p(power / m.noise_power) / kLn2;
        case ModelKind::BandlimitedShannon:
            return m.bandwidth_hz *
                   std::log1p(power * m.channel_gain / (m.bandwidth_hz * m.noise_power)) / kLn2;
        case ModelKind::Monomial:
            return power == 0.0 ? 0.0 : std::pow(power, 1.0 / m.exponent);
    }
    return 0.0;
}

/// d/dr power_of_rate.
inline double marginal_power(const EnergyModel& m, double rate) {
    if (rate < 0.0) throw std::domain_error("marginal_power: negative rate");
    switch (m.kind) {
        case ModelKind::UnitShannon:
            return m.noise_power * 2.0 * kLn2 * std::exp(2.0 * rate * kLn2);
        case ModelKind::BandlimitedShannon:
            return m.noise_power / m.channel_gain * kLn2 * std::exp(rate / m.bandwidth_hz * kLn2);
        case ModelKind::Monomial:
            return rate == 0.0 && m.exponent > 1.0 ? 0.0
                                                   : m.exponent * std::pow(rate, m.exponent - 1.0);
    }
    return 0.0;
}

/// d2/dr2 power_of_rate.
inline double curvature_power(const EnergyModel& m, double rate) {
    switch (m.kind) {
        case ModelKind::UnitShannon:
            return m.noise_power * 4.0 * kLn2 * kLn2 * std::exp(2.0 * rate * kLn2);
        case ModelKind::BandlimitedShannon:
            return m.noise_power / (m.channel_gain * m.bandwidth_hz) * kLn2 * kLn2 *
                   std::exp(rate / m.bandwidth_hz * kLn2);
        case ModelKind::Monomial: {
            double k = m.exponent;
            if (k == 2.0) return 2.0;
            if (rate <= 0.0) return k > 2.0 ? 0.0 : 0.0;  // one-sided; callers guard r > 0
            return k * (k - 1.0) * std::pow(rate, k - 2.0);
        }
    }
    return 0.0;
}

/// Total energy of a piecewise-constant-rate schedule: sum f(r_k) * dt_k.
inline double schedule_energy(const EnergyModel& m, const Schedule& schedule) {
    schedule.validate();
    double e = 0.0;
    for (const auto& s : schedule.segments) e += power_of_rate(m, s.rate) * (s.t1 - s.t0);
    return e;
}

inline double segments_energy(const EnergyModel& m, const std::vector<Segment>& segments) {
    double e = 0.0;
    for (const auto& s : segments) e += power_of_rate(m, s.rate) * (s.t1 - s.t0);
    return e;
}

}  // namespace tautsched

#endif
