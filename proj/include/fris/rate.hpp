#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace fris {

struct radio_params {
    double power_w = 1.0; ///< transmit power P
    double noise_w = 1.0; ///< noise power sigma^2

    void validate() const {
        if (!(power_w > 0.0) || !(noise_w > 0.0))
            throw std::invalid_argument("radio_params: power and noise must be positive");
    }
};

/// Discrete phase-shift vector. Phases live on the grid
/// {v * 2*pi / 2^b : v = 1..2^b} and are stored as integer levels so the
/// resolution constraint cannot be violated by rounding and serialized
/// output stays exact. Angles are materialized only at evaluation.
struct phase_vector {
    std::vector<int> levels; ///< each in [1, 2^bits]
    int bits = 1;

    int level_count() const noexcept { return 1 << bits; }
    std::size_t size() const noexcept { return levels.size(); }

    double angle(std::size_t k) const {
        return static_cast<double>(levels[k]) * 2.0 * M_PI / level_count();
    }

    void validate() const {
        if (bits < 1)
            throw std::invalid_argument("phase_vector: need at least 1 bit of resolution");
        for (int v : levels)
            if (v < 1 || v > level_count())
                throw std::invalid_argument("phase_vector: level outside [1, 2^bits]");
    }
};

/// Unit phasors of every level, indexed by level-1. Shared by the hot
/// sampling/evaluation loops so angles are not re-trigged per candidate.
inline std::vector<std::complex<double>> phase_table(int bits) {
    const int v = 1 << bits;
    std::vector<std::complex<double>> table(v);
    for (int level = 1; level <= v; ++level)
        table[level - 1] = std::polar(1.0, level * 2.0 * M_PI / v);
    return table;
}

/// Effective scalar channel sum_k c_k * e^{j*phi_k}.
inline std::complex<double> effective_gain(const Eigen::VectorXcd& c,
                                           const phase_vector& phi) {
    if (static_cast<std::size_t>(c.size()) != phi.size())
        throw std::invalid_argument("effective_gain: coefficient/phase length mismatch");
    std::complex<double> gain{0.0, 0.0};
    for (Eigen::Index k = 0; k < c.size(); ++k)
        gain += c(k) * std::polar(1.0, phi.angle(static_cast<std::size_t>(k)));
    return gain;
}

inline double rate_from_gain(std::complex<double> gain, const radio_params& radio) {
    radio.validate();
    return std::log2(1.0 + radio.power_w * std::norm(gain) / radio.noise_w);
}

/// Achievable rate log2(1 + P*|gain|^2 / sigma^2) in bits/s/Hz.
inline double achievable_rate(const Eigen::VectorXcd& c, const phase_vector& phi,
                              const radio_params& radio) {
    return rate_from_gain(effective_gain(c, phi), radio);
}

} // namespace fris
