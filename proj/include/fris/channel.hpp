#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

#include "fris/correlation.hpp"
#include "fris/rng.hpp"

namespace fris {

/// Large-scale parameters of one hop (BS-surface or surface-user).
struct link_params {
    double rho = 1.0;        ///< reference power gain at 1 m, linear
    double alpha = 2.0;      ///< path-loss exponent
    double distance_m = 1.0; ///< hop length in meters

    void validate() const {
        if (!(rho > 0.0) || !(alpha > 0.0) || !(distance_m > 0.0))
            throw std::invalid_argument("link_params: rho, alpha and distance must be positive");
    }
};

/// Link power gain rho * d^(-alpha). Channel amplitudes scale with its
/// square root.
inline double path_loss(const link_params& link) {
    link.validate();
    return link.rho * std::pow(link.distance_m, -link.alpha);
}

/// i.i.d. Rayleigh fading vector: each entry ~ CN(0, path_loss(link)).
inline Eigen::VectorXcd draw_channel(rng_stream& rng, int m, const link_params& link) {
    if (m < 1)
        throw std::invalid_argument("draw_channel: need at least one element");
    const double amplitude = std::sqrt(path_loss(link));
    Eigen::VectorXcd h(m);
    for (int i = 0; i < m; ++i)
        h(i) = amplitude * complex_normal(rng);
    return h;
}

/// One Monte-Carlo draw of both hops. h_ru_corr is the correlation root
/// applied to h_ru; the effective per-element cascade is
/// conj(h_ru_corr[m]) * h_br[m].
struct channel_realization {
    Eigen::VectorXcd h_br;
    Eigen::VectorXcd h_ru;
    Eigen::VectorXcd h_ru_corr;

    int element_count() const noexcept { return static_cast<int>(h_br.size()); }
};

/// Draws h_br then h_ru from `rng` and applies the spatial correlation to
/// the surface-user hop. `correlate_both` additionally correlates h_br,
/// for sensitivity studies only.
inline channel_realization draw_realization(rng_stream& rng, const correlation_model& corr,
                                            const link_params& br, const link_params& ru,
                                            bool correlate_both = false) {
    const int m = static_cast<int>(corr.j.rows());
    channel_realization ch;
    ch.h_br = draw_channel(rng, m, br);
    ch.h_ru = draw_channel(rng, m, ru);
    ch.h_ru_corr = corr.j_sqrt * ch.h_ru;
    if (correlate_both)
        ch.h_br = corr.j_sqrt * ch.h_br;
    return ch;
}

/// Cascaded coefficient of every element: c[m] = conj(h_ru_corr[m]) * h_br[m].
inline Eigen::VectorXcd cascaded_all(const channel_realization& ch) {
    return ch.h_ru_corr.conjugate().cwiseProduct(ch.h_br);
}

/// Cascaded coefficients of a selection, normalized to ascending element
/// order: c_k pairs with the k-th smallest selected index. Rejects
/// duplicate or out-of-range indices.
inline Eigen::VectorXcd cascaded_coefficients(const channel_realization& ch,
                                              std::vector<int> selection) {
    const int m = ch.element_count();
    std::sort(selection.begin(), selection.end());
    for (std::size_t k = 0; k < selection.size(); ++k) {
        if (selection[k] < 0 || selection[k] >= m)
            throw std::invalid_argument("cascaded_coefficients: element index out of range");
        if (k > 0 && selection[k] == selection[k - 1])
            throw std::invalid_argument("cascaded_coefficients: duplicate element index");
    }
    Eigen::VectorXcd c(selection.size());
    for (std::size_t k = 0; k < selection.size(); ++k) {
        const int s = selection[k];
        c(k) = std::conj(ch.h_ru_corr(s)) * ch.h_br(s);
    }
    return c;
}

} // namespace fris
