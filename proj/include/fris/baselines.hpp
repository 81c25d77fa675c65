#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fris/ceo.hpp"
#include "fris/channel.hpp"
#include "fris/grid.hpp"
#include "fris/rate.hpp"

namespace fris {

/// Thrown when an exhaustive enumeration would exceed its evaluation
/// budget. Enumeration never truncates silently.
struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct oracle_result {
    std::vector<std::uint8_t> best_xi;
    phase_vector best_phi;
    double best_rate = 0.0;
    std::uint64_t evaluations = 0;
};

/// Conventional-RIS layout: an r x c sub-lattice spanning the full
/// aperture. `exact` is false when m_hat has no factorization fitting the
/// grid and the layout fell back to the smallest balanced super-lattice
/// with the highest-index surplus positions dropped.
struct subgrid_selection {
    std::vector<std::uint8_t> mask;
    int rows = 0;
    int cols = 0;
    bool exact = true;
};

namespace detail {

/// k indices evenly spread over {0..n-1} including both endpoints,
/// round(i*(n-1)/(k-1)) with ties-to-even; the center index for k = 1.
inline std::vector<int> evenly_spaced_indices(int n, int k) {
    std::vector<int> indices(k);
    if (k == 1) {
        indices[0] = static_cast<int>(std::nearbyint((n - 1) / 2.0));
        return indices;
    }
    for (int i = 0; i < k; ++i)
        indices[i] = static_cast<int>(
            std::nearbyint(static_cast<double>(i) * (n - 1) / (k - 1)));
    return indices;
}

} // namespace detail

/// Evenly spaced sub-lattice of m_hat elements emulating a conventional
/// RIS that fills the same aperture with fewer elements.
inline subgrid_selection uniform_subgrid_selection(const surface_grid& grid, int m_hat) {
    grid.validate();
    const int m = grid.element_count();
    if (m_hat < 1 || m_hat > m)
        throw std::invalid_argument("uniform_subgrid_selection: need 1 <= m_hat <= M");

    const int n_rows = grid.mz;
    const int n_cols = grid.my;

    subgrid_selection result;
    result.exact = false;
    // exact factorization first, most balanced wins
    int best_gap = std::numeric_limits<int>::max();
    for (int r = 1; r <= n_rows; ++r) {
        if (m_hat % r != 0)
            continue;
        const int c = m_hat / r;
        if (c > n_cols)
            continue;
        const int gap = std::abs(r - c);
        if (gap < best_gap) {
            best_gap = gap;
            result.rows = r;
            result.cols = c;
            result.exact = true;
        }
    }
    if (!result.exact) {
        // smallest balanced cover r*c >= m_hat; surplus dropped below
        int best_area = std::numeric_limits<int>::max();
        best_gap = std::numeric_limits<int>::max();
        for (int r = 1; r <= n_rows; ++r)
            for (int c = 1; c <= n_cols; ++c) {
                if (r * c < m_hat)
                    continue;
                const int gap = std::abs(r - c);
                if (gap < best_gap || (gap == best_gap && r * c < best_area)) {
                    best_gap = gap;
                    best_area = r * c;
                    result.rows = r;
                    result.cols = c;
                }
            }
    }

    const std::vector<int> rows = detail::evenly_spaced_indices(n_rows, result.rows);
    const std::vector<int> cols = detail::evenly_spaced_indices(n_cols, result.cols);

    std::vector<int> linear;
    linear.reserve(static_cast<std::size_t>(result.rows) * result.cols);
    for (int r : rows)
        for (int c : cols)
            linear.push_back(r * grid.my + c);
    std::sort(linear.begin(), linear.end());
    if (static_cast<int>(linear.size()) > m_hat)
        linear.resize(m_hat); // drop the highest-index surplus

    result.mask.assign(m, 0);
    for (int index : linear)
        result.mask[index] = 1;
    return result;
}

/// Per-coefficient co-phasing on the discrete grid: the level whose angle
/// is closest to -arg(c_k), ties toward the lower level. Guarantees
/// Re(c_k * e^{j*phi_k}) >= |c_k| * cos(pi / 2^b). Zero coefficients get
/// the top level (angle 2*pi).
inline phase_vector quantized_alignment_phases(const Eigen::VectorXcd& c, int bits) {
    if (bits < 1)
        throw std::invalid_argument("quantized_alignment_phases: need at least 1 bit");
    const int v = 1 << bits;
    phase_vector phi;
    phi.bits = bits;
    phi.levels.resize(c.size());

    for (Eigen::Index k = 0; k < c.size(); ++k) {
        if (c(k) == std::complex<double>{0.0, 0.0}) {
            phi.levels[k] = v;
            continue;
        }
        const double target = -std::arg(c(k));
        int best_level = 1;
        double best_distance = std::numeric_limits<double>::infinity();
        for (int level = 1; level <= v; ++level) {
            const double angle = level * 2.0 * M_PI / v;
            double delta = std::fmod(std::abs(angle - target), 2.0 * M_PI);
            delta = std::min(delta, 2.0 * M_PI - delta);
            if (delta < best_distance) {
                best_distance = delta;
                best_level = level;
            }
        }
        phi.levels[k] = best_level;
    }
    return phi;
}

/// Number of feasible points C(M, m_hat) * V^m_hat, or nullopt on overflow.
inline std::optional<std::uint64_t> enumeration_size(int m, int m_hat, int bits) {
    long double binom = 1.0L;
    for (int k = 1; k <= m_hat; ++k)
        binom = binom * (m - m_hat + k) / k;
    if (binom > 1e18L)
        return std::nullopt;
    std::uint64_t count = static_cast<std::uint64_t>(std::llroundl(binom));
    const std::uint64_t v = 1ULL << bits;
    for (int k = 0; k < m_hat; ++k) {
        if (count > std::numeric_limits<std::uint64_t>::max() / v)
            return std::nullopt;
        count *= v;
    }
    return count;
}

/// Ground-truth search over every feasible (subset, phase assignment).
/// Enumeration is lexicographic in the subset then the phase levels, and
/// the first maximizer encountered wins, so the result is deterministic.
inline oracle_result exhaustive_search(const channel_realization& ch,
                                       const radio_params& radio, int m_hat, int bits,
                                       std::uint64_t budget = 1'000'000) {
    radio.validate();
    const int m = ch.element_count();
    if (m_hat < 1 || m_hat > m)
        throw std::invalid_argument("exhaustive_search: need 1 <= m_hat <= M");
    const auto total = enumeration_size(m, m_hat, bits);
    if (!total || *total > budget)
        throw budget_error("exhaustive_search: C(M,m_hat)*V^m_hat exceeds the budget of " +
                           std::to_string(budget) + " evaluations");

    const auto elements = cascaded_all(ch);
    const auto table = phase_table(bits);
    const int v = 1 << bits;

    oracle_result result;
    result.best_rate = -1.0;
    result.best_phi.bits = bits;

    std::vector<int> subset(m_hat);
    std::iota(subset.begin(), subset.end(), 0);
    std::vector<int> levels(m_hat);

    while (true) {
        levels.assign(m_hat, 1);
        while (true) {
            std::complex<double> gain{0.0, 0.0};
            for (int k = 0; k < m_hat; ++k)
                gain += elements(subset[k]) * table[levels[k] - 1];
            const double rate = rate_from_gain(gain, radio);
            ++result.evaluations;
            if (rate > result.best_rate) {
                result.best_rate = rate;
                result.best_phi.levels = levels;
                result.best_xi.assign(m, 0);
                for (int index : subset)
                    result.best_xi[index] = 1;
            }

            int slot = m_hat - 1;
            while (slot >= 0 && levels[slot] == v)
                levels[slot--] = 1;
            if (slot < 0)
                break;
            ++levels[slot];
        }

        int pos = m_hat - 1;
        while (pos >= 0 && subset[pos] == m - m_hat + pos)
            --pos;
        if (pos < 0)
            break;
        ++subset[pos];
        for (int k = pos + 1; k < m_hat; ++k)
            subset[k] = subset[k - 1] + 1;
    }
    return result;
}

struct baseline_result {
    candidate best;            ///< phase-optimized candidate on the fixed layout
    double alignment_rate = 0; ///< quantized co-phasing rate on the same layout
    ceo_trace trace;
};

/// Candidate for the fixed conventional layout with quantized co-phasing.
inline candidate aligned_subgrid_candidate(const channel_realization& ch,
                                           const radio_params& radio,
                                           const surface_grid& grid, int m_hat, int bits) {
    const subgrid_selection layout = uniform_subgrid_selection(grid, m_hat);
    std::vector<int> selected;
    selected.reserve(m_hat);
    for (int i = 0; i < grid.element_count(); ++i)
        if (layout.mask[i])
            selected.push_back(i);

    candidate result;
    result.xi = layout.mask;
    const Eigen::VectorXcd c = cascaded_coefficients(ch, selected);
    result.phi = quantized_alignment_phases(c, bits);
    result.rate = achievable_rate(c, result.phi, radio);
    return result;
}

/// Conventional-RIS benchmark: selection frozen to the uniform sub-lattice,
/// phases optimized by the cross-entropy loop. Freezing works by starting
/// from a binary g, which every frequency refit then reproduces.
inline baseline_result ris_baseline(const channel_realization& ch, const radio_params& radio,
                                    const surface_grid& grid, int m_hat, int bits,
                                    const ceo_config& config, rng_stream& rng) {
    const subgrid_selection layout = uniform_subgrid_selection(grid, m_hat);
    tilting_params params = init_params(ch.element_count(), m_hat, bits);
    for (int i = 0; i < ch.element_count(); ++i)
        params.g[i] = layout.mask[i] ? 1.0 : 0.0;

    ceo_result ceo = optimize_from(ch, radio, m_hat, bits, config, rng, std::move(params));

    baseline_result result;
    result.best = std::move(ceo.best);
    result.trace = std::move(ceo.trace);
    result.alignment_rate = aligned_subgrid_candidate(ch, radio, grid, m_hat, bits).rate;
    return result;
}

} // namespace fris
