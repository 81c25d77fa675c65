#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fris/channel.hpp"
#include "fris/rate.hpp"
#include "fris/rng.hpp"

namespace fris {

/// Parameters of the joint sampling distribution: a row-stochastic phase
/// probability matrix P (one row per phase slot, one column per level)
/// and a vector g of per-element Bernoulli on-probabilities.
struct tilting_params {
    int m = 0;     ///< elements on the surface
    int m_hat = 0; ///< phase slots (= active elements)
    int bits = 1;  ///< phase resolution

    std::vector<double> p; ///< m_hat x V, row-major
    std::vector<double> g; ///< length m

    int level_count() const noexcept { return 1 << bits; }

    double& p_at(int slot, int level_index) { return p[slot * level_count() + level_index]; }
    double p_at(int slot, int level_index) const { return p[slot * level_count() + level_index]; }
};

/// One feasible solution: on-off vector, per-slot phases and its rate.
/// Slot k carries the phase of the k-th smallest selected element index.
struct candidate {
    std::vector<std::uint8_t> xi;
    phase_vector phi;
    double rate = 0.0;
};

struct ceo_config {
    int sample_count_a = 0;    ///< candidates per iteration
    double elite_frac = 0.05;  ///< fraction kept for the parameter refit
    double smoothing = 0.55;   ///< weight of the refit vs. the starting params
    double tol = 1e-4;         ///< stop when the incumbent improves by <= tol
    int patience = 10;         ///< consecutive stalled iterations before stopping
    int max_iter = 500;

    void validate() const {
        if (sample_count_a < 2)
            throw std::invalid_argument("ceo_config: need at least 2 samples per iteration");
        if (!(elite_frac > 0.0 && elite_frac < 1.0))
            throw std::invalid_argument("ceo_config: elite fraction must be in (0,1)");
        if (!(smoothing > 0.0 && smoothing < 1.0))
            throw std::invalid_argument("ceo_config: smoothing must be in (0,1)");
        if (!(tol > 0.0))
            throw std::invalid_argument("ceo_config: tolerance must be positive");
        if (patience < 1)
            throw std::invalid_argument("ceo_config: patience must be >= 1");
        if (max_iter < 1)
            throw std::invalid_argument("ceo_config: max_iter must be >= 1");
    }

    int elite_count() const {
        // ceil(zeta*A); the epsilon keeps 0.05*60 from landing above 3.0
        const int count = static_cast<int>(std::ceil(elite_frac * sample_count_a - 1e-9));
        return std::max(count, 1);
    }
};

struct ceo_trace {
    std::vector<double> best_rate;  ///< incumbent after each iteration (non-decreasing)
    std::vector<double> elite_mean; ///< mean elite rate per iteration
    int iterations = 0;
    bool converged = false;
};

/// Uniform starting distribution: every level equally likely, every
/// element on with probability m_hat / m.
inline tilting_params init_params(int m, int m_hat, int bits) {
    if (m_hat < 1 || m_hat > m)
        throw std::invalid_argument("init_params: need 1 <= m_hat <= m");
    if (bits < 1)
        throw std::invalid_argument("init_params: need at least 1 phase bit");
    tilting_params params;
    params.m = m;
    params.m_hat = m_hat;
    params.bits = bits;
    params.p.assign(static_cast<std::size_t>(m_hat) * params.level_count(),
                    1.0 / params.level_count());
    params.g.assign(m, static_cast<double>(m_hat) / m);
    return params;
}

/// Inverse-CDF draw of one phase level from a row of P: the smallest level
/// n with z <= P_1 + ... + P_n. Zero-probability levels are skipped so a
/// degenerate row always returns its support.
inline int sample_level(const tilting_params& params, int slot, double z) {
    const int v = params.level_count();
    double cumulative = 0.0;
    int last_supported = 1;
    for (int idx = 0; idx < v; ++idx) {
        const double prob = params.p_at(slot, idx);
        if (prob <= 0.0)
            continue;
        cumulative += prob;
        last_supported = idx + 1;
        if (z <= cumulative)
            return last_supported;
    }
    return last_supported; // cumulative fell short of 1 by rounding
}

inline phase_vector sample_phases(const tilting_params& params, rng_stream& rng) {
    phase_vector phi;
    phi.bits = params.bits;
    phi.levels.resize(params.m_hat);
    for (int slot = 0; slot < params.m_hat; ++slot)
        phi.levels[slot] = sample_level(params, slot, uniform01(rng));
    return phi;
}

/// Independent Bernoulli(g_m) draw per element; not yet feasible.
inline std::vector<std::uint8_t> sample_selection(const tilting_params& params,
                                                  rng_stream& rng) {
    std::vector<std::uint8_t> xi(params.m);
    for (int m = 0; m < params.m; ++m)
        xi[m] = uniform01(rng) < params.g[m] ? 1 : 0;
    return xi;
}

/// Forces the on-count to exactly m_hat: surplus ones are cleared lowest
/// probability first, missing ones are raised highest probability first.
/// Equal probabilities resolve toward the lower element index.
inline std::vector<std::uint8_t> repair_selection(std::vector<std::uint8_t> xi,
                                                  const tilting_params& params, int m_hat) {
    const int m = static_cast<int>(xi.size());
    int ones = static_cast<int>(std::count(xi.begin(), xi.end(), std::uint8_t{1}));

    if (ones > m_hat) {
        std::vector<int> on;
        on.reserve(ones);
        for (int i = 0; i < m; ++i)
            if (xi[i])
                on.push_back(i);
        const auto weaker = [&](int a, int b) {
            return params.g[a] != params.g[b] ? params.g[a] < params.g[b] : a < b;
        };
        const int surplus = ones - m_hat;
        std::nth_element(on.begin(), on.begin() + (surplus - 1), on.end(), weaker);
        for (int k = 0; k < surplus; ++k)
            xi[on[k]] = 0;
    } else if (ones < m_hat) {
        std::vector<int> off;
        off.reserve(m - ones);
        for (int i = 0; i < m; ++i)
            if (!xi[i])
                off.push_back(i);
        const auto stronger = [&](int a, int b) {
            return params.g[a] != params.g[b] ? params.g[a] > params.g[b] : a < b;
        };
        const int missing = m_hat - ones;
        std::nth_element(off.begin(), off.begin() + (missing - 1), off.end(), stronger);
        for (int k = 0; k < missing; ++k)
            xi[off[k]] = 1;
    }
    return xi;
}

/// Top ceil(elite_frac * size) candidates by rate, ties resolved toward
/// the earlier sample index.
inline std::vector<candidate> select_elite(const std::vector<candidate>& candidates,
                                           double elite_frac) {
    if (candidates.empty())
        throw std::invalid_argument("select_elite: empty candidate set");
    ceo_config sizing;
    sizing.sample_count_a = static_cast<int>(candidates.size());
    sizing.elite_frac = elite_frac;
    const int count = std::min<int>(sizing.elite_count(), sizing.sample_count_a);

    std::vector<int> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return candidates[a].rate > candidates[b].rate;
    });

    std::vector<candidate> elite;
    elite.reserve(count);
    for (int k = 0; k < count; ++k)
        elite.push_back(candidates[order[k]]);
    return elite;
}

/// Cross-entropy refit: both distributions collapse to elite empirical
/// frequencies.
inline tilting_params update_parameters(const std::vector<candidate>& elite, int m,
                                        int m_hat, int bits) {
    if (elite.empty())
        throw std::invalid_argument("update_parameters: empty elite set");
    tilting_params params;
    params.m = m;
    params.m_hat = m_hat;
    params.bits = bits;
    params.p.assign(static_cast<std::size_t>(m_hat) * params.level_count(), 0.0);
    params.g.assign(m, 0.0);

    for (const candidate& member : elite) {
        for (int slot = 0; slot < m_hat; ++slot)
            params.p_at(slot, member.phi.levels[slot] - 1) += 1.0;
        for (int i = 0; i < m; ++i)
            params.g[i] += member.xi[i];
    }
    const double scale = 1.0 / static_cast<double>(elite.size());
    for (double& value : params.p)
        value *= scale;
    for (double& value : params.g)
        value *= scale;
    return params;
}

/// Convex blend omega*fresh + (1-omega)*previous, entrywise.
inline tilting_params smooth(const tilting_params& fresh, const tilting_params& previous,
                             double omega) {
    if (fresh.p.size() != previous.p.size() || fresh.g.size() != previous.g.size())
        throw std::invalid_argument("smooth: parameter shapes differ");
    tilting_params blended = fresh;
    for (std::size_t i = 0; i < blended.p.size(); ++i)
        blended.p[i] = omega * fresh.p[i] + (1.0 - omega) * previous.p[i];
    for (std::size_t i = 0; i < blended.g.size(); ++i)
        blended.g[i] = omega * fresh.g[i] + (1.0 - omega) * previous.g[i];
    return blended;
}

struct ceo_result {
    candidate best;
    ceo_trace trace;
};

/// Cross-entropy loop from an explicit starting distribution. Used
/// directly by the phase-only baseline, which freezes the selection by
/// passing a binary g (frequency refits then keep it binary). Candidate
/// a of iteration t draws from a sub-stream derived from (master seed,
/// t, a), so evaluations may be scheduled in any order.
///
/// Each refit is smoothed against the starting distribution, not the
/// previous iterate. The fixed anchor keeps every configuration
/// sampleable at a constant floor; a running blend decays that floor
/// geometrically and strands the search on whatever the first few
/// elites happened to favor.
inline ceo_result optimize_from(const channel_realization& ch, const radio_params& radio,
                                int m_hat, int bits, const ceo_config& config,
                                rng_stream& rng, tilting_params params) {
    config.validate();
    radio.validate();
    const int m = ch.element_count();
    if (m_hat < 1 || m_hat > m)
        throw std::invalid_argument("optimize: need 1 <= m_hat <= m");
    const tilting_params anchor = params;

    const std::uint64_t master = rng();
    const auto elements = cascaded_all(ch);
    const auto table = phase_table(bits);
    const double snr_scale = radio.power_w / radio.noise_w;

    ceo_result result;
    result.best.rate = -std::numeric_limits<double>::infinity();

    int stalled = 0;
    std::vector<candidate> candidates(config.sample_count_a);
    std::vector<int> selected;
    selected.reserve(m_hat);

    for (int iter = 1; iter <= config.max_iter; ++iter) {
        for (int a = 0; a < config.sample_count_a; ++a) {
            rng_stream sub(derive_seed(master, static_cast<std::uint64_t>(iter),
                                       static_cast<std::uint64_t>(a)));
            candidate& sample = candidates[a];
            sample.xi = repair_selection(sample_selection(params, sub), params, m_hat);
            sample.phi = sample_phases(params, sub);

            selected.clear();
            for (int i = 0; i < m; ++i)
                if (sample.xi[i])
                    selected.push_back(i);
            assert(static_cast<int>(selected.size()) == m_hat);

            std::complex<double> gain{0.0, 0.0};
            for (int k = 0; k < m_hat; ++k) {
                const int level = sample.phi.levels[k];
                assert(level >= 1 && level <= (1 << bits));
                gain += elements(selected[k]) * table[level - 1];
            }
            sample.rate = std::log2(1.0 + snr_scale * std::norm(gain));
        }

        const std::vector<candidate> elite = select_elite(candidates, config.elite_frac);
        params = smooth(update_parameters(elite, m, m_hat, bits), anchor, config.smoothing);

        const double previous_best = result.best.rate;
        for (const candidate& sample : candidates)
            if (sample.rate > result.best.rate)
                result.best = sample;

        double elite_sum = 0.0;
        for (const candidate& member : elite)
            elite_sum += member.rate;
        result.trace.best_rate.push_back(result.best.rate);
        result.trace.elite_mean.push_back(elite_sum / elite.size());
        result.trace.iterations = iter;

        // A stall of one iteration says little while the distribution is
        // still close to uniform, so the incumbent must stay put for
        // `patience` consecutive iterations before the loop stops.
        if (iter >= 2 && std::abs(result.best.rate - previous_best) <= config.tol)
            ++stalled;
        else
            stalled = 0;
        if (stalled >= config.patience) {
            result.trace.converged = true;
            break;
        }
    }
    return result;
}

/// Joint on-off selection and discrete phase optimization starting from
/// the uniform distribution.
inline ceo_result optimize(const channel_realization& ch, const radio_params& radio,
                           int m_hat, int bits, const ceo_config& config, rng_stream& rng) {
    return optimize_from(ch, radio, m_hat, bits, config, rng,
                         init_params(ch.element_count(), m_hat, bits));
}

} // namespace fris
