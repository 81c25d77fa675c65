#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "fris/baselines.hpp"
#include "fris/ceo.hpp"
#include "fris/channel.hpp"
#include "fris/config.hpp"
#include "fris/correlation.hpp"
#include "fris/grid.hpp"
#include "fris/rate.hpp"
#include "fris/rng.hpp"
#include "fris/units.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fris {

/// One CSV row: the outcome of one scheme on one trial.
struct result_record {
    int trial = 0;
    scheme_kind scheme = scheme_kind::fris;
    int my = 0;
    int mz = 0;
    int m_hat = 0;
    int bits = 0;
    std::uint64_t seed = 0;
    int iterations = 0;
    bool converged = false;
    double rate_bps_hz = 0.0;
    double wall_ms = 0.0;
};

/// Element lattice implied by the config: a square aperture of side
/// surface_side_lambda wavelengths with elements spanning the edges.
inline surface_grid derive_grid(const experiment_config& config,
                                std::vector<std::string>* warnings = nullptr) {
    if (config.my != config.mz)
        throw config_error("only square grids are supported (my must equal mz)");
    if (config.my < 2)
        throw config_error("my must be >= 2 so elements span the aperture edges");
    if (!(config.fc_hz > 0.0) || !(config.surface_side_lambda > 0.0))
        throw config_error("fc_hz and surface_side_lambda must be positive");

    surface_grid grid;
    grid.my = config.my;
    grid.mz = config.mz;
    grid.wavelength_m = speed_of_light_mps / config.fc_hz;
    grid.spacing_m = config.surface_side_lambda * grid.wavelength_m / (config.my - 1);
    grid.validate();
    if (warnings && !grid.spacing_below_half_wavelength()) {
        std::ostringstream note;
        note << "element spacing " << grid.spacing_m << " m is not below lambda/2 = "
             << grid.wavelength_m / 2.0 << " m; the dense-grid premise does not hold";
        warnings->push_back(note.str());
    }
    return grid;
}

namespace detail {

/// Fixed per-scheme stream index, independent of which schemes are enabled,
/// so adding a scheme to the list never reshuffles the others' results.
inline std::uint64_t scheme_stream_index(scheme_kind scheme) {
    switch (scheme) {
    case scheme_kind::fris: return 1;
    case scheme_kind::ris: return 2;
    case scheme_kind::aligned: return 3;
    case scheme_kind::oracle: return 4;
    }
    throw std::logic_error("scheme_stream_index: unreachable");
}

struct trial_context {
    const experiment_config& config;
    const surface_grid& grid;
    const correlation_model& corr;
    link_params br;
    link_params ru;
    radio_params radio;
    ceo_config ceo;
};

inline result_record run_scheme(const trial_context& ctx, const channel_realization& ch,
                                int trial, scheme_kind scheme, std::uint64_t scheme_seed) {
    result_record record;
    record.trial = trial;
    record.scheme = scheme;
    record.my = ctx.config.my;
    record.mz = ctx.config.mz;
    record.m_hat = ctx.config.m_hat;
    record.bits = ctx.config.bits;
    record.seed = scheme_seed;

    const auto start = std::chrono::steady_clock::now();
    rng_stream rng(scheme_seed);
    switch (scheme) {
    case scheme_kind::fris: {
        const ceo_result result =
            optimize(ch, ctx.radio, ctx.config.m_hat, ctx.config.bits, ctx.ceo, rng);
        record.iterations = result.trace.iterations;
        record.converged = result.trace.converged;
        record.rate_bps_hz = result.best.rate;
        break;
    }
    case scheme_kind::ris: {
        const baseline_result result = ris_baseline(ch, ctx.radio, ctx.grid, ctx.config.m_hat,
                                                    ctx.config.bits, ctx.ceo, rng);
        record.iterations = result.trace.iterations;
        record.converged = result.trace.converged;
        record.rate_bps_hz = result.best.rate;
        break;
    }
    case scheme_kind::aligned: {
        const candidate result = aligned_subgrid_candidate(ch, ctx.radio, ctx.grid,
                                                           ctx.config.m_hat, ctx.config.bits);
        record.iterations = 0;
        record.converged = true;
        record.rate_bps_hz = result.rate;
        break;
    }
    case scheme_kind::oracle: {
        const oracle_result result = exhaustive_search(ch, ctx.radio, ctx.config.m_hat,
                                                       ctx.config.bits, ctx.config.oracle_budget);
        record.iterations = 0;
        record.converged = true;
        record.rate_bps_hz = result.best_rate;
        break;
    }
    }
    if (ctx.config.measure_time) {
        const auto stop = std::chrono::steady_clock::now();
        record.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    }
    return record;
}

} // namespace detail

/// Runs all requested schemes over `trials` independent channel draws.
/// Within a trial every scheme sees the identical realization, so scheme
/// comparisons are paired. Output is a pure function of the config.
inline std::vector<result_record> run_experiment(const experiment_config& config,
                                                 std::vector<std::string>* warnings = nullptr) {
    config.validate();
    const surface_grid grid = derive_grid(config, warnings);
    const correlation_model corr = build_correlation(grid);

    detail::trial_context ctx{
        .config = config,
        .grid = grid,
        .corr = corr,
        .br = {db_to_linear(config.rho_db), config.alpha, config.d_br_m},
        .ru = {db_to_linear(config.rho_db), config.alpha, config.d_ru_m},
        .radio = {dbm_to_watt(config.power_dbm), dbm_to_watt(config.noise_dbm)},
        .ceo = {},
    };
    const int m = grid.element_count();
    ctx.ceo.sample_count_a =
        std::max(2, static_cast<int>(std::lround(config.sample_factor * (m + config.m_hat))));
    ctx.ceo.elite_frac = config.elite_frac;
    ctx.ceo.smoothing = config.smoothing;
    ctx.ceo.tol = config.tol;
    ctx.ceo.max_iter = config.max_iter;
    ctx.ceo.validate();

    if (std::find(config.schemes.begin(), config.schemes.end(), scheme_kind::oracle) !=
        config.schemes.end()) {
        const auto total = enumeration_size(m, config.m_hat, config.bits);
        if (warnings && (!total || *total > config.oracle_budget))
            warnings->push_back("oracle enumeration exceeds the budget; its records will "
                                "carry converged=0 and rate 0");
    }

    const int schemes = static_cast<int>(config.schemes.size());
    std::vector<result_record> records(static_cast<std::size_t>(config.trials) * schemes);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int trial = 0; trial < config.trials; ++trial) {
        const std::uint64_t trial_seed = derive_seed(config.master_seed, trial);
        rng_stream channel_rng(derive_seed(trial_seed, 0));
        const channel_realization ch =
            draw_realization(channel_rng, corr, ctx.br, ctx.ru, config.correlate_both);

        for (int s = 0; s < schemes; ++s) {
            const scheme_kind scheme = config.schemes[s];
            const std::uint64_t scheme_seed =
                derive_seed(trial_seed, detail::scheme_stream_index(scheme));
            result_record record;
            try {
                record = detail::run_scheme(ctx, ch, trial, scheme, scheme_seed);
            } catch (const budget_error&) {
                record.trial = trial;
                record.scheme = scheme;
                record.my = config.my;
                record.mz = config.mz;
                record.m_hat = config.m_hat;
                record.bits = config.bits;
                record.seed = scheme_seed;
                record.converged = false;
                record.rate_bps_hz = 0.0;
            }
            records[static_cast<std::size_t>(trial) * schemes + s] = record;
        }
    }
    return records;
}

inline constexpr const char* csv_header =
    "trial,scheme,my,mz,m_hat,bits,seed,iterations,converged,rate_bps_hz,wall_ms";

inline void write_csv(const std::vector<result_record>& records, std::ostream& out) {
    out << csv_header << '\n';
    for (const result_record& r : records) {
        out << r.trial << ',' << scheme_name(r.scheme) << ',' << r.my << ',' << r.mz << ','
            << r.m_hat << ',' << r.bits << ',' << r.seed << ',' << r.iterations << ','
            << (r.converged ? 1 : 0) << ',' << std::fixed << std::setprecision(6)
            << r.rate_bps_hz << ',' << std::setprecision(3) << r.wall_ms << '\n';
        out.unsetf(std::ios::floatfield);
    }
}

inline void write_csv(const std::vector<result_record>& records, const std::string& out_path) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + out_path + "' for writing");
    write_csv(records, out);
    out.flush();
    if (!out)
        throw std::runtime_error("error while writing '" + out_path + "'");
}

inline std::vector<result_record> read_csv(std::istream& in, const std::string& context) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(context + ": empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != csv_header)
        throw std::runtime_error(context + ": unexpected header '" + line + "'");

    std::vector<result_record> records;
    int line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::stringstream stream(line);
        std::string field;
        while (std::getline(stream, field, ','))
            fields.push_back(field);
        if (fields.size() != 11)
            throw std::runtime_error(context + ": line " + std::to_string(line_number) +
                                     " has " + std::to_string(fields.size()) +
                                     " fields, expected 11");
        result_record r;
        r.trial = std::stoi(fields[0]);
        r.scheme = parse_scheme(fields[1]);
        r.my = std::stoi(fields[2]);
        r.mz = std::stoi(fields[3]);
        r.m_hat = std::stoi(fields[4]);
        r.bits = std::stoi(fields[5]);
        r.seed = std::stoull(fields[6]);
        r.iterations = std::stoi(fields[7]);
        r.converged = std::stoi(fields[8]) != 0;
        r.rate_bps_hz = std::stod(fields[9]);
        r.wall_ms = std::stod(fields[10]);
        records.push_back(r);
    }
    return records;
}

inline std::vector<result_record> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "' for reading");
    return read_csv(in, path);
}

/// Per-configuration aggregate used by the text summary.
struct summary_row {
    scheme_kind scheme = scheme_kind::fris;
    int my = 0;
    int mz = 0;
    int m_hat = 0;
    int bits = 0;
    int count = 0;
    double mean_rate = 0.0;
    double sd_rate = 0.0;      ///< sample standard deviation; 0 when count == 1
    double ci95_half = 0.0;    ///< 1.96 * sd / sqrt(count)
};

inline std::vector<summary_row> summarize_rows(const std::vector<result_record>& records) {
    using key_t = std::tuple<int, int, int, int, int>;
    std::map<key_t, std::vector<double>> groups;
    for (const result_record& r : records) {
        const key_t key{static_cast<int>(detail::scheme_stream_index(r.scheme)), r.my, r.mz,
                        r.m_hat, r.bits};
        groups[key].push_back(r.rate_bps_hz);
    }

    std::vector<summary_row> rows;
    for (const auto& [key, rates] : groups) {
        summary_row row;
        switch (std::get<0>(key)) {
        case 1: row.scheme = scheme_kind::fris; break;
        case 2: row.scheme = scheme_kind::ris; break;
        case 3: row.scheme = scheme_kind::aligned; break;
        default: row.scheme = scheme_kind::oracle; break;
        }
        row.my = std::get<1>(key);
        row.mz = std::get<2>(key);
        row.m_hat = std::get<3>(key);
        row.bits = std::get<4>(key);
        row.count = static_cast<int>(rates.size());

        double sum = 0.0;
        for (double rate : rates)
            sum += rate;
        row.mean_rate = sum / row.count;
        if (row.count > 1) {
            double ss = 0.0;
            for (double rate : rates)
                ss += (rate - row.mean_rate) * (rate - row.mean_rate);
            row.sd_rate = std::sqrt(ss / (row.count - 1));
            row.ci95_half = 1.96 * row.sd_rate / std::sqrt(static_cast<double>(row.count));
        }
        rows.push_back(row);
    }
    return rows;
}

/// Human-readable digest: one line per (scheme, grid, m_hat, bits) group,
/// plus the fris/ris mean-rate ratio whenever both share a configuration.
inline std::string summarize(const std::vector<result_record>& records) {
    if (records.empty())
        throw std::invalid_argument("summarize: no records");
    const std::vector<summary_row> rows = summarize_rows(records);

    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    for (const summary_row& row : rows) {
        out << scheme_name(row.scheme) << " my=" << row.my << " mz=" << row.mz
            << " m_hat=" << row.m_hat << " bits=" << row.bits << ": mean rate "
            << row.mean_rate << " bps/Hz, sd " << row.sd_rate << ", 95% ci +/- "
            << row.ci95_half << ", trials " << row.count;
        if (row.count == 1)
            out << " (single trial, sd not estimable)";
        out << '\n';
    }

    for (const summary_row& row : rows) {
        if (row.scheme != scheme_kind::fris)
            continue;
        for (const summary_row& other : rows) {
            if (other.scheme == scheme_kind::ris && other.my == row.my &&
                other.mz == row.mz && other.m_hat == row.m_hat && other.bits == row.bits &&
                other.mean_rate > 0.0) {
                out << "fris/ris mean-rate ratio (my=" << row.my << " m_hat=" << row.m_hat
                    << " bits=" << row.bits << "): " << row.mean_rate / other.mean_rate
                    << '\n';
            }
        }
    }
    return out.str();
}

} // namespace fris
