// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. argv[1] is the path to the CLI binary (used by the determinism
// check); all other criteria exercise the library directly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fris/fris.hpp"

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& label, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << label;
    if (!detail.empty())
        std::cout << " (" << detail << ")";
    std::cout << '\n';
    std::cout.flush();
    if (!pass)
        ++failures;
}

fris::surface_grid square_grid(int side) {
    fris::surface_grid grid;
    grid.my = side;
    grid.mz = side;
    grid.wavelength_m = 0.0599584916;
    grid.spacing_m = 2.0 * grid.wavelength_m / (side - 1);
    return grid;
}

fris::channel_realization unit_channel(const fris::correlation_model& corr,
                                       std::uint64_t seed) {
    const fris::link_params link{1.0, 2.0, 1.0};
    fris::rng_stream rng(seed);
    return fris::draw_realization(rng, corr, link, link);
}

struct scheme_stats {
    double mean = 0.0;
    double se = 0.0;
    int count = 0;
};

scheme_stats stats_for(const std::vector<fris::result_record>& records,
                       fris::scheme_kind scheme) {
    std::vector<double> rates;
    for (const auto& r : records)
        if (r.scheme == scheme)
            rates.push_back(r.rate_bps_hz);
    scheme_stats s;
    s.count = static_cast<int>(rates.size());
    for (double rate : rates)
        s.mean += rate;
    s.mean /= s.count;
    double ss = 0.0;
    for (double rate : rates)
        ss += (rate - s.mean) * (rate - s.mean);
    s.se = std::sqrt(ss / (s.count - 1)) / std::sqrt(static_cast<double>(s.count));
    return s;
}

bool separated(const scheme_stats& low, const scheme_stats& high) {
    return high.mean - low.mean > 1.96 * std::sqrt(low.se * low.se + high.se * high.se);
}

std::string fmt(double value) {
    std::ostringstream out;
    out.precision(4);
    out << value;
    return out.str();
}

void criterion_1_oracle_equivalence() {
    const fris::surface_grid grid = square_grid(3);
    const fris::correlation_model corr = fris::build_correlation(grid);
    const fris::radio_params radio{1.0, 1.0};

    fris::ceo_config config;
    config.sample_count_a = 60; // 5 * (M + m_hat) = 5 * (9 + 3)
    config.elite_frac = 0.05;
    config.smoothing = 0.55;

    int matched = 0;
    const int instances = 100;
    for (int i = 0; i < instances; ++i) {
        const fris::channel_realization ch =
            unit_channel(corr, fris::derive_seed(9000, i));
        const fris::oracle_result oracle = fris::exhaustive_search(ch, radio, 3, 1);
        fris::rng_stream rng(fris::derive_seed(77, i));
        const fris::ceo_result ceo = fris::optimize(ch, radio, 3, 1, config, rng);
        if (ceo.best.rate >= oracle.best_rate - 1e-9 &&
            ceo.best.rate <= oracle.best_rate + 1e-9)
            ++matched;
    }
    report(1, matched >= 95, "optimizer reaches the exhaustive optimum on 3x3 instances",
           std::to_string(matched) + "/100 within 1e-9, need >= 95");
}

void criterion_2_update_exactness() {
    std::vector<fris::candidate> elite(3);
    for (auto& member : elite)
        member.phi.bits = 2;
    elite[0].phi.levels = {2};
    elite[0].xi = {1, 0};
    elite[1].phi.levels = {2};
    elite[1].xi = {1, 0};
    elite[2].phi.levels = {1};
    elite[2].xi = {0, 1};

    const fris::tilting_params params = fris::update_parameters(elite, 2, 1, 2);
    const bool pass = std::abs(params.p_at(0, 0) - 1.0 / 3.0) <= 1e-15 &&
                      std::abs(params.p_at(0, 1) - 2.0 / 3.0) <= 1e-15 &&
                      params.p_at(0, 2) == 0.0 && params.p_at(0, 3) == 0.0 &&
                      std::abs(params.g[0] - 2.0 / 3.0) <= 1e-15 &&
                      std::abs(params.g[1] - 1.0 / 3.0) <= 1e-15;
    report(2, pass, "parameter refit returns exact elite frequencies",
           "rational frequencies 1/3 and 2/3 reproduced to 1e-15");
}

void criterion_3_sampling_correctness() {
    fris::tilting_params params;
    params.m = 1;
    params.m_hat = 1;
    params.bits = 3;
    params.g = {1.0};

    fris::rng_stream setup(99);
    double total = 0.0;
    params.p.resize(8);
    for (double& weight : params.p) {
        weight = 0.5 + fris::uniform01(setup);
        total += weight;
    }
    for (double& weight : params.p)
        weight /= total;

    const int draws = 100'000;
    std::vector<int> counts(8, 0);
    fris::rng_stream rng(7);
    for (int i = 0; i < draws; ++i)
        ++counts[fris::sample_phases(params, rng).levels[0] - 1];

    double chi_square = 0.0;
    for (int level = 0; level < 8; ++level) {
        const double expected = draws * params.p[level];
        chi_square += (counts[level] - expected) * (counts[level] - expected) / expected;
    }
    const bool phases_ok = chi_square < 18.475306906582364; // 0.99 quantile, 7 dof

    fris::tilting_params bern;
    bern.m = 5;
    bern.m_hat = 2;
    bern.bits = 1;
    bern.p = {0.5, 0.5, 0.5, 0.5};
    bern.g = {0.1, 0.35, 0.5, 0.75, 0.9};
    const int sel_draws = 100'000;
    std::vector<long> sel_counts(5, 0);
    fris::rng_stream sel_rng(8);
    for (int i = 0; i < sel_draws; ++i) {
        const auto xi = fris::sample_selection(bern, sel_rng);
        for (int m = 0; m < 5; ++m)
            sel_counts[m] += xi[m];
    }
    bool bernoulli_ok = true;
    for (int m = 0; m < 5; ++m) {
        const double p = bern.g[m];
        const double sigma = std::sqrt(p * (1.0 - p) / sel_draws);
        if (std::abs(sel_counts[m] / static_cast<double>(sel_draws) - p) >= 3.0 * sigma)
            bernoulli_ok = false;
    }

    report(3, phases_ok && bernoulli_ok,
           "phase and selection sampling match their distributions",
           "chi-square " + fmt(chi_square) + " < 18.48; Bernoulli within 3 sigma");
}

void criterion_4_repair_totality() {
    const auto reference = [](std::vector<std::uint8_t> xi, const std::vector<double>& g,
                              int m_hat) {
        const int m = static_cast<int>(xi.size());
        const int ones = static_cast<int>(std::count(xi.begin(), xi.end(), std::uint8_t{1}));
        if (ones > m_hat) {
            std::vector<int> on;
            for (int i = 0; i < m; ++i)
                if (xi[i])
                    on.push_back(i);
            std::stable_sort(on.begin(), on.end(),
                             [&](int a, int b) { return g[a] < g[b]; });
            for (int k = 0; k < ones - m_hat; ++k)
                xi[on[k]] = 0;
        } else if (ones < m_hat) {
            std::vector<int> off;
            for (int i = 0; i < m; ++i)
                if (!xi[i])
                    off.push_back(i);
            std::stable_sort(off.begin(), off.end(),
                             [&](int a, int b) { return g[a] > g[b]; });
            for (int k = 0; k < m_hat - ones; ++k)
                xi[off[k]] = 1;
        }
        return xi;
    };

    fris::rng_stream rng(2025);
    int checked = 0;
    bool pass = true;
    for (int round = 0; round < 10'000 && pass; ++round) {
        const int m = 1 + static_cast<int>(rng() % 16);
        const int m_hat = 1 + static_cast<int>(rng() % m);
        fris::tilting_params params;
        params.m = m;
        params.m_hat = m_hat;
        params.bits = 1;
        params.g.resize(m);
        for (double& value : params.g) {
            value = fris::uniform01(rng);
            if (rng() % 4 == 0)
                value = 0.5;
        }
        std::vector<std::uint8_t> xi(m);
        for (auto& bit : xi)
            bit = rng() % 2;

        const auto repaired = fris::repair_selection(xi, params, m_hat);
        if (std::count(repaired.begin(), repaired.end(), std::uint8_t{1}) != m_hat ||
            repaired != reference(xi, params.g, m_hat))
            pass = false;
        ++checked;
    }
    report(4, pass, "repair always yields the exact element count and order",
           std::to_string(checked) + "/10000 random triples match the reference rules");
}

void criterion_5_correlation_algebra() {
    bool pass = true;
    double worst = 0.0;
    for (const int side : {2, 4, 8, 12, 16}) {
        const fris::surface_grid grid = square_grid(side);
        const fris::correlation_model corr = fris::build_correlation(grid);
        const int m = grid.element_count();

        for (int i = 0; i < m && pass; ++i) {
            if (corr.j(i, i) != 1.0)
                pass = false;
            for (int k = 0; k < m; ++k)
                if (corr.j(i, k) != corr.j(k, i) || std::abs(corr.j(i, k)) > 1.0)
                    pass = false;
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(corr.j);
        const Eigen::MatrixXd clamped = solver.eigenvectors() *
                                        solver.eigenvalues().cwiseMax(0.0).asDiagonal() *
                                        solver.eigenvectors().transpose();
        const double residual =
            (corr.j_sqrt * corr.j_sqrt - clamped).norm() / corr.j.norm();
        worst = std::max(worst, residual);
        if (residual > 1e-8)
            pass = false;
        if ((corr.j_sqrt - corr.j_sqrt.transpose()).norm() > 1e-10)
            pass = false;
    }
    report(5, pass, "correlation matrices and their roots satisfy the algebra",
           "worst relative root residual " + fmt(worst) + " over grids up to 16x16");
}

void criterion_6_model_equivalence() {
    fris::rng_stream rng(2024);
    bool pass = true;
    double worst = 0.0;
    for (int instance = 0; instance < 1000; ++instance) {
        const int my = 2 + static_cast<int>(rng() % 3);
        const int mz = 1 + static_cast<int>(rng() % 2);
        fris::surface_grid grid;
        grid.my = my;
        grid.mz = mz;
        grid.wavelength_m = 0.0599584916;
        grid.spacing_m = 0.2 * grid.wavelength_m;
        const int m = grid.element_count();
        const int m_hat = 1 + static_cast<int>(rng() % m);
        const int bits = 1 + static_cast<int>(rng() % 3);

        const fris::correlation_model corr = fris::build_correlation(grid);
        const fris::channel_realization ch = unit_channel(corr, rng());

        std::vector<int> order(m);
        std::iota(order.begin(), order.end(), 0);
        for (int i = m - 1; i > 0; --i)
            std::swap(order[i], order[rng() % static_cast<std::uint64_t>(i + 1)]);
        std::vector<int> selection(order.begin(), order.begin() + m_hat);
        std::sort(selection.begin(), selection.end());

        fris::phase_vector phi;
        phi.bits = bits;
        for (int k = 0; k < m_hat; ++k)
            phi.levels.push_back(1 + static_cast<int>(rng() % (1ULL << bits)));

        const std::complex<double> scalar =
            fris::effective_gain(fris::cascaded_coefficients(ch, selection), phi);

        Eigen::MatrixXcd selector = Eigen::MatrixXcd::Zero(m_hat, m);
        for (int k = 0; k < m_hat; ++k)
            selector(k, selection[k]) = 1.0;
        Eigen::MatrixXcd phases = Eigen::MatrixXcd::Zero(m_hat, m_hat);
        for (int k = 0; k < m_hat; ++k)
            phases(k, k) = std::polar(1.0, phi.angle(k));
        const std::complex<double> dense =
            (ch.h_ru_corr.adjoint() * selector.transpose() * phases * selector * ch.h_br)(0);

        const double relative =
            std::abs(std::norm(dense) - std::norm(scalar)) / std::max(std::norm(dense), 1e-300);
        worst = std::max(worst, relative);
        if (relative > 1e-10)
            pass = false;
    }
    report(6, pass, "scalar cascaded rate equals the dense matrix product",
           "worst relative gap " + fmt(worst) + " over 1000 instances");
}

// The ratio and gap comparisons below are statements about the logarithmic
// SNR regime: with the default -90 dBm floor these link distances leave the
// received SNR near 0.1, where log2(1+x) is linear and rate differences just
// mirror power differences. -105 dBm puts the mean rates between 1 and 3
// bits/s/Hz, where the scheme comparison is meaningful.
constexpr double trend_noise_dbm = -105.0;

void criterion_7_grid_size_trend() {
    std::vector<scheme_stats> fris_stats;
    std::vector<scheme_stats> ris_stats;
    for (const int side : {6, 10, 14}) {
        fris::experiment_config config;
        config.noise_dbm = trend_noise_dbm;
        config.my = side;
        config.mz = side;
        config.m_hat = 25;
        config.bits = 2;
        config.trials = 200;
        config.master_seed = 1;
        config.schemes = {fris::scheme_kind::fris, fris::scheme_kind::ris};
        const auto records = fris::run_experiment(config);
        fris_stats.push_back(stats_for(records, fris::scheme_kind::fris));
        ris_stats.push_back(stats_for(records, fris::scheme_kind::ris));
    }

    const bool increasing = separated(fris_stats[0], fris_stats[1]) &&
                            separated(fris_stats[1], fris_stats[2]);
    const double gain_low = fris_stats[1].mean - fris_stats[0].mean;
    const double gain_high = fris_stats[2].mean - fris_stats[1].mean;
    const bool diminishing = gain_high < gain_low;
    std::vector<double> ratios;
    for (std::size_t i = 0; i < fris_stats.size(); ++i)
        ratios.push_back(fris_stats[i].mean / ris_stats[i].mean);
    const bool ratio_ok = ratios[2] > 1.2 && ratios[0] < ratios[1] && ratios[1] < ratios[2];

    report(7, increasing && diminishing && ratio_ok,
           "rate grows with surface size, with diminishing returns and a widening lead",
           "means " + fmt(fris_stats[0].mean) + "/" + fmt(fris_stats[1].mean) + "/" +
               fmt(fris_stats[2].mean) + ", ratios " + fmt(ratios[0]) + "/" +
               fmt(ratios[1]) + "/" + fmt(ratios[2]));
}

void criterion_8_active_count_trend() {
    std::vector<scheme_stats> fris_stats;
    std::vector<double> gaps;
    for (const int m_hat : {4, 9, 16, 25}) {
        fris::experiment_config config;
        config.noise_dbm = trend_noise_dbm;
        config.my = 10;
        config.mz = 10;
        config.m_hat = m_hat;
        config.bits = 2;
        config.trials = 200;
        config.master_seed = 1;
        config.schemes = {fris::scheme_kind::fris, fris::scheme_kind::ris};
        const auto records = fris::run_experiment(config);
        const scheme_stats f = stats_for(records, fris::scheme_kind::fris);
        const scheme_stats r = stats_for(records, fris::scheme_kind::ris);
        fris_stats.push_back(f);
        gaps.push_back(f.mean - r.mean);
    }

    bool increasing = true;
    for (std::size_t i = 1; i < fris_stats.size(); ++i)
        if (!separated(fris_stats[i - 1], fris_stats[i]))
            increasing = false;
    const bool gap_shrinks = gaps.back() < gaps.front();

    report(8, increasing && gap_shrinks,
           "rate grows with the active-element count while the scheme gap narrows",
           "means " + fmt(fris_stats[0].mean) + ".." + fmt(fris_stats[3].mean) +
               ", gaps " + fmt(gaps.front()) + " -> " + fmt(gaps.back()));
}

void criterion_9_alignment_bound() {
    fris::rng_stream rng(404);
    bool pass = true;
    for (int bits : {1, 2, 3}) {
        const double floor_cos = std::cos(M_PI / (1 << bits));
        for (int round = 0; round < 10'000; ++round) {
            const int n = 1 + static_cast<int>(rng() % 8);
            Eigen::VectorXcd c(n);
            double abs_sum = 0.0;
            for (int k = 0; k < n; ++k) {
                c(k) = fris::complex_normal(rng);
                abs_sum += std::abs(c(k));
            }
            const fris::phase_vector phi = fris::quantized_alignment_phases(c, bits);
            if (std::abs(fris::effective_gain(c, phi)) < floor_cos * abs_sum)
                pass = false;
        }
    }
    report(9, pass, "quantized co-phasing keeps the guaranteed gain fraction",
           "10000 vectors per resolution in {1,2,3} bits, exact inequality");
}

void criterion_10_determinism(const char* cli_path) {
    if (cli_path == nullptr) {
        report(10, false, "two identical runs produce byte-identical output",
               "CLI path missing: pass it as argv[1]");
        return;
    }

    const std::string config_path = "acceptance_determinism.cfg";
    {
        std::ofstream config(config_path);
        config << "my = 4\nmz = 4\nm_hat = 4\nbits = 2\ntrials = 5\n"
               << "schemes = fris, ris, aligned\nmaster_seed = 31\n";
    }

    const auto run_once = [&](const std::string& out_path) {
        const std::string command = std::string(cli_path) + " --quiet --out " + out_path +
                                    " run --config " + config_path;
        return std::system(command.c_str());
    };

    const int status_a = run_once("acceptance_run_a.csv");
    const int status_b = run_once("acceptance_run_b.csv");

    std::ifstream a("acceptance_run_a.csv", std::ios::binary);
    std::ifstream b("acceptance_run_b.csv", std::ios::binary);
    std::stringstream buf_a, buf_b;
    buf_a << a.rdbuf();
    buf_b << b.rdbuf();

    const bool pass = status_a == 0 && status_b == 0 && a && b &&
                      buf_a.str().size() > 0 && buf_a.str() == buf_b.str();
    report(10, pass, "two identical runs produce byte-identical output",
           pass ? std::to_string(buf_a.str().size()) + " bytes identical"
                : "exit codes " + std::to_string(status_a) + "/" + std::to_string(status_b));

    std::remove(config_path.c_str());
    std::remove("acceptance_run_a.csv");
    std::remove("acceptance_run_b.csv");
}

} // namespace

int main(int argc, char** argv) {
    std::cout << "acceptance gate\n";
    criterion_1_oracle_equivalence();
    criterion_2_update_exactness();
    criterion_3_sampling_correctness();
    criterion_4_repair_totality();
    criterion_5_correlation_algebra();
    criterion_6_model_equivalence();
    criterion_7_grid_size_trend();
    criterion_8_active_count_trend();
    criterion_9_alignment_bound();
    criterion_10_determinism(argc > 1 ? argv[1] : nullptr);

    if (failures == 0) {
        std::cout << "all criteria passed\n";
        return 0;
    }
    std::cout << failures << " criteria failed\n";
    return 1;
}
