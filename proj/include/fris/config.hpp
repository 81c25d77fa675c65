#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fris {

/// Invalid or unparseable configuration. CLI maps this to exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class scheme_kind { fris, ris, aligned, oracle };

inline const char* scheme_name(scheme_kind scheme) {
    switch (scheme) {
    case scheme_kind::fris: return "fris";
    case scheme_kind::ris: return "ris";
    case scheme_kind::aligned: return "aligned";
    case scheme_kind::oracle: return "oracle";
    }
    return "?";
}

inline scheme_kind parse_scheme(const std::string& name) {
    if (name == "fris") return scheme_kind::fris;
    if (name == "ris") return scheme_kind::ris;
    if (name == "aligned") return scheme_kind::aligned;
    if (name == "oracle") return scheme_kind::oracle;
    throw config_error("unknown scheme '" + name + "' (expected fris, ris, aligned or oracle)");
}

/// Full experiment description. Field names double as config-file keys.
struct experiment_config {
    double power_dbm = 30.0;
    double noise_dbm = -90.0;
    double rho_db = -20.0;
    double alpha = 2.6;
    double fc_hz = 5e9;
    double surface_side_lambda = 2.0;
    int my = 10;
    int mz = 10;
    int m_hat = 25;
    int bits = 2;
    double d_br_m = 400.0;
    double d_ru_m = 75.0;
    double sample_factor = 5.0;
    double elite_frac = 0.05;
    double smoothing = 0.55;
    double tol = 1e-4;
    int max_iter = 500;
    int trials = 200;
    std::uint64_t master_seed = 1;
    std::vector<scheme_kind> schemes{scheme_kind::fris, scheme_kind::ris};
    bool correlate_both = false;
    std::string out_path = "results.csv";

    // not config-file keys
    std::uint64_t oracle_budget = 1'000'000;
    bool measure_time = false;

    void validate() const {
        const auto positive = [](double value, const char* key) {
            if (!(value > 0.0))
                throw config_error(std::string(key) + " must be positive");
        };
        positive(alpha, "alpha");
        positive(fc_hz, "fc_hz");
        positive(surface_side_lambda, "surface_side_lambda");
        positive(d_br_m, "d_br_m");
        positive(d_ru_m, "d_ru_m");
        positive(sample_factor, "sample_factor");
        positive(tol, "tol");
        if (my < 2 || mz < 2)
            throw config_error("my and mz must be >= 2 (elements span the aperture edges)");
        if (m_hat < 1 || m_hat > my * mz)
            throw config_error("m_hat must satisfy 1 <= m_hat <= my*mz");
        if (bits < 1 || bits > 16)
            throw config_error("bits must be in [1, 16]");
        if (!(elite_frac > 0.0 && elite_frac < 1.0))
            throw config_error("elite_frac must be in (0,1)");
        if (!(smoothing > 0.0 && smoothing < 1.0))
            throw config_error("smoothing must be in (0,1)");
        if (max_iter < 1)
            throw config_error("max_iter must be >= 1");
        if (trials < 1)
            throw config_error("trials must be >= 1");
        if (schemes.empty())
            throw config_error("schemes must not be empty");
        if (out_path.empty())
            throw config_error("out_path must not be empty");
    }
};

namespace detail {

inline std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return "";
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': cannot parse '" + value + "' as a number");
    }
}

inline int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int parsed = std::stoi(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': cannot parse '" + value + "' as an integer");
    }
}

inline std::uint64_t parse_uint64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::uint64_t parsed = std::stoull(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': cannot parse '" + value +
                           "' as an unsigned integer");
    }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on")
        return true;
    if (value == "false" || value == "0" || value == "no" || value == "off")
        return false;
    throw config_error("key '" + key + "': cannot parse '" + value + "' as a boolean");
}

inline std::vector<scheme_kind> parse_schemes(const std::string& value) {
    std::vector<scheme_kind> schemes;
    std::stringstream stream(value);
    std::string token;
    while (std::getline(stream, token, ',')) {
        token = trim(token);
        if (token.empty())
            continue;
        const scheme_kind scheme = parse_scheme(token);
        if (std::find(schemes.begin(), schemes.end(), scheme) == schemes.end())
            schemes.push_back(scheme);
    }
    if (schemes.empty())
        throw config_error("schemes list is empty");
    return schemes;
}

} // namespace detail

/// Applies one `key = value` pair. Unknown keys fail loud.
inline void apply_setting(experiment_config& config, const std::string& key,
                          const std::string& value) {
    using namespace detail;
    if (key == "power_dbm") config.power_dbm = parse_double(key, value);
    else if (key == "noise_dbm") config.noise_dbm = parse_double(key, value);
    else if (key == "rho_db") config.rho_db = parse_double(key, value);
    else if (key == "alpha") config.alpha = parse_double(key, value);
    else if (key == "fc_hz") config.fc_hz = parse_double(key, value);
    else if (key == "surface_side_lambda") config.surface_side_lambda = parse_double(key, value);
    else if (key == "my") config.my = parse_int(key, value);
    else if (key == "mz") config.mz = parse_int(key, value);
    else if (key == "m_hat") config.m_hat = parse_int(key, value);
    else if (key == "bits") config.bits = parse_int(key, value);
    else if (key == "d_br_m") config.d_br_m = parse_double(key, value);
    else if (key == "d_ru_m") config.d_ru_m = parse_double(key, value);
    else if (key == "sample_factor") config.sample_factor = parse_double(key, value);
    else if (key == "elite_frac") config.elite_frac = parse_double(key, value);
    else if (key == "smoothing") config.smoothing = parse_double(key, value);
    else if (key == "tol") config.tol = parse_double(key, value);
    else if (key == "max_iter") config.max_iter = parse_int(key, value);
    else if (key == "trials") config.trials = parse_int(key, value);
    else if (key == "master_seed") config.master_seed = parse_uint64(key, value);
    else if (key == "schemes") config.schemes = parse_schemes(value);
    else if (key == "correlate_both") config.correlate_both = parse_bool(key, value);
    else if (key == "out_path") config.out_path = value;
    else throw config_error("unknown config key '" + key + "'");
}

/// Parses a flat `key = value` file; `#` starts a comment, blank lines are
/// skipped, unknown keys are errors.
inline experiment_config parse_config_text(std::istream& input,
                                           experiment_config config = {}) {
    std::string line;
    int line_number = 0;
    while (std::getline(input, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto equals = line.find('=');
        if (equals == std::string::npos)
            throw config_error("line " + std::to_string(line_number) +
                               ": expected 'key = value', got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, equals));
        const std::string value = detail::trim(line.substr(equals + 1));
        if (key.empty())
            throw config_error("line " + std::to_string(line_number) + ": empty key");
        apply_setting(config, key, value);
    }
    return config;
}

inline experiment_config parse_config_file(const std::string& path,
                                           experiment_config config = {}) {
    std::ifstream input(path);
    if (!input)
        throw config_error("cannot open config file '" + path + "'");
    try {
        return parse_config_text(input, std::move(config));
    } catch (const config_error& error) {
        throw config_error(path + ": " + error.what());
    }
}

} // namespace fris
