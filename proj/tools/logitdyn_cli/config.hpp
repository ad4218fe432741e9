#pragma once

// Experiment configuration. Files use a TOML-compatible subset: [sections],
// key = value, '#' comments, quoted strings and flat arrays of numbers. The
// section/key layer is read with Boost.PropertyTree's INI parser.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "logitdyn/analysis.hpp"
#include "logitdyn/error.hpp"
#include "logitdyn/games.hpp"

namespace logitdyn::cli {

struct GameConfig {
    std::string name = "ck";
    std::size_t n = 3;
    double a = 3.0, b = 2.0, c = 0.0, d = 0.0;  // 2x2 payoffs
};

struct ExperimentConfig {
    GameConfig game;
    std::vector<double> beta_grid{0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
    double epsilon = kDefaultEpsilon;
    std::uint64_t seed = 1;
    std::size_t state_cap = kDenseStateCap;
    std::uint64_t horizon = 1'000'000'000'000ULL;  // exact t_mix search (squaring makes this cheap)
    std::uint64_t sim_horizon = 100'000'000;       // per coupled trial
    std::size_t trials = 1000;
    std::size_t random_pairs = 16;
    std::vector<std::size_t> n_sweep;  // simulate: stairs size sweep
    std::size_t verify_n_max = 8;      // largest n for the exact checks in verify
    std::size_t verify_rec_n_max = 32; // largest n for recursion and edge checks
    std::size_t workers = 0;
    std::string out_dir = "out";
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Drops '#' comments that are not inside double quotes.
inline std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        if (line[k] == '"') quoted = !quoted;
        if (line[k] == '#' && !quoted) return line.substr(0, k);
    }
    return line;
}

inline std::string unquote(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

inline double parse_real(const std::string& key, const std::string& raw) {
    const std::string s = unquote(raw);
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw config_error(key + ": expected a number, got '" + s + "'");
    }
}

inline std::uint64_t parse_count(const std::string& key, const std::string& raw) {
    const std::string s = unquote(raw);
    if (s.empty() || s.find_first_not_of("0123456789_") != std::string::npos)
        throw config_error(key + ": expected a non-negative integer, got '" + s + "'");
    std::string digits;
    for (char ch : s)
        if (ch != '_') digits += ch;
    try {
        return std::stoull(digits);
    } catch (const std::exception&) {
        throw config_error(key + ": integer out of range");
    }
}

// "[a, b, c]" or a bare comma list. The tokens ln_n and 2ln_n stand for ln(n) and 2 ln(n).
inline std::vector<std::string> split_list(const std::string& raw) {
    std::string s = trim(raw);
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') throw config_error("unterminated array: " + s);
        s = s.substr(1, s.size() - 2);
    }
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(unquote(item));
    }
    return out;
}

}  // namespace detail

inline std::vector<double> parse_beta_list(const std::string& raw, std::size_t n) {
    std::vector<double> out;
    const double ln = std::log(static_cast<double>(std::max<std::size_t>(n, 1)));
    for (const auto& item : detail::split_list(raw)) {
        if (item == "ln_n")
            out.push_back(ln);
        else if (item == "2ln_n")
            out.push_back(2.0 * ln);
        else
            out.push_back(detail::parse_real("beta_grid", item));
    }
    return out;
}

inline std::vector<std::size_t> parse_count_list(const std::string& key, const std::string& raw) {
    std::vector<std::size_t> out;
    for (const auto& item : detail::split_list(raw)) out.push_back(detail::parse_count(key, item));
    return out;
}

inline void validate(const ExperimentConfig& c) {
    if (c.beta_grid.empty()) throw config_error("beta_grid is empty");
    for (double b : c.beta_grid)
        if (!(b >= 0.0) || !std::isfinite(b)) throw config_error("beta_grid entries must be finite and >= 0");
    if (!(c.epsilon > 0.0 && c.epsilon < 0.5)) throw config_error("epsilon must lie in (0, 1/2)");
    if (c.trials == 0) throw config_error("trials must be positive");
    if (c.horizon == 0 || c.sim_horizon == 0) throw config_error("horizons must be positive");
    if (c.state_cap == 0) throw config_error("states cap must be positive");
    static const char* known[] = {"ck", "coordination", "anti_coordination", "matching_pennies", "stairs", "or", "xor"};
    if (std::find(std::begin(known), std::end(known), c.game.name) == std::end(known))
        throw config_error("unknown game '" + c.game.name + "'");
    if (c.game.n == 0) throw config_error("game.n must be positive");
}

/// Builds the configured game; parameter errors surface as config errors.
inline GameSpec make_game(const GameConfig& g) {
    try {
        if (g.name == "ck") return make_ck();
        if (g.name == "coordination") return make_coordination(g.a, g.b, g.c, g.d);
        if (g.name == "anti_coordination") return make_anti_coordination(g.a, g.b, g.c, g.d);
        if (g.name == "matching_pennies") return make_matching_pennies();
        if (g.name == "stairs") return make_stairs(g.n);
        if (g.name == "or") return make_or(g.n);
        if (g.name == "xor") return make_xor(g.n);
    } catch (const invalid_parameters& e) {
        throw config_error(std::string("game parameters: ") + e.what());
    }
    throw config_error("unknown game '" + g.name + "'");
}

/// Player count of the configured game, without building it.
inline std::size_t players(const GameConfig& g) {
    if (g.name == "ck") return 3;
    if (g.name == "coordination" || g.name == "anti_coordination" || g.name == "matching_pennies") return 2;
    return g.n;
}

inline ExperimentConfig parse_config(std::istream& in) {
    std::ostringstream cleaned;
    std::string line;
    while (std::getline(in, line)) cleaned << detail::strip_comment(line) << '\n';
    boost::property_tree::ptree tree;
    try {
        std::istringstream ini(cleaned.str());
        boost::property_tree::ini_parser::read_ini(ini, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw config_error(std::string("config syntax: ") + e.message() + " at line " + std::to_string(e.line()));
    }
    ExperimentConfig c;
    auto get = [&](const std::string& path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(path)) return *v;
        return std::nullopt;
    };
    if (auto v = get("game.name")) c.game.name = detail::unquote(*v);
    if (auto v = get("game.n")) c.game.n = detail::parse_count("game.n", *v);
    if (auto v = get("game.a")) c.game.a = detail::parse_real("game.a", *v);
    if (auto v = get("game.b")) c.game.b = detail::parse_real("game.b", *v);
    if (auto v = get("game.c")) c.game.c = detail::parse_real("game.c", *v);
    if (auto v = get("game.d")) c.game.d = detail::parse_real("game.d", *v);
    if (auto v = get("run.beta_grid")) c.beta_grid = parse_beta_list(*v, players(c.game));
    if (auto v = get("run.epsilon")) c.epsilon = detail::parse_real("run.epsilon", *v);
    if (auto v = get("run.seed")) c.seed = detail::parse_count("run.seed", *v);
    if (auto v = get("run.workers")) c.workers = detail::parse_count("run.workers", *v);
    if (auto v = get("caps.states")) c.state_cap = detail::parse_count("caps.states", *v);
    if (auto v = get("caps.horizon")) c.horizon = detail::parse_count("caps.horizon", *v);
    if (auto v = get("simulate.trials")) c.trials = detail::parse_count("simulate.trials", *v);
    if (auto v = get("simulate.horizon")) c.sim_horizon = detail::parse_count("simulate.horizon", *v);
    if (auto v = get("simulate.random_pairs")) c.random_pairs = detail::parse_count("simulate.random_pairs", *v);
    if (auto v = get("simulate.n_sweep")) c.n_sweep = parse_count_list("simulate.n_sweep", *v);
    if (auto v = get("verify.n_max")) c.verify_n_max = detail::parse_count("verify.n_max", *v);
    if (auto v = get("verify.recursion_n_max")) c.verify_rec_n_max = detail::parse_count("verify.recursion_n_max", *v);
    if (auto v = get("output.dir")) c.out_dir = detail::unquote(*v);
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    return parse_config(in);
}

/// Canonical text of every field, in fixed order; hashed into CSV headers.
/// Worker count and output directory are left out: they never change the numbers.
inline std::string canonical(const ExperimentConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "game=" << c.game.name << ";n=" << c.game.n << ";abcd=" << c.game.a << ',' << c.game.b << ',' << c.game.c
       << ',' << c.game.d << ";beta=";
    for (double b : c.beta_grid) os << b << ',';
    os << ";eps=" << c.epsilon << ";seed=" << c.seed << ";states=" << c.state_cap << ";horizon=" << c.horizon
       << ";sim_horizon=" << c.sim_horizon << ";trials=" << c.trials << ";random_pairs=" << c.random_pairs << ";n_sweep=";
    for (auto n : c.n_sweep) os << n << ',';
    os << ";verify_n_max=" << c.verify_n_max << ";verify_rec_n_max=" << c.verify_rec_n_max;
    return os.str();
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string config_hash(const ExperimentConfig& c) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << fnv1a(canonical(c));
    return os.str();
}

}  // namespace logitdyn::cli
