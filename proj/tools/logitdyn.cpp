#include <CLI11.hpp>

#include <iostream>

#include "logitdyn_cli/commands.hpp"

using namespace logitdyn;
using namespace logitdyn::cli;

namespace {

struct Overrides {
    std::string config;
    std::string game;
    std::optional<std::size_t> n;
    std::string beta;
    std::optional<double> eps;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::size_t> workers;
    bool corrupt = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("-c,--config", o.config, "Experiment config file");
    cmd->add_option("--game", o.game, "ck | coordination | anti_coordination | matching_pennies | stairs | or | xor");
    cmd->add_option("--n", o.n, "Number of players for stairs/or/xor");
    cmd->add_option("--beta", o.beta, "Comma-separated beta grid (ln_n and 2ln_n allowed)");
    cmd->add_option("--eps", o.eps, "Mixing threshold epsilon");
    cmd->add_option("--seed", o.seed, "Root seed");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
}

ExperimentConfig resolve(const Overrides& o) {
    ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    if (!o.game.empty()) c.game.name = o.game;
    if (o.n) c.game.n = *o.n;
    if (!o.beta.empty()) c.beta_grid = parse_beta_list(o.beta, players(c.game));
    if (o.eps) c.epsilon = *o.eps;
    if (o.seed) c.seed = *o.seed;
    if (!o.out.empty()) c.out_dir = o.out;
    if (o.workers) c.workers = *o.workers;
    validate(c);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Logit dynamics experiment runner"};
    app.require_subcommand(1);
    Overrides o;
    auto* analyze = app.add_subcommand("analyze", "Stationary, welfare, mixing and bound table per beta");
    auto* verify = app.add_subcommand("verify", "Run the property suite; exit 2 on any failed check");
    auto* simulate = app.add_subcommand("simulate", "Coupled-chain coalescence campaigns");
    auto* sweep = app.add_subcommand("sweep", "Wide per-beta table plus schedule and passage-time tables");
    for (auto* cmd : {analyze, verify, simulate, sweep}) add_common(cmd, o);
    verify->add_flag("--inject-corrupt-schedule", o.corrupt, "Halve delta_2 of the large-beta schedule");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        const auto c = resolve(o);
        if (*analyze) return run_analyze(c);
        if (*verify) return run_verify(c, o.corrupt);
        if (*simulate) return run_simulate(c);
        if (*sweep) return run_sweep(c);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const capacity_error& e) {
        std::cerr << "capacity exceeded: " << e.what() << '\n';
        return kExhausted;
    } catch (const horizon_error& e) {
        std::cerr << "horizon exhausted: " << e.what() << '\n';
        return kExhausted;
    } catch (const unsupported_game& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const invalid_parameters& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    return kOk;
}
