// Acceptance runner: one PASS/FAIL line per criterion. Criteria 1-9 run the
// shared check suite at full scale (exact chains up to n = 10, recursions up to
// n = 64); criterion 10 runs verify and simulate twice and compares bytes.
// Every tolerance lives next to its check in logitdyn_cli/checks.hpp.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "logitdyn_cli/commands.hpp"

using namespace logitdyn;
using namespace logitdyn::cli;
namespace fs = std::filesystem;

namespace {

const char* const kTitles[] = {
    "",
    "stationary welfare closed forms",
    "matching pennies uniform law and d(3)",
    "coordination eigenvalue and relaxation sandwich",
    "OR bottleneck ratios and lower bound",
    "OR path-coupling schedules and contraction",
    "log-beta recursion properties",
    "XOR lumping, passage times and t_mix window",
    "CK three-step coalescence and constant t_mix",
    "finite-size stand-ins for the asymptotic claims",
    "determinism of verify and simulate",
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        const auto other = b / e.path().filename();
        if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
            why = e.path().filename().string() + " differs";
            return false;
        }
        ++files;
    }
    if (files == 0) {
        why = "no output files";
        return false;
    }
    return true;
}

bool determinism(std::string& detail_out) {
    const fs::path root = fs::temp_directory_path() / "logitdyn_acceptance";
    fs::remove_all(root);
    std::ostringstream sink;
    ExperimentConfig v;
    v.verify_n_max = 6;
    v.verify_rec_n_max = 16;
    v.trials = 400;
    ExperimentConfig s;
    s.game.name = "stairs";
    s.n_sweep = {4, 8, 16};
    s.beta_grid = {0.0, 1.0};
    s.trials = 300;
    ExperimentConfig ck;
    ck.beta_grid = {0.0, 2.0};
    std::size_t k = 0;
    // The second run of each pair uses a different worker count on purpose.
    for (auto* c : {&v, &s, &ck}) {
        c->out_dir = (root / ("a" + std::to_string(k))).string();
        c->workers = 1;
        auto twin = *c;
        twin.out_dir = (root / ("b" + std::to_string(k))).string();
        twin.workers = 0;
        const int r1 = c == &v ? run_verify(*c, false, sink) : run_simulate(*c);
        const int r2 = c == &v ? run_verify(twin, false, sink) : run_simulate(twin);
        std::string why;
        if (r1 != r2 || !same_tree(c->out_dir, twin.out_dir, why)) {
            detail_out = (c == &v ? "verify: " : "simulate: ") + (r1 != r2 ? std::string("exit codes differ") : why);
            return false;
        }
        ++k;
    }
    fs::remove_all(root);
    detail_out = "verify + 2 simulate campaigns byte-identical across runs and worker counts";
    return true;
}

}  // namespace

int main() {
    SuiteOptions opt;  // full grid with ln n and 2 ln n, exact n <= 10, recursions n <= 64
    Suite suite(opt);
    bool all = true;
    const auto start = std::chrono::steady_clock::now();
    prefetch_exact(suite);

    for (int g = 1; g <= kGroupCount; ++g) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::size_t first = suite.rows.size();
        std::string error;
        try {
            run_group(suite, g);
        } catch (const std::exception& e) {
            error = e.what();
        }
        std::size_t checks = 0, failed = 0;
        double worst = std::numeric_limits<double>::infinity();
        const CheckRow* first_fail = nullptr;
        for (std::size_t k = first; k < suite.rows.size(); ++k) {
            const auto& r = suite.rows[k];
            if (r.diagnostic) continue;
            ++checks;
            worst = std::min(worst, r.margin);
            if (!r.pass) {
                ++failed;
                if (!first_fail) first_fail = &r;
            }
        }
        const bool pass = error.empty() && failed == 0 && checks > 0;
        all = all && pass;
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d: %s  %s (%zu checks, %zu failed, min margin %.3g, %.1fs)\n", g, pass ? "PASS" : "FAIL",
                    kTitles[g], checks, failed, worst, secs);
        if (!error.empty()) std::printf("    error: %s\n", error.c_str());
        if (first_fail)
            std::printf("    first failure: %s [%s] value %.6g vs limit %.6g\n", first_fail->check.c_str(),
                        first_fail->params.c_str(), first_fail->value, first_fail->limit);
        std::fflush(stdout);
    }

    {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail_text;
        bool pass = false;
        try {
            pass = determinism(detail_text);
        } catch (const std::exception& e) {
            detail_text = e.what();
        }
        all = all && pass;
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion 10: %s  %s (%s, %.1fs)\n", pass ? "PASS" : "FAIL", kTitles[10], detail_text.c_str(), secs);
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("total %.1fs\n", total);
    return all ? 0 : 1;
}
