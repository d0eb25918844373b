// omi: command-line front end.
//
//   omi simulate    --config run.json --out dir
//   omi sweep-phase --config run.json --out dir [--workers n]
//   omi dark-decay  --config run.json --out dir [--workers n]
//   omi spectrum    --config run.json --out dir
//   omi selftest    [--out dir]
//
// Exit codes: 0 success, 1 I/O error, 2 config error, 3 numerical failure,
// 4 selftest failure.

#include "omi/commands.hpp"
#include "omi/errors.hpp"
#include "omi/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

enum Exit { kOk = 0, kIo = 1, kConfig = 2, kNumerical = 3, kSelftest = 4 };

struct Args {
    std::string config;
    std::string out;
    unsigned workers = 0;
    long long seed = 0;  // reserved; the model is deterministic
};

void add_common(CLI::App* cmd, Args& a, bool needs_config) {
    auto* c = cmd->add_option("--config", a.config, "JSON run configuration");
    auto* o = cmd->add_option("--out", a.out, "output directory");
    if (needs_config) {
        c->required()->check(CLI::ExistingFile);
        o->required();
    }
    cmd->add_option("--workers", a.workers, "worker threads (default: all processors)");
    cmd->add_option("--seed", a.seed, "reserved, unused");
}

int run_selftest(const Args& a) {
    if (!a.config.empty()) (void)omi::load_config(a.config);
    const omi::SelftestReport rep = omi::run_selftest();
    for (const auto& c : rep.checks) {
        std::printf("%s  %-24s %7.3f s  %s\n", c.outcome.passed ? "PASS" : "FAIL", c.name.c_str(),
                    c.seconds, c.outcome.detail.c_str());
    }
    std::printf("selftest %s in %.2f s\n", rep.passed() ? "passed" : "FAILED", rep.seconds);
    if (!a.out.empty()) {
        std::filesystem::create_directories(a.out);
        omi::write_summary(a.out, omi::selftest_summary(rep));
    }
    return rep.passed() ? kOk : kSelftest;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-mode optomechanical pulse-protocol simulator"};
    app.require_subcommand(1);
    Args a;
    auto* simulate = app.add_subcommand("simulate", "integrate one protocol, export traces and fits");
    auto* sweep = app.add_subcommand("sweep-phase", "coupling-phase sweep and fringe fit");
    auto* dark = app.add_subcommand("dark-decay", "dark-mode tau sweep and decay fit");
    auto* spectrum = app.add_subcommand("spectrum", "steady-state transparency spectrum");
    auto* selftest = app.add_subcommand("selftest", "run the invariant checks");
    for (auto* c : {simulate, sweep, dark, spectrum}) add_common(c, a, true);
    add_common(selftest, a, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (selftest->parsed()) return run_selftest(a);
        const omi::RunConfig cfg = omi::load_config(a.config);
        const omi::CommandOptions opt{a.out, a.workers > 0 ? a.workers : omi::default_workers()};
        nlohmann::ordered_json summary;
        if (simulate->parsed()) summary = omi::cmd_simulate(cfg, opt);
        if (sweep->parsed()) summary = omi::cmd_sweep_phase(cfg, opt);
        if (dark->parsed()) summary = omi::cmd_dark_decay(cfg, opt);
        if (spectrum->parsed()) summary = omi::cmd_spectrum(cfg, opt);
        std::printf("%s\n", summary.dump(2).c_str());
        return kOk;
    } catch (const omi::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const omi::DivergenceError& e) {
        std::fprintf(stderr, "numerical failure at t = %.9g s: %s\n", e.time(), e.what());
        return kNumerical;
    } catch (const omi::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kIo;
    } catch (const omi::Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kIo;
    }
}
