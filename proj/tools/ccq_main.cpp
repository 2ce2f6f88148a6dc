#include "ccq/harness.hpp"
#include "ccq/measures.hpp"
#include "ccq/spaces.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop.store(true); }

constexpr int kConfigError = 1;
constexpr int kLearnerFailure = 2;

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out) {
    auto cfg = ccq::load_config(config);
    if (seed) cfg.seed = *seed;
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out.empty()) {
        file.open(out);
        if (!file) throw ccq::ConfigError("cannot write " + out);
        os = &file;
    }
    *os << ccq::csv_header() << '\n';
    bool failed = false;
    for (const auto& cell : ccq::make_cells(cfg)) {
        auto ctx = ccq::make_context(cfg, cell);
        auto rec = ccq::run_trial(cfg, *ctx, 0, ccq::trial_seed(cfg.seed, cell.index, 0));
        *os << ccq::csv_row(rec) << '\n';
        if (rec.status != "ok") {
            failed = true;
            std::cerr << "cell " << cell.index << ": " << rec.status << ": " << rec.diagnostics << '\n';
        }
    }
    return failed ? kLearnerFailure : 0;
}

int cmd_sweep(const std::string& config, const std::string& out_override, bool resume) {
    const auto cfg = ccq::load_config(config);
    const std::string out = !out_override.empty() ? out_override : !cfg.output.empty() ? cfg.output : "sweep.csv";
    std::signal(SIGINT, on_sigint);
    const auto r = ccq::sweep(cfg, out, resume, &g_stop);
    std::cerr << r.trial_rows << " trial rows, " << r.summary_rows << " summary rows written to " << out << '\n';
    if (r.interrupted) {
        std::cerr << "interrupted; continue with --resume (next trial " << r.next_index << ")\n";
        return 130;
    }
    return 0;
}

int cmd_measure(const std::string& spec, const std::string& what, const std::vector<double>& grid, double tau,
                double resolution) {
    const auto b = ccq::parse_space_spec(spec);
    if (what == "theta") {
        std::cout << "eps,theta,argmax\n";
        for (double e : grid) {
            const auto t = ccq::class_disagreement_coefficient_parallel(b.space, b.domain, e);
            std::printf("%.10g,%.10g,%zu\n", e, t.theta, t.argmax);
        }
    } else if (what == "rho") {
        std::cout << "eps,tau,rho\n";
        for (double e : grid) {
            std::printf("%.10g,%.10g,%.10g\n", e, tau,
                        ccq::class_splitting_index(b.space, b.domain, tau, e, resolution));
        }
    } else {
        throw ccq::ConfigError("--what must be theta or rho");
    }
    return 0;
}

int cmd_cover(const std::string& spec, double eps, const std::string& out) {
    const auto b = ccq::parse_space_spec(spec);
    const auto cover = ccq::epsilon_cover(b.space, b.domain, eps);
    std::cout << "space_size," << b.space.size() << "\ncover_size," << cover.size() << '\n';
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw ccq::ConfigError("cannot write " + out);
        ccq::write_space(f, b.domain, cover);
    }
    return 0;
}

int cmd_fit(const std::string& csv, const std::string& axis, std::size_t bootstrap) {
    const auto r = ccq::fit_scaling(csv, axis, bootstrap);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    std::printf("x,median_ccq\n");
    for (const auto& [x, y] : r.points) std::printf("%.10g,%.10g\n", x, y);
    std::printf("slope,%.6f\nci_lo,%.6f\nci_hi,%.6f\nintercept,%.6f\n", r.slope, r.ci_lo, r.ci_hi, r.intercept);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Class-conditional query learners: trials, sweeps, measures and fits"};
    app.require_subcommand(1);

    std::string config, out, space, what = "theta", csv, axis;
    std::optional<std::uint64_t> seed;
    bool resume = false;
    std::vector<double> grid;
    double tau = 0.1, resolution = 0.01, eps = 0.05;
    std::size_t bootstrap = 1000;

    auto* run = app.add_subcommand("run", "one trial per cell");
    run->add_option("--config", config)->required();
    run->add_option("--seed", seed, "overrides the base seed");
    run->add_option("--out", out, "CSV path (stdout when omitted)");

    auto* sw = app.add_subcommand("sweep", "all cells x trials to CSV");
    sw->add_option("--config", config)->required();
    sw->add_option("--out", out, "overrides [experiment] output");
    sw->add_flag("--resume", resume, "continue an interrupted CSV");

    auto* me = app.add_subcommand("measure", "disagreement coefficient or splitting index over an eps grid");
    me->add_option("--space", space)->required();
    me->add_option("--what", what)->check(CLI::IsMember({"theta", "rho"}));
    me->add_option("--eps-grid", grid)->required()->delimiter(',');
    me->add_option("--tau", tau);
    me->add_option("--resolution", resolution);

    auto* co = app.add_subcommand("cover", "greedy eps-cover size");
    co->add_option("--space", space)->required();
    co->add_option("--eps", eps)->required();
    co->add_option("--out", out, "write the cover in the space file format");

    auto* fi = app.add_subcommand("fit", "log-log slope of median ccq count");
    fi->add_option("--csv", csv)->required();
    fi->add_option("--x", axis)->required()->check(CLI::IsMember({"eta", "eps", "d"}));
    fi->add_option("--bootstrap", bootstrap);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        if (*run) return cmd_run(config, seed, out);
        if (*sw) return cmd_sweep(config, out, resume);
        if (*me) return cmd_measure(space, what, grid, tau, resolution);
        if (*co) return cmd_cover(space, eps, out);
        if (*fi) return cmd_fit(csv, axis, bootstrap);
    } catch (const ccq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return 0;
}
