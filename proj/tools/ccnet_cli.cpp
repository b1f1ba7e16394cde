#include <chrono>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "ccnet/config.hpp"
#include "ccnet/errors.hpp"
#include "ccnet/results.hpp"
#include "ccnet/selftest.hpp"

namespace {

struct CommonArgs
{
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
    bool force = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_out)
{
    cmd->add_option("--config", args.config_path, "configuration file")->check(CLI::ExistingFile);
    auto* out = cmd->add_option("--out", args.out_dir, "output directory");
    if (needs_out) {
        out->required();
    }
    cmd->add_option("--set", args.sets, "override, key=value (repeatable)")->allow_extra_args(false);
    cmd->add_option("--threads", args.threads, "worker threads (0 = hardware concurrency)");
    cmd->add_option("--seed", args.seed, "root seed, overrides the config");
    cmd->add_flag("--force", args.force, "overwrite a non-empty output directory");
}

ccnet::ExperimentConfig resolve(CommonArgs const& args)
{
    std::vector<std::string> overrides = args.sets;
    if (args.seed) {
        overrides.push_back("seed=" + std::to_string(*args.seed));
    }
    ccnet::ExperimentConfig config = args.config_path.empty() ? ccnet::parse_config("", overrides)
                                                              : ccnet::load_config(args.config_path, overrides);
    config.threads = args.threads != 0 ? args.threads : std::max(1u, std::thread::hardware_concurrency());
    return config;
}

using Clock = std::chrono::steady_clock;

int finish(ccnet::OutputDir& out, std::string const& command, ccnet::ExperimentConfig const& config,
           Clock::time_point start, nlohmann::json summary)
{
    std::string const text = ccnet::to_config_text(config);
    out.write("config.resolved.conf", text);
    ccnet::Manifest m;
    m.command = command;
    m.config_text = text;
    m.seed = config.seed;
    m.threads = config.threads;
    m.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    m.summary = std::move(summary);
    ccnet::write_manifest(out, m);
    std::cout << "wrote " << out.files().size() << " files to " << out.path().string() << '\n';
    return 0;
}

int cmd_simulate(CommonArgs const& args)
{
    auto const start = Clock::now();
    auto const config = resolve(args);
    ccnet::OutputDir out(args.out_dir, args.force);
    auto const rows = ccnet::estimate_block_controllability(config, config.geometry == ccnet::GeometryMode::PerBlock);
    for (double lambda : config.lambdas) {
        for (int v : config.horizons) {
            std::vector<ccnet::SweepResult> part;
            for (auto const& r : rows) {
                if (r.lambda == lambda && r.v == v) {
                    part.push_back(r);
                }
            }
            out.write("sweep" + ccnet::combo_suffix(config, lambda, v) + ".csv", ccnet::sweep_csv(part));
        }
    }
    if (config.geometry == ccnet::GeometryMode::Fixed) {
        for (std::size_t li = 0; li < config.lambdas.size(); ++li) {
            nlohmann::json j = ccnet::fixed_realization(config, li);
            out.write_json("realization" + ccnet::combo_suffix(config, config.lambdas[li], std::nullopt) + ".json", j);
        }
    }
    return finish(out, "simulate", config, start, {{"rows", rows.size()}});
}

int cmd_analytic(CommonArgs const& args)
{
    auto const start = Clock::now();
    auto const config = resolve(args);
    ccnet::OutputDir out(args.out_dir, args.force);
    auto const rows = ccnet::run_analytic_sweep(config);
    int warnings = 0;
    for (auto const& r : rows) {
        if (r.precision_warning) {
            ++warnings;
            std::cerr << "warning: alternating sum lost precision (" << ccnet::to_string(r.protocol)
                      << ", q=" << r.q << ", lambda=" << r.lambda << ", v=" << r.v << ")\n";
        }
    }
    out.write("analytic.csv", ccnet::analytic_csv(rows));
    return finish(out, "analytic", config, start, {{"rows", rows.size()}, {"precision_warnings", warnings}});
}

int cmd_ts(CommonArgs const& args)
{
    auto const start = Clock::now();
    auto const config = resolve(args);
    ccnet::OutputDir out(args.out_dir, args.force);
    auto const outcomes = ccnet::run_ts_experiment(config);
    nlohmann::json summary = nlohmann::json::array();
    for (auto const& o : outcomes) {
        std::string const sfx = ccnet::combo_suffix(config, o.lambda, std::nullopt);
        out.write("ts" + sfx + ".csv", ccnet::ts_csv(o.run, config.arms));
        out.write_json("posteriors" + sfx + ".json", ccnet::posterior_json(o.run, config.arms));
        nlohmann::json real = o.realization;
        out.write_json("realization" + sfx + ".json", real);
        summary.push_back({{"lambda", o.lambda},
                           {"oracle_arm", o.run.oracle.index},
                           {"final_regret", o.run.trace.cumulative.empty() ? 0.0 : o.run.trace.cumulative.back()}});
    }
    return finish(out, "ts", config, start, summary);
}

int cmd_compare(CommonArgs const& args)
{
    auto const start = Clock::now();
    auto const config = resolve(args);
    ccnet::OutputDir out(args.out_dir, args.force);
    auto const rows = ccnet::compare_analytic_empirical(config);
    int failed = 0;
    for (auto const& r : rows) {
        if (!r.passes) {
            ++failed;
            std::cerr << "mismatch: " << r.kind << ' ' << ccnet::to_string(r.protocol) << " q=" << r.q
                      << " lambda=" << r.lambda << " v=" << r.v << " empirical=" << r.empirical
                      << " analytic=" << r.analytic << '\n';
        }
    }
    out.write("compare.csv", ccnet::compare_csv(rows));
    finish(out, "compare", config, start, {{"rows", rows.size()}, {"failed", failed}});
    return failed == 0 ? 0 : 1;
}

int cmd_regret(CommonArgs const& args)
{
    auto const start = Clock::now();
    auto const config = resolve(args);
    ccnet::OutputDir out(args.out_dir, args.force);
    auto const studies = ccnet::run_regret_study(config);
    nlohmann::json summary = nlohmann::json::array();
    for (auto const& s : studies) {
        out.write("regret" + ccnet::combo_suffix(config, s.lambda, std::nullopt) + ".csv", ccnet::regret_csv(s));
        std::size_t hits = 0;
        for (auto h : s.oracle_hits) {
            hits += h;
        }
        summary.push_back({{"lambda", s.lambda},
                           {"final_mean_regret", s.mean_cumulative.back()},
                           {"final_envelope", s.envelope.back()},
                           {"below_envelope", s.below_envelope},
                           {"max_doubling_ratio", s.max_ratio},
                           {"oracle_hit_fraction", static_cast<double>(hits) / s.oracle_hits.size()}});
    }
    return finish(out, "regret", config, start, summary);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Controllability of wirelessly networked control loops under slotted ALOHA"};
    app.set_version_flag("--version", ccnet::version_string());
    app.require_subcommand(1);

    CommonArgs args;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo block-controllability sweep");
    auto* analytic = app.add_subcommand("analytic", "closed-form controllability and meta distribution");
    auto* ts = app.add_subcommand("ts", "Thompson-sampling access-probability selection");
    auto* compare = app.add_subcommand("compare", "analytic against empirical, nonzero exit on mismatch");
    auto* regret = app.add_subcommand("regret", "mean cumulative regret against the envelope");
    auto* selftest = app.add_subcommand("selftest", "internal consistency checks");
    for (auto* cmd : {simulate, analytic, ts, compare, regret}) {
        add_common(cmd, args, true);
    }
    add_common(selftest, args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            return cmd_simulate(args);
        }
        if (analytic->parsed()) {
            return cmd_analytic(args);
        }
        if (ts->parsed()) {
            return cmd_ts(args);
        }
        if (compare->parsed()) {
            return cmd_compare(args);
        }
        if (regret->parsed()) {
            return cmd_regret(args);
        }
        return ccnet::run_selftest(std::cout) == 0 ? 0 : 1;
    } catch (ccnet::ConfigError const& e) {
        std::cerr << "config error [" << e.key() << "]: " << e.what() << '\n';
        return 2;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
