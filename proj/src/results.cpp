#include "ccnet/results.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ccnet/config.hpp"
#include "ccnet/random.hpp"

#ifndef CCNET_VERSION
#define CCNET_VERSION "unknown"
#endif

namespace ccnet {
namespace fs = std::filesystem;

OutputDir::OutputDir(fs::path dir, bool force) : dir_(std::move(dir))
{
    std::error_code ec;
    if (fs::exists(dir_, ec)) {
        if (!fs::is_directory(dir_, ec)) {
            throw OutputError("output path exists and is not a directory: " + dir_.string());
        }
        if (!force && !fs::is_empty(dir_, ec)) {
            throw OutputError("output directory is not empty (pass --force to overwrite): " + dir_.string());
        }
    } else if (!fs::create_directories(dir_, ec) || ec) {
        throw OutputError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }
}

void OutputDir::write(std::string const& name, std::string const& content)
{
    fs::path const target = dir_ / name;
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw OutputError("cannot open " + target.string() + " for writing");
    }
    out << content;
    out.close();
    if (!out) {
        throw OutputError("failed writing " + target.string());
    }
    files_.push_back(name);
}

void OutputDir::write_json(std::string const& name, nlohmann::json const& value) { write(name, value.dump(2) + "\n"); }

std::string sweep_csv(std::vector<SweepResult> const& rows)
{
    std::ostringstream out;
    out << "protocol,system,q,estimate,ci95,analytic\n";
    for (auto const& r : rows) {
        out << to_string(r.protocol) << ',' << to_string(r.system) << ',' << format_number(r.q) << ','
            << format_number(r.estimate) << ',' << format_number(r.half_width_95) << ','
            << (r.analytic ? format_number(*r.analytic) : std::string{}) << '\n';
    }
    return out.str();
}

std::string analytic_csv(std::vector<AnalyticRow> const& rows)
{
    std::ostringstream out;
    out << "protocol,q,lambda,T,v,beta,value,abs_err_estimate\n";
    for (auto const& r : rows) {
        out << to_string(r.protocol) << ',' << format_number(r.q) << ',' << format_number(r.lambda) << ',' << r.T
            << ',' << r.v << ',' << (r.beta ? format_number(*r.beta) : std::string{}) << ','
            << format_number(r.value) << ',' << format_number(r.abs_error) << '\n';
    }
    return out.str();
}

std::string compare_csv(std::vector<ComparisonRow> const& rows)
{
    std::ostringstream out;
    out << "kind,protocol,q,lambda,v,beta,empirical,ci95,analytic,abs_diff,tolerance,pass\n";
    for (auto const& r : rows) {
        out << r.kind << ',' << to_string(r.protocol) << ',' << format_number(r.q) << ','
            << format_number(r.lambda) << ',' << r.v << ',' << (r.beta ? format_number(*r.beta) : std::string{})
            << ',' << format_number(r.empirical) << ',' << format_number(r.half_width_95) << ','
            << format_number(r.analytic) << ',' << format_number(r.abs_diff) << ',' << format_number(r.tolerance)
            << ',' << (r.passes ? "true" : "false") << '\n';
    }
    return out.str();
}

std::string regret_csv(RegretStudy const& study)
{
    std::ostringstream out;
    out << "k,mean_regret,envelope\n";
    for (std::size_t k = 0; k < study.mean_cumulative.size(); ++k) {
        out << (k + 1) << ',' << format_number(study.mean_cumulative[k]) << ','
            << format_number(study.envelope[k]) << '\n';
    }
    return out.str();
}

std::string ts_csv(TsRun const& run, std::vector<double> const& arms)
{
    std::ostringstream out;
    out << "k,arm_index,q,block_reward,cumulative_regret\n";
    auto const& tr = run.trace;
    for (std::size_t k = 0; k < tr.chosen_arm.size(); ++k) {
        out << (k + 1) << ',' << tr.chosen_arm[k] << ',' << format_number(arms[tr.chosen_arm[k]]) << ','
            << format_number(tr.block_reward[k]) << ',' << format_number(tr.cumulative[k]) << '\n';
    }
    return out.str();
}

nlohmann::json posterior_json(TsRun const& run, std::vector<double> const& arms)
{
    nlohmann::json snaps = nlohmann::json::array();
    for (auto const& s : run.snapshots) {
        snaps.push_back({{"block", s.block}, {"posteriors", s.posteriors}});
    }
    return {{"arms", arms},
            {"oracle_arm", run.oracle.index},
            {"mu", run.oracle.mu},
            {"snapshots", snaps},
            {"final", run.posteriors}};
}

std::string combo_suffix(ExperimentConfig const& config, double lambda, std::optional<int> v)
{
    std::string s;
    if (config.lambdas.size() > 1) {
        s += "_lambda" + format_number(lambda);
    }
    if (v && config.horizons.size() > 1) {
        s += "_v" + std::to_string(*v);
    }
    return s;
}

std::string config_hash(std::string const& config_text)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_text.data(), config_text.size())));
    return buf;
}

std::string version_string() { return CCNET_VERSION; }

void write_manifest(OutputDir& out, Manifest const& manifest)
{
    nlohmann::json files = out.files();
    nlohmann::json j{{"command", manifest.command},
                     {"config_hash", config_hash(manifest.config_text)},
                     {"seed", manifest.seed},
                     {"version", version_string()},
                     {"threads", manifest.threads},
                     {"wall_time_s", manifest.wall_time_s},
                     {"files", files},
                     {"summary", manifest.summary}};
    out.write_json("manifest.json", j);
}

}  // namespace ccnet
