#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ccnet/montecarlo.hpp"

namespace ccnet {

/// Raised for I/O failures; the message carries the path.
class OutputError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Output directory guard. An existing non-empty directory is refused unless
/// `force` is set; files are written whole and recorded for the manifest.
class OutputDir
{
  public:
    OutputDir(std::filesystem::path dir, bool force);

    void write(std::string const& name, std::string const& content);
    void write_json(std::string const& name, nlohmann::json const& value);

    std::filesystem::path const& path() const noexcept { return dir_; }
    std::vector<std::string> const& files() const noexcept { return files_; }

  private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

std::string sweep_csv(std::vector<SweepResult> const& rows);
std::string analytic_csv(std::vector<AnalyticRow> const& rows);
std::string compare_csv(std::vector<ComparisonRow> const& rows);
std::string regret_csv(RegretStudy const& study);
std::string ts_csv(TsRun const& run, std::vector<double> const& arms);

nlohmann::json posterior_json(TsRun const& run, std::vector<double> const& arms);

/// Suffix for per-(lambda, v) files when a list has several entries; empty
/// otherwise.
std::string combo_suffix(ExperimentConfig const& config, double lambda, std::optional<int> v);

struct Manifest
{
    std::string command;
    std::string config_text;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    double wall_time_s = 0.0;
    nlohmann::json summary = nlohmann::json::object();
};

/// manifest.json: config hash, seed, version, wall time, files written.
void write_manifest(OutputDir& out, Manifest const& manifest);

std::string config_hash(std::string const& config_text);

std::string version_string();

}  // namespace ccnet
