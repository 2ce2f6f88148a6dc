#pragma once

#include "ccq/core.hpp"
#include "ccq/oracle.hpp"
#include "ccq/spaces.hpp"
#include "ccq/toml.hpp"

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ccq {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public Error {
public:
    using Error::Error;
};

struct DistributionConfig {
    std::string kind = "realizable";  // realizable | rcn | bounded | agnostic_hard
    std::string target = "middle";    // row index, "middle", "first" or "last"
    std::vector<int> b;               // agnostic_hard signs; default all +1
    std::string flip = "constant";    // bounded: constant | random
};

struct LearnerConfig {
    std::string algorithm = "agnostic";
    double delta = 0.1;
    toml::Table params;  // algorithm-specific overrides
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    std::string name;
    std::string space = "thresholds:200";  // "{d}" and "{k}" are replaced per cell
    DistributionConfig distribution;
    LearnerConfig learner;
    std::vector<double> eps;
    std::vector<double> eta{0.0};
    std::vector<int> d{0};
    std::vector<int> k{2};
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::string output;
    int threads = 0;  // 0: OpenMP default
    bool record_timing = false;
    std::size_t capacity = 20000000;  // stream capacity per trial
};

ExperimentConfig parse_config(const toml::Document& doc);
ExperimentConfig load_config(const std::string& path);

struct Cell {
    std::size_t index = 0;
    double eps = 0.0;
    double eta = 0.0;
    int d = 0;
    int k = 2;
};

/** Cartesian product in the order eta, eps, d, k (k fastest). */
std::vector<Cell> make_cells(const ExperimentConfig& cfg);

/** Per-cell state shared read-only by its trials. */
struct CellContext {
    Cell cell;
    std::optional<SpaceBundle> bundle;
    GroundTruth truth;
    double noise_rate = 0.0;  // min true error over the space
    std::optional<HypothesisSpace> cover;
};

std::shared_ptr<const CellContext> make_context(const ExperimentConfig& cfg, const Cell& cell);

struct TrialRecord {
    Cell cell;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double error = 1.0;
    double target = 0.0;
    bool success = false;
    std::uint64_t ccq = 0;
    std::uint64_t label_requests = 0;
    double wall_ms = 0.0;
    std::string status;  // ok | failure | error
    std::string diagnostics;
};

std::uint64_t trial_seed(std::uint64_t base, std::size_t cell, std::size_t trial);

TrialRecord run_trial(const ExperimentConfig& cfg, const CellContext& ctx, std::size_t trial, std::uint64_t seed);
TrialRecord run_trial(const ExperimentConfig& cfg, const Cell& cell, std::uint64_t seed);

std::string csv_header();
std::string csv_row(const TrialRecord& r);
std::string csv_summary_row(const Cell& c, std::size_t trials, double success_rate, double median_ccq);
std::string csv_escape(const std::string& field);
std::vector<std::string> csv_split(const std::string& line);

double median(std::vector<double> v);

struct SweepResult {
    std::size_t trial_rows = 0;
    std::size_t summary_rows = 0;
    bool interrupted = false;
    std::size_t next_index = 0;
};

/**
 * Runs every (cell, trial) and writes trial rows plus one summary row per
 * cell. When `stop` becomes true the finished rows are kept and a
 * "#resume,<index>" line is appended; `resume` continues such a file.
 */
SweepResult sweep(const ExperimentConfig& cfg, const std::string& out_path, bool resume = false,
                  const std::atomic<bool>* stop = nullptr);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::vector<std::pair<double, double>> points;  // (x, median y) used
    std::vector<std::string> warnings;
};

/** OLS of log y on log x. Points with x <= 0 or y <= 0 are dropped with a warning. */
FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/**
 * Medians of ccq per axis value (1/eps for "eps"), then a log-log fit with a
 * bootstrap interval over trials within each axis value.
 */
FitResult fit_scaling(const std::string& csv_path, const std::string& axis, std::size_t bootstrap = 1000,
                      std::uint64_t seed = 20240917);
FitResult fit_scaling_samples(const std::vector<std::pair<double, double>>& samples, std::size_t bootstrap,
                              std::uint64_t seed);

}  // namespace ccq
