#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seedrl/engine.hpp"
#include "seedrl/environments.hpp"
#include "seedrl/strategies.hpp"

namespace seedrl {

enum class Preset { bipolar, parallel, maxpath, dirichlet_testbed };

std::string_view to_string(Preset p);
/// Throws ConfigError for an unknown name.
Preset parse_preset(std::string_view name);

struct ExperimentConfig {
  Preset preset = Preset::bipolar;
  std::vector<StrategyKind> strategies;
  std::vector<std::size_t> agent_counts;
  std::size_t replications = 100;
  std::uint64_t seed = 1;

  int vertices = 0;
  int chains = 0;
  int horizon = 0;
  double edge_probability = 0.0;
  double prior_mean = 0.0;
  double prior_variance = 0.0;
  double noise_variance = 1.0;
  double dirichlet_alpha = 1.0;
  double beta = 1.0;
  double arrival_rate = 1.0;

  /// Explicit H / p overrides; otherwise they derive from N (bipolar H = 3N/2, max-path p = 2 ln N / N).
  bool horizon_fixed = false;
  bool edge_probability_fixed = false;

  std::filesystem::path out_dir = "results";
  std::size_t threads = 0;  ///< 0 picks the hardware concurrency
  bool write_cumulative = false;
  bool write_observation_logs = false;
  bool write_model_dump = false;
};

/// Default parameters of a preset. Throws ConfigError for an unknown name.
ExperimentConfig preset_config(std::string_view name);

/// Applies one `key=value` override. Keys: N, C, H, p, prior_mean (mu0), prior_var (sigma0_sq),
/// sigma_sq, alpha, beta, rate. Throws ConfigError for unknown keys or malformed values.
void apply_override(ExperimentConfig& config, std::string_view assignment);

/// Re-derives dependent parameters (H from N for bipolar, p from N for max-path).
void resolve(ExperimentConfig& config);

/// Throws ConfigError when the config violates its invariants or pairs a strategy with an
/// environment it is not defined for.
void validate(const ExperimentConfig& config);

/// `# key=value` lines echoing the resolved configuration.
std::string describe(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);

std::uint64_t replication_seed(const ExperimentConfig& config, std::size_t replication);
/// The true model of a replication; shared by every strategy and K on the same master seed.
Environment make_environment(const ExperimentConfig& config, std::uint64_t replication_seed);

struct SweepCell {
  StrategyKind strategy;
  std::size_t agents = 0;
  std::vector<EpisodeResult> replications;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<SweepCell> cells;  ///< ordered by (strategy list order, K)
};

/// Runs every (strategy, K, replication). Replications fan out to a worker pool and are
/// merged by replication index, so the result is independent of the thread count.
SweepResult run_sweep(const ExperimentConfig& config);

struct AggregateRow {
  StrategyKind strategy;
  std::size_t agents = 0;
  RegretEstimate regret;
};

std::vector<AggregateRow> aggregate(const SweepResult& sweep);

struct CumulativeSeries {
  StrategyKind strategy;
  std::size_t agents = 0;
  /// Entry i: cumulative regret of the i+1 earliest-activated agents, averaged over replications.
  std::vector<double> cumulative;
};

std::vector<CumulativeSeries> emit_cumulative(const SweepResult& sweep);

/// Columns: preset,strategy,K,replication,agent_id,activation_time,total_reward,regret,r_star
void write_raw_csv(std::ostream& out, const SweepResult& sweep);
/// Columns: strategy,K,replications,mean_regret_per_agent,std_error
void write_aggregate_csv(std::ostream& out, const SweepResult& sweep);
/// Columns: strategy,K,rank,cumulative_regret
void write_cumulative_csv(std::ostream& out, const SweepResult& sweep);

/// Writes the CSVs (and optional dumps) under config.out_dir; returns the paths written.
/// Throws Error if the directory cannot be created or a file cannot be written.
std::vector<std::filesystem::path> write_sweep(const SweepResult& sweep);

/// Command-line entry point. Exit codes: 0 success, 1 runtime error, 2 configuration error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seedrl
