#include "seedrl/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "seedrl/errors.hpp"
#include "seedrl/planner.hpp"

namespace seedrl {

namespace {

constexpr int kDigits = 9;

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ConfigError("malformed value '" + std::string(text) + "' for " + std::string(key));
  return value;
}

std::string join_strategies(const std::vector<StrategyKind>& kinds) {
  std::string s;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (i) s += ';';
    s += to_string(kinds[i]);
  }
  return s;
}

std::string join_counts(const std::vector<std::size_t>& counts) {
  std::string s;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(counts[i]);
  }
  return s;
}

std::string fixed(double x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(kDigits) << x;
  return os.str();
}

// Parameter lines shared by the config echo and the hash; excludes I/O-only settings.
std::string parameter_block(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "# preset=" << to_string(c.preset) << '\n'
     << "# strategies=" << join_strategies(c.strategies) << '\n'
     << "# agents=" << join_counts(c.agent_counts) << '\n'
     << "# replications=" << c.replications << '\n'
     << "# seed=" << c.seed << '\n';
  switch (c.preset) {
    case Preset::bipolar:
      os << "# N=" << c.vertices << '\n' << "# H=" << c.horizon << '\n';
      break;
    case Preset::parallel:
      os << "# C=" << c.chains << '\n'
         << "# H=" << c.horizon << '\n'
         << "# prior_mean=" << fixed(c.prior_mean) << '\n'
         << "# prior_var=" << fixed(c.prior_variance) << '\n'
         << "# sigma_sq=" << fixed(c.noise_variance) << '\n';
      break;
    case Preset::maxpath:
      os << "# N=" << c.vertices << '\n'
         << "# p=" << fixed(c.edge_probability) << '\n'
         << "# H=" << c.horizon << '\n'
         << "# prior_mean=" << fixed(c.prior_mean) << '\n'
         << "# prior_var=" << fixed(c.prior_variance) << '\n'
         << "# sigma_sq=" << fixed(c.noise_variance) << '\n';
      break;
    case Preset::dirichlet_testbed:
      os << "# N=" << c.vertices << '\n'
         << "# H=" << c.horizon << '\n'
         << "# alpha=" << fixed(c.dirichlet_alpha) << '\n';
      break;
  }
  os << "# beta=" << fixed(c.beta) << '\n' << "# rate=" << fixed(c.arrival_rate) << '\n';
  return os.str();
}

std::string bipolar_reference(const ExperimentConfig& c) {
  if (c.preset != Preset::bipolar) return {};
  Rng rng = make_rng(0);
  const Environment env = make_bipolar_chain(c.vertices, rng, c.horizon);
  const double n = c.vertices;
  const std::vector<double> left{n, -n};
  const std::vector<double> right{-n, n};
  const double v_left = plan(env.topology(), left, env.spec().start, env.spec().horizon).value;
  const double v_right = plan(env.topology(), right, env.spec().start, env.spec().horizon).value;
  std::ostringstream os;
  os << "# reference_r_star_left_positive=" << fixed(n / 2) << '\n'
     << "# reference_r_star_right_positive=" << fixed(n / 2 + 1) << '\n'
     << "# r_star_left_positive=" << fixed(v_left) << '\n'
     << "# r_star_right_positive=" << fixed(v_right) << '\n';
  return os.str();
}

std::string csv_header(const SweepResult& sweep) { return describe(sweep.config) + bipolar_reference(sweep.config); }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::bipolar:
      return "bipolar";
    case Preset::parallel:
      return "parallel";
    case Preset::maxpath:
      return "maxpath";
    case Preset::dirichlet_testbed:
      return "dirichlet-testbed";
  }
  return "unknown";
}

Preset parse_preset(std::string_view name) {
  for (Preset p : {Preset::bipolar, Preset::parallel, Preset::maxpath, Preset::dirichlet_testbed})
    if (to_string(p) == name) return p;
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig c;
  c.preset = parse_preset(name);
  c.agent_counts = {1, 10, 100, 1000};
  switch (c.preset) {
    case Preset::bipolar:
      c.strategies = {StrategyKind::seed_finite_scenario, StrategyKind::concurrent_ucrl,
                      StrategyKind::thompson_resampling};
      c.vertices = 100;
      break;
    case Preset::parallel:
      c.strategies = {StrategyKind::seed_standard_gaussian, StrategyKind::seed_martingalean_gaussian,
                      StrategyKind::thompson_resampling, StrategyKind::concurrent_ucrl};
      c.chains = 10;
      c.horizon = 5;
      c.prior_mean = 0.0;
      c.prior_variance = 100.0;
      c.noise_variance = 1.0;
      break;
    case Preset::maxpath:
      c.strategies = {StrategyKind::seed_standard_gaussian, StrategyKind::seed_martingalean_gaussian,
                      StrategyKind::thompson_resampling, StrategyKind::concurrent_ucrl, StrategyKind::greedy};
      c.vertices = 100;
      c.horizon = 10;
      c.prior_mean = 0.0;
      c.prior_variance = 4.0;
      c.noise_variance = 0.01;
      break;
    case Preset::dirichlet_testbed:
      c.strategies = {StrategyKind::seed_exponential_dirichlet, StrategyKind::thompson_resampling,
                      StrategyKind::greedy};
      c.vertices = 5;
      c.horizon = 10;
      c.dirichlet_alpha = 1.0;
      break;
  }
  resolve(c);
  return c;
}

void apply_override(ExperimentConfig& c, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override must be key=value, got '" + std::string(assignment) + "'");
  const std::string_view key = assignment.substr(0, eq);
  const std::string_view value = assignment.substr(eq + 1);
  if (key == "N") {
    c.vertices = parse_number<int>(key, value);
  } else if (key == "C") {
    c.chains = parse_number<int>(key, value);
  } else if (key == "H") {
    c.horizon = parse_number<int>(key, value);
    c.horizon_fixed = true;
  } else if (key == "p") {
    c.edge_probability = parse_number<double>(key, value);
    c.edge_probability_fixed = true;
  } else if (key == "prior_mean" || key == "mu0") {
    c.prior_mean = parse_number<double>(key, value);
  } else if (key == "prior_var" || key == "sigma0_sq") {
    c.prior_variance = parse_number<double>(key, value);
  } else if (key == "sigma_sq") {
    c.noise_variance = parse_number<double>(key, value);
  } else if (key == "alpha") {
    c.dirichlet_alpha = parse_number<double>(key, value);
  } else if (key == "beta") {
    c.beta = parse_number<double>(key, value);
  } else if (key == "rate") {
    c.arrival_rate = parse_number<double>(key, value);
  } else {
    throw ConfigError("unknown override key '" + std::string(key) + "'");
  }
}

void resolve(ExperimentConfig& c) {
  if (c.preset == Preset::bipolar && !c.horizon_fixed) c.horizon = 3 * c.vertices / 2;
  if (c.preset == Preset::maxpath && !c.edge_probability_fixed && c.vertices > 1) {
    const double n = c.vertices;
    c.edge_probability = std::min(1.0, 2.0 * std::log(n) / n);
  }
}

void validate(const ExperimentConfig& c) {
  if (c.replications < 1) throw ConfigError("replications must be >= 1");
  if (c.strategies.empty()) throw ConfigError("at least one strategy is required");
  if (c.agent_counts.empty()) throw ConfigError("at least one agent count is required");
  for (std::size_t i = 0; i < c.agent_counts.size(); ++i) {
    if (c.agent_counts[i] < 1) throw ConfigError("agent counts must be positive");
    if (i && c.agent_counts[i] <= c.agent_counts[i - 1]) throw ConfigError("agent counts must be strictly increasing");
  }
  if (c.horizon < 1) throw ConfigError("H must be >= 1");
  if (!(c.beta >= 0.0)) throw ConfigError("beta must be nonnegative");
  if (!(c.arrival_rate > 0.0)) throw ConfigError("arrival rate must be positive");
  std::optional<Environment> env;
  try {
    env.emplace(make_environment(c, replication_seed(c, 0)));
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what());
  } catch (const GenerationError& e) {
    throw ConfigError(e.what());
  }
  const Belief prior = env->prior();
  for (auto kind : c.strategies)
    if (!supports(kind, prior))
      throw ConfigError(std::string(to_string(kind)) + " is not defined for the " + std::string(to_string(c.preset)) +
                        " preset");
}

std::string describe(const ExperimentConfig& c) {
  std::ostringstream os;
  os << parameter_block(c) << "# config_hash=" << std::hex << std::setw(16) << std::setfill('0') << config_hash(c)
     << '\n';
  return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : parameter_block(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t replication_seed(const ExperimentConfig& c, std::size_t replication) {
  return derive_seed(c.seed, Stream::replication, replication);
}

Environment make_environment(const ExperimentConfig& c, std::uint64_t rep_seed) {
  Rng rng = make_rng(derive_seed(rep_seed, Stream::model));
  switch (c.preset) {
    case Preset::bipolar:
      return make_bipolar_chain(c.vertices, rng, c.horizon);
    case Preset::parallel:
      return make_parallel_chains(c.chains, c.horizon, c.prior_mean, c.prior_variance, c.noise_variance, rng);
    case Preset::maxpath:
      return make_max_reward_path(c.vertices, c.edge_probability, c.prior_mean, c.prior_variance, c.noise_variance,
                                  c.horizon, rng);
    case Preset::dirichlet_testbed:
      return make_dirichlet_testbed(c.vertices, c.horizon, c.dirichlet_alpha, rng);
  }
  throw ConfigError("unknown preset");
}

SweepResult run_sweep(const ExperimentConfig& config) {
  validate(config);
  SweepResult sweep;
  sweep.config = config;
  for (auto kind : config.strategies)
    for (auto k : config.agent_counts) {
      SweepCell cell{kind, k, {}};
      cell.replications.resize(config.replications);
      sweep.cells.push_back(std::move(cell));
    }
  const std::uint64_t hash = config_hash(config);

  std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, config.replications);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= config.replications) return;
      try {
        const std::uint64_t seed = replication_seed(config, r);
        const Environment env = make_environment(config, seed);
        for (auto& cell : sweep.cells) {
          auto strategy = make_strategy(cell.strategy, config.beta);
          EpisodeOptions options;
          options.seed = seed;
          options.arrival_rate = config.arrival_rate;
          options.config_hash = hash;
          options.keep_log = config.write_observation_logs && r == 0;
          cell.replications[r] = run_episode(env, *strategy, cell.agents, options);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(config.replications);
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return sweep;
}

std::vector<AggregateRow> aggregate(const SweepResult& sweep) {
  std::vector<AggregateRow> rows;
  for (const auto& cell : sweep.cells) rows.push_back({cell.strategy, cell.agents, bayes_regret(cell.replications)});
  return rows;
}

std::vector<CumulativeSeries> emit_cumulative(const SweepResult& sweep) {
  std::vector<CumulativeSeries> out;
  for (const auto& cell : sweep.cells) {
    CumulativeSeries series{cell.strategy, cell.agents, std::vector<double>(cell.agents, 0.0)};
    for (const auto& rep : cell.replications) {
      const auto c = cumulative_regret_by_activation(rep);
      for (std::size_t i = 0; i < c.size(); ++i) series.cumulative[i] += c[i];
    }
    for (auto& x : series.cumulative) x /= static_cast<double>(cell.replications.size());
    out.push_back(std::move(series));
  }
  return out;
}

void write_raw_csv(std::ostream& out, const SweepResult& sweep) {
  out << csv_header(sweep) << "preset,strategy,K,replication,agent_id,activation_time,total_reward,regret,r_star\n";
  const auto preset = to_string(sweep.config.preset);
  for (const auto& cell : sweep.cells)
    for (std::size_t r = 0; r < cell.replications.size(); ++r) {
      const auto& rep = cell.replications[r];
      const std::string r_star = fixed(rep.optimal_reward);
      for (std::size_t k = 0; k < rep.agents.size(); ++k) {
        const auto& a = rep.agents[k];
        out << preset << ',' << to_string(cell.strategy) << ',' << cell.agents << ',' << r << ',' << k << ','
            << fixed(a.activation_time) << ',' << fixed(a.total_reward) << ',' << fixed(a.regret) << ',' << r_star
            << '\n';
      }
    }
}

void write_aggregate_csv(std::ostream& out, const SweepResult& sweep) {
  out << csv_header(sweep) << "strategy,K,replications,mean_regret_per_agent,std_error\n";
  for (const auto& row : aggregate(sweep)) {
    const std::size_t reps = sweep.config.replications;
    out << to_string(row.strategy) << ',' << row.agents << ',' << reps << ',' << fixed(row.regret.mean) << ','
        << fixed(row.regret.std_error) << '\n';
  }
}

void write_cumulative_csv(std::ostream& out, const SweepResult& sweep) {
  out << csv_header(sweep) << "strategy,K,rank,cumulative_regret\n";
  for (const auto& series : emit_cumulative(sweep))
    for (std::size_t i = 0; i < series.cumulative.size(); ++i)
      out << to_string(series.strategy) << ',' << series.agents << ',' << i + 1 << ','
          << fixed(series.cumulative[i]) << '\n';
}

std::vector<std::filesystem::path> write_sweep(const SweepResult& sweep) {
  const auto& c = sweep.config;
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec) throw Error("cannot create " + c.out_dir.string() + ": " + ec.message());
  const std::string stem = std::string(to_string(c.preset));
  std::vector<std::filesystem::path> written;

  auto emit = [&](const std::filesystem::path& path, auto&& writer) {
    auto out = open_output(path);
    writer(out);
    out.flush();
    if (!out) throw Error("failed writing " + path.string());
    written.push_back(path);
  };

  emit(c.out_dir / (stem + "_raw.csv"), [&](std::ostream& o) { write_raw_csv(o, sweep); });
  emit(c.out_dir / (stem + "_aggregate.csv"), [&](std::ostream& o) { write_aggregate_csv(o, sweep); });
  if (c.write_cumulative)
    emit(c.out_dir / (stem + "_cumulative.csv"), [&](std::ostream& o) { write_cumulative_csv(o, sweep); });
  if (c.write_observation_logs)
    for (const auto& cell : sweep.cells) {
      const auto name = stem + "_" + std::string(to_string(cell.strategy)) + "_K" + std::to_string(cell.agents) +
                        "_obs.log";
      emit(c.out_dir / name, [&](std::ostream& o) { write_observation_log(o, cell.replications.front().log); });
    }
  if (c.write_model_dump) {
    const Environment env = make_environment(c, replication_seed(c, 0));
    emit(c.out_dir / (stem + "_model_rep0.txt"), [&](std::ostream& o) { write_model(o, env); });
  }
  return written;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concurrent seed-sampling benchmark"};
  std::string preset;
  std::vector<std::string> strategies;
  std::vector<std::size_t> agents;
  std::optional<std::size_t> replications;
  std::uint64_t seed = 1;
  std::string out_dir = "results";
  std::vector<std::string> overrides;
  std::size_t threads = 0;
  bool cumulative = false;
  bool observation_log = false;
  bool dump_model = false;

  app.add_option("--preset", preset, "bipolar, parallel, maxpath or dirichlet-testbed")->required();
  app.add_option("--strategy", strategies, "strategy name (repeatable)");
  app.add_option("--agents", agents, "agent count K (repeatable)");
  app.add_option("--replications", replications, "replications per (strategy, K)");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--override", overrides, "key=value parameter override (repeatable)");
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
  app.add_flag("--cumulative", cumulative, "also write the cumulative-regret CSV");
  app.add_flag("--observation-log", observation_log, "dump the replication-0 observation logs");
  app.add_flag("--dump-model", dump_model, "dump the replication-0 true model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  ExperimentConfig config;
  try {
    config = preset_config(preset);
    if (!strategies.empty()) {
      config.strategies.clear();
      for (const auto& s : strategies) config.strategies.push_back(parse_strategy(s));
    }
    if (!agents.empty()) config.agent_counts = agents;
    if (replications) config.replications = *replications;
    config.seed = seed;
    config.out_dir = out_dir;
    config.threads = threads;
    config.write_cumulative = cumulative;
    config.write_observation_logs = observation_log;
    config.write_model_dump = dump_model;
    for (const auto& o : overrides) apply_override(config, o);
    resolve(config);
    validate(config);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  out << describe(config) << std::flush;
  try {
    const SweepResult sweep = run_sweep(config);
    for (const auto& path : write_sweep(sweep)) out << "wrote " << path.string() << '\n';
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace seedrl
