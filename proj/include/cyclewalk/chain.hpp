#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyclewalk/energy.hpp"
#include "cyclewalk/partition_state.hpp"
#include "cyclewalk/random.hpp"
#include "cyclewalk/walks.hpp"

namespace cyclewalk {

struct ObservableSet {
  bool populations = false;
  bool cut_edges = false;
  bool isoperimetric = false;
  bool county_splits = false;
  bool score_breakdown = false;
  bool assignment = false;
  // Vote columns (dem, rep) for per-district vote shares.
  std::optional<std::pair<std::string, std::string>> vote_shares;
};

// Comma-separated names; vote shares are written "vote_shares:DEM:REP".
ObservableSet parse_observables(const std::string& list);
std::string format_observables(const ObservableSet& obs);

struct ChainConfig {
  std::uint64_t seed = 0;
  std::int64_t steps = 0;
  double p_two_tree = 0.1;
  int districts = 2;
  MeasureSpec measure;
  PopBounds bounds;
  ObservableSet observables;
  std::int64_t cadence = 1;
  std::int64_t audit_every = 0;  // 0 disables periodic audits
  int seed_retries = 100;
  SeedTree seed_tree = SeedTree::ust;
  // 0-based plan to start from instead of a seeded one.
  std::optional<std::vector<int>> initial_assignment;
};

nlohmann::json config_to_json(const ChainConfig& cfg);

class Chain {
 public:
  Chain(const Graph& g, const ChainConfig& cfg);

  StepOutcome step();

  ForestState& state() { return state_; }
  const ChainConfig& config() const { return cfg_; }
  Rng& rng() { return rng_; }
  std::int64_t steps_taken() const { return steps_; }
  std::int64_t two_tree_steps() const { return two_tree_steps_; }
  std::int64_t two_tree_accepted() const { return two_tree_accepted_; }

 private:
  static ForestState initial_state(const Graph& g, const ChainConfig& cfg,
                                   Rng& rng);

  ChainConfig cfg_;
  Rng rng_;
  ForestState state_;
  std::int64_t steps_ = 0;
  std::int64_t two_tree_steps_ = 0;
  std::int64_t two_tree_accepted_ = 0;
};

nlohmann::json extract_observables(ForestState& state, const ObservableSet& obs,
                                   const MeasureSpec& spec);

// Runs the chain and writes newline-delimited JSON: the resolved config,
// the initial record (step 0), then one record every `cadence` steps.
void run_chain(const Graph& g, const ChainConfig& cfg, std::ostream& log);

}  // namespace cyclewalk
