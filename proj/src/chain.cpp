#include "cyclewalk/chain.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cyclewalk {

ObservableSet parse_observables(const std::string& list) {
  ObservableSet obs;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    if (item == "populations") {
      obs.populations = true;
    } else if (item == "cut_edges") {
      obs.cut_edges = true;
    } else if (item == "isoperimetric") {
      obs.isoperimetric = true;
    } else if (item == "county_splits") {
      obs.county_splits = true;
    } else if (item == "score_breakdown") {
      obs.score_breakdown = true;
    } else if (item == "assignment") {
      obs.assignment = true;
    } else if (item.starts_with("vote_shares:")) {
      const auto rest = item.substr(12);
      const auto colon = rest.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size()) {
        throw std::invalid_argument("vote_shares needs two columns: vote_shares:DEM:REP");
      }
      obs.vote_shares = std::make_pair(rest.substr(0, colon), rest.substr(colon + 1));
    } else {
      throw std::invalid_argument("unknown observable '" + item + "'");
    }
  }
  return obs;
}

std::string format_observables(const ObservableSet& obs) {
  std::vector<std::string> items;
  if (obs.populations) items.push_back("populations");
  if (obs.cut_edges) items.push_back("cut_edges");
  if (obs.isoperimetric) items.push_back("isoperimetric");
  if (obs.county_splits) items.push_back("county_splits");
  if (obs.score_breakdown) items.push_back("score_breakdown");
  if (obs.assignment) items.push_back("assignment");
  if (obs.vote_shares) {
    items.push_back("vote_shares:" + obs.vote_shares->first + ":" + obs.vote_shares->second);
  }
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

namespace {

const char* mode_name(PopulationMode m) {
  switch (m) {
    case PopulationMode::hard: return "hard";
    case PopulationMode::soft: return "soft";
    case PopulationMode::mixed: return "mixed";
  }
  return "hard";
}

}  // namespace

nlohmann::json config_to_json(const ChainConfig& cfg) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["steps"] = cfg.steps;
  j["p_two_tree"] = cfg.p_two_tree;
  j["districts"] = cfg.districts;
  j["gamma"] = cfg.measure.gamma;
  j["w_compact"] = cfg.measure.w_compact;
  j["pop_mode"] = mode_name(cfg.measure.pop_mode);
  if (std::isfinite(cfg.measure.pop_tolerance)) j["pop_gate"] = cfg.measure.pop_tolerance;
  j["w_pop"] = cfg.measure.w_pop;
  j["weighted"] = cfg.measure.weighted;
  j["pop_ideal"] = cfg.bounds.ideal;
  j["pop_min"] = cfg.bounds.min;
  j["pop_max"] = cfg.bounds.max;
  j["observables"] = format_observables(cfg.observables);
  j["cadence"] = cfg.cadence;
  j["audit_every"] = cfg.audit_every;
  j["seed_retries"] = cfg.seed_retries;
  j["seed_tree"] = cfg.seed_tree == SeedTree::ust ? "ust" : "random_mst";
  return j;
}

ForestState Chain::initial_state(const Graph& g, const ChainConfig& cfg, Rng& rng) {
  if (cfg.initial_assignment) {
    return ForestState::from_assignment(g, *cfg.initial_assignment, cfg.districts,
                                        cfg.bounds, rng);
  }
  return seed_random_state(g, cfg.districts, cfg.bounds, rng, cfg.seed_retries,
                           cfg.seed_tree);
}

Chain::Chain(const Graph& g, const ChainConfig& cfg)
    : cfg_(cfg), rng_(cfg.seed), state_(initial_state(g, cfg_, rng_)) {
  if (!(cfg.p_two_tree > 0.0 && cfg.p_two_tree <= 1.0)) {
    throw std::invalid_argument("p_two_tree must lie in (0, 1]");
  }
}

StepOutcome Chain::step() {
  StepOutcome out;
  if (uniform01(rng_) < cfg_.p_two_tree) {
    out = step_2tree(state_, cfg_.measure, rng_);
    ++two_tree_steps_;
    if (out.accepted) ++two_tree_accepted_;
  } else {
    out = step_1tree(state_, cfg_.measure, rng_);
  }
  ++steps_;
  if (cfg_.audit_every > 0 && steps_ % cfg_.audit_every == 0) {
    const auto problems = state_.audit();
    if (!problems.empty()) {
      throw std::logic_error("state audit failed at step " + std::to_string(steps_) +
                             ": " + problems.front());
    }
  }
  return out;
}

nlohmann::json extract_observables(ForestState& state, const ObservableSet& obs,
                                   const MeasureSpec& spec) {
  const Graph& g = state.graph();
  const int d = state.districts();
  nlohmann::json j = nlohmann::json::object();
  if (obs.populations) j["populations"] = state.populations();
  if (obs.cut_edges) j["cut_edges"] = state.cut_edge_count();
  if (obs.isoperimetric) {
    std::vector<double> iso(d);
    for (int i = 0; i < d; ++i) iso[i] = state.perimeter(i) * state.perimeter(i) / state.area(i);
    j["isoperimetric"] = iso;
  }
  if (obs.vote_shares) {
    const auto* dem = g.column(obs.vote_shares->first);
    const auto* rep = g.column(obs.vote_shares->second);
    if (!dem) throw std::invalid_argument("graph has no column '" + obs.vote_shares->first + "'");
    if (!rep) throw std::invalid_argument("graph has no column '" + obs.vote_shares->second + "'");
    std::vector<double> sd(d, 0.0);
    std::vector<double> sr(d, 0.0);
    for (int v = 0; v < g.num_vertices(); ++v) {
      sd[state.district_of(v)] += (*dem)[v];
      sr[state.district_of(v)] += (*rep)[v];
    }
    std::vector<double> share(d);
    for (int i = 0; i < d; ++i) share[i] = sd[i] / (sd[i] + sr[i]);
    j["vote_shares"] = share;
  }
  if (obs.county_splits) j["county_splits"] = state.county_split_count();
  if (obs.score_breakdown) {
    const auto s = score(state, spec, true);
    j["score_breakdown"] = {{"j_pop", s.j_population},
                            {"j_compact", s.j_compact},
                            {"log_trees", s.log_trees},
                            {"j_total", s.j_total}};
  }
  if (obs.assignment) j["assignment"] = state.exported_assignment();
  return j;
}

void run_chain(const Graph& g, const ChainConfig& cfg, std::ostream& log) {
  Chain chain(g, cfg);
  log << nlohmann::json{{"config", config_to_json(cfg)}}.dump() << '\n';
  auto initial = extract_observables(chain.state(), cfg.observables, cfg.measure);
  initial["step"] = 0;
  initial["kind"] = "initial";
  log << initial.dump() << '\n';
  const std::int64_t cadence = std::max<std::int64_t>(cfg.cadence, 1);
  for (std::int64_t s = 1; s <= cfg.steps; ++s) {
    const StepOutcome out = chain.step();
    if (s % cadence != 0) continue;
    auto rec = extract_observables(chain.state(), cfg.observables, cfg.measure);
    rec["step"] = s;
    rec["kind"] = out.kind == StepKind::two_tree ? "two_tree" : "one_tree";
    rec["accepted"] = out.accepted;
    if (out.proposed) {
      rec["proposal"] = {{"acceptance_prob", out.acceptance_probability},
                         {"pop_change", out.pop_change},
                         {"moved", out.moved}};
    }
    log << rec.dump() << '\n';
  }
  if (!log) throw std::runtime_error("failed writing the sample log");
}

}  // namespace cyclewalk
