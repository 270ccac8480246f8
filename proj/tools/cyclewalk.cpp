// Command-line front end: run, enumerate, validate, diagnose, make-grid.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "cyclewalk/chain.hpp"
#include "cyclewalk/diagnostics.hpp"
#include "cyclewalk/enumerator.hpp"
#include "cyclewalk/graph.hpp"

namespace fs = std::filesystem;
using namespace cyclewalk;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by the commands that build a chain or an enumeration.
struct Overrides {
  std::string config;
  std::optional<std::string> graph;
  std::optional<int> districts;
  std::optional<double> gamma;
  std::optional<double> pop_tol;
  std::optional<double> p2tree;
  std::optional<std::int64_t> steps;
  std::optional<int> chains;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> observables;
};

struct Settings {
  std::string graph_path;
  GraphKeys keys;
  ChainConfig chain;
  int chains = 1;
  std::string out = "out";
  std::optional<double> pop_tol;
  std::optional<std::pair<std::int64_t, std::int64_t>> pop_window;
  int max_vertices = 36;
};

template <typename T>
std::optional<T> get(const YAML::Node& node, const char* key) {
  if (!node || !node[key]) return std::nullopt;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw UsageError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PopulationMode parse_mode(const std::string& s) {
  if (s == "hard") return PopulationMode::hard;
  if (s == "soft") return PopulationMode::soft;
  if (s == "mixed") return PopulationMode::mixed;
  throw UsageError("pop_mode must be hard, soft or mixed");
}

Settings resolve(const Overrides& o) {
  Settings s;
  YAML::Node cfg;
  fs::path base = fs::current_path();
  if (!o.config.empty()) {
    try {
      cfg = YAML::LoadFile(o.config);
    } catch (const YAML::Exception& e) {
      throw UsageError("cannot parse config '" + o.config + "': " + e.what());
    }
    base = fs::absolute(o.config).parent_path();
  }
  auto relative = [&base](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? p : (base / path).lexically_normal().string();
  };

  if (auto g = get<std::string>(cfg, "graph")) s.graph_path = relative(*g);
  if (o.graph) s.graph_path = *o.graph;
  if (s.graph_path.empty()) throw UsageError("no graph given (config key 'graph' or --graph)");
  if (const auto keys = cfg["graph_keys"]) {
    if (auto k = get<std::string>(keys, "population")) s.keys.population = *k;
    if (auto k = get<std::string>(keys, "area")) s.keys.area = *k;
    if (auto k = get<std::string>(keys, "exterior_perimeter")) s.keys.exterior_perimeter = *k;
    if (auto k = get<std::string>(keys, "county")) s.keys.county = *k;
    if (auto k = get<std::string>(keys, "shared_perimeter")) s.keys.shared_perimeter = *k;
    if (auto k = get<std::string>(keys, "weight")) s.keys.weight = *k;
  }

  ChainConfig& c = s.chain;
  c.districts = o.districts.value_or(get<int>(cfg, "districts").value_or(0));
  if (c.districts < 1) throw UsageError("district count missing or not positive");
  c.measure.gamma = o.gamma.value_or(get<double>(cfg, "gamma").value_or(0.0));
  c.measure.w_compact = get<double>(cfg, "w_compact").value_or(0.0);
  c.measure.pop_mode = parse_mode(get<std::string>(cfg, "pop_mode").value_or("hard"));
  if (auto gate = get<double>(cfg, "pop_gate")) c.measure.pop_tolerance = *gate;
  c.measure.w_pop = get<double>(cfg, "w_pop").value_or(0.0);
  c.measure.weighted = get<bool>(cfg, "weighted").value_or(false);
  c.p_two_tree = o.p2tree.value_or(get<double>(cfg, "p2tree").value_or(0.1));
  c.steps = o.steps.value_or(get<std::int64_t>(cfg, "steps").value_or(0));
  c.seed = o.seed.value_or(get<std::uint64_t>(cfg, "seed").value_or(0));
  c.cadence = get<std::int64_t>(cfg, "cadence").value_or(1);
  c.audit_every = get<std::int64_t>(cfg, "audit_every").value_or(0);
  c.seed_retries = get<int>(cfg, "seed_retries").value_or(100);
  const auto tree = get<std::string>(cfg, "seed_tree").value_or("ust");
  if (tree != "ust" && tree != "random_mst") throw UsageError("seed_tree must be ust or random_mst");
  c.seed_tree = tree == "ust" ? SeedTree::ust : SeedTree::random_mst;
  try {
    c.observables = parse_observables(
        o.observables.value_or(get<std::string>(cfg, "observables").value_or("cut_edges")));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  s.chains = o.chains.value_or(get<int>(cfg, "chains").value_or(1));
  if (s.chains < 1) throw UsageError("chain count must be positive");
  if (auto out = get<std::string>(cfg, "out")) s.out = relative(*out);
  if (o.out) s.out = *o.out;
  s.max_vertices = get<int>(cfg, "max_vertices").value_or(36);

  s.pop_tol = get<double>(cfg, "pop_tol");
  if (cfg["pop_window"]) {
    const auto w = cfg["pop_window"];
    if (!w.IsSequence() || w.size() != 2) throw UsageError("pop_window must be [min, max]");
    s.pop_window = std::make_pair(w[0].as<std::int64_t>(), w[1].as<std::int64_t>());
  }
  if (o.pop_tol) {
    s.pop_tol = o.pop_tol;
    s.pop_window.reset();
  }
  if (!s.pop_tol && !s.pop_window) throw UsageError("population bounds missing (pop_tol or pop_window)");
  return s;
}

void apply_bounds(Settings& s, const Graph& g) {
  const auto total = g.total_population();
  s.chain.bounds = s.pop_window
                       ? PopBounds::from_window(total, s.chain.districts,
                                                s.pop_window->first, s.pop_window->second)
                       : PopBounds::from_tolerance(total, s.chain.districts, *s.pop_tol);
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "YAML or JSON configuration file");
  cmd->add_option("--graph", o.graph, "graph JSON file");
  cmd->add_option("--districts", o.districts, "number of districts");
  cmd->add_option("--gamma", o.gamma, "tree-count exponent");
  cmd->add_option("--pop-tol", o.pop_tol, "population tolerance fraction");
}

int cmd_run(const Overrides& o) {
  Settings s = resolve(o);
  const std::string text = read_file(s.graph_path);
  const Graph g = load_graph(text, s.keys);
  apply_bounds(s, g);
  fs::create_directories(s.out);

  std::vector<ChainConfig> configs(s.chains, s.chain);
  json manifest;
  manifest["graph"] = s.graph_path;
  std::ostringstream digest;
  digest << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(text);
  manifest["graph_digest"] = digest.str();
  manifest["chains"] = s.chains;
  manifest["out"] = s.out;
  manifest["base_seed"] = s.chain.seed;
  json per_chain = json::array();
  for (int i = 0; i < s.chains; ++i) {
    configs[i].seed = s.chains == 1 ? s.chain.seed : chain_seed(s.chain.seed, i);
    json entry = config_to_json(configs[i]);
    entry["log"] = "chain_" + std::to_string(i) + ".ndjson";
    per_chain.push_back(entry);
  }
  manifest["chain_configs"] = per_chain;
  {
    std::ofstream m(fs::path(s.out) / "manifest.json");
    m << manifest.dump(2) << '\n';
    if (!m) throw UsageError("cannot write the manifest");
  }

  std::vector<std::string> errors(s.chains);
  std::vector<std::thread> workers;
  for (int i = 0; i < s.chains; ++i) {
    workers.emplace_back([&, i] {
      try {
        std::ofstream log(fs::path(s.out) / ("chain_" + std::to_string(i) + ".ndjson"));
        if (!log) throw std::runtime_error("cannot open the log file");
        run_chain(g, configs[i], log);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
  }
  for (auto& w : workers) w.join();
  int status = 0;
  for (int i = 0; i < s.chains; ++i) {
    if (!errors[i].empty()) {
      std::cerr << "chain " << i << ": " << errors[i] << '\n';
      status = 1;
    }
  }
  if (status == 0) {
    std::cout << "wrote " << s.chains << " log(s) to " << s.out << '\n';
  }
  return status;
}

double county_splits(const Graph& g, const std::vector<int>& assignment) {
  std::map<std::string, int> first;
  std::map<std::string, bool> split;
  for (int v = 0; v < g.num_vertices(); ++v) {
    const auto& c = g.county(v);
    if (!c) throw UsageError("graph carries no county tags");
    auto [it, inserted] = first.emplace(*c, assignment[v]);
    if (!inserted && it->second != assignment[v]) split[*c] = true;
  }
  return static_cast<double>(split.size());
}

int cmd_enumerate(const Overrides& o) {
  Settings s = resolve(o);
  const Graph g = load_graph_file(s.graph_path, s.keys);
  apply_bounds(s, g);
  const auto parts = enumerate_partitions(g, s.chain.districts, s.chain.bounds, s.max_vertices);
  const auto table = exact_partition_distribution(g, s.chain.districts, s.chain.bounds, parts,
                                                  s.chain.measure);
  fs::create_directories(s.out);
  {
    std::ofstream csv(fs::path(s.out) / "partitions.csv");
    write_partition_csv(table, csv);
  }
  auto write_pmf = [&](const std::string& name, const std::map<double, double>& pmf) {
    std::ofstream csv(fs::path(s.out) / ("pmf_" + name + ".csv"));
    csv << "value,probability\n" << std::setprecision(17);
    for (const auto& [value, p] : pmf) csv << value << ',' << p << '\n';
  };
  write_pmf("cut_edges", exact_pushforward(table, [&g](const std::vector<int>& a) {
              return static_cast<double>(count_cut_edges(g, a));
            }));
  if (g.has_counties()) {
    write_pmf("county_splits", exact_pushforward(table, [&g](const std::vector<int>& a) {
                return county_splits(g, a);
              }));
  }
  std::cout << table.rows.size() << " partitions written to " << s.out << '\n';
  return 0;
}

std::vector<json> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read log '" + path + "'");
  std::vector<json> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": malformed record");
    }
    if (j.contains("config")) continue;
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<json> after_burn_in(std::vector<json> records, double burn_in) {
  const auto skip = static_cast<size_t>(burn_in * records.size());
  records.erase(records.begin(), records.begin() + std::min(skip, records.size()));
  return records;
}

int cmd_validate(const std::vector<std::string>& logs, const std::string& exact,
                 const std::string& observable, double tolerance, double burn_in) {
  std::map<double, double> exact_pmf;
  {
    std::ifstream in(exact);
    if (!in) throw UsageError("cannot read '" + exact + "'");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw UsageError(exact + ": malformed row");
      exact_pmf[std::stod(line.substr(0, comma))] += std::stod(line.substr(comma + 1));
    }
  }
  std::map<double, double> empirical;
  double count = 0.0;
  for (const auto& path : logs) {
    for (const auto& rec : after_burn_in(read_records(path), burn_in)) {
      if (!rec.contains(observable) || !rec[observable].is_number()) {
        throw UsageError(path + ": records carry no scalar '" + observable + "'");
      }
      empirical[rec[observable].get<double>()] += 1.0;
      count += 1.0;
    }
  }
  if (count == 0.0) throw UsageError("no records to validate");
  std::map<double, std::pair<double, double>> joined;
  for (const auto& [v, p] : exact_pmf) joined[v].second = p;
  for (const auto& [v, c] : empirical) joined[v].first = c / count;
  double tv = 0.0;
  std::cout << std::setw(12) << observable << std::setw(14) << "empirical" << std::setw(14)
            << "exact" << '\n';
  for (const auto& [v, pe] : joined) {
    std::cout << std::setw(12) << v << std::setw(14) << std::fixed << std::setprecision(6)
              << pe.first << std::setw(14) << pe.second << '\n';
    std::cout.unsetf(std::ios::fixed);
    tv += std::abs(pe.first - pe.second);
  }
  tv *= 0.5;
  const bool pass = tv <= tolerance;
  std::cout << "total variation " << tv << (pass ? " <= " : " > ") << tolerance << ": "
            << (pass ? "pass" : "fail") << '\n';
  return pass ? 0 : 2;
}

// Per-record district vectors (scalars become length-1 vectors).
std::vector<std::vector<double>> field_values(const std::vector<json>& records,
                                              const std::string& field,
                                              const std::string& path) {
  std::vector<std::vector<double>> out;
  for (const auto& rec : records) {
    if (!rec.contains(field)) throw UsageError(path + ": records carry no '" + field + "'");
    const auto& v = rec[field];
    if (v.is_number()) {
      out.push_back({v.get<double>()});
    } else if (v.is_array()) {
      out.push_back(v.get<std::vector<double>>());
    } else {
      throw UsageError(path + ": field '" + field + "' is not numeric");
    }
  }
  return out;
}

int cmd_diagnose(const std::vector<std::string>& logs, const std::string& field,
                 int bins, double burn_in, const std::string& out_dir, double bin_width) {
  fs::create_directories(out_dir);
  std::vector<std::vector<std::vector<double>>> values;
  std::vector<std::vector<StepOutcome>> outcomes(logs.size());
  for (size_t c = 0; c < logs.size(); ++c) {
    const auto records = after_burn_in(read_records(logs[c]), burn_in);
    values.push_back(field_values(records, field, logs[c]));
    for (const auto& rec : records) {
      if (!rec.contains("proposal")) continue;
      StepOutcome o;
      o.kind = StepKind::two_tree;
      o.proposed = true;
      o.accepted = rec.value("accepted", false);
      o.acceptance_probability = rec["proposal"].value("acceptance_prob", 0.0);
      o.pop_change = rec["proposal"].value("pop_change", 0.0);
      o.moved = rec["proposal"].value("moved", 0);
      outcomes[c].push_back(o);
    }
  }
  double lo = 0.0;
  double hi = 1.0;
  bool integral = true;
  if (field != "vote_shares") {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (const auto& chain : values) {
      for (const auto& rec : chain) {
        for (double x : rec) {
          lo = std::min(lo, x);
          hi = std::max(hi, x);
          integral = integral && x == std::floor(x);
        }
      }
    }
    if (!std::isfinite(lo)) throw UsageError("no values to diagnose");
  }
  const Histogram shape = field == "vote_shares" || !integral
                              ? Histogram::uniform(lo, hi > lo ? hi : lo + 1.0, bins)
                              : Histogram::integer(static_cast<int>(lo), static_cast<int>(hi));

  std::vector<std::vector<Histogram>> ranked;
  for (const auto& chain : values) ranked.push_back(ranked_marginals(chain, shape));
  {
    std::ofstream csv(fs::path(out_dir) / "ranked_marginals.csv");
    csv << "chain,rank,bin_lo,bin_hi,probability\n" << std::setprecision(12);
    for (size_t c = 0; c < ranked.size(); ++c) {
      for (size_t k = 0; k < ranked[c].size(); ++k) {
        const auto p = ranked[c][k].probabilities();
        for (size_t b = 0; b < p.size(); ++b) {
          csv << c << ',' << k + 1 << ',' << shape.edges[b] << ',' << shape.edges[b + 1] << ','
              << p[b] << '\n';
        }
      }
    }
  }
  {
    std::ofstream csv(fs::path(out_dir) / "pairwise_tv.csv");
    csv << "chain_i,chain_j,average_ranked_tv\n" << std::setprecision(12);
    for (size_t i = 0; i < ranked.size(); ++i) {
      for (size_t j = i + 1; j < ranked.size(); ++j) {
        csv << i << ',' << j << ',' << max_pairwise_ranked_tv({ranked[i], ranked[j]}) << '\n';
      }
    }
    if (ranked.size() >= 2) {
      std::cout << "max pairwise average ranked TV " << max_pairwise_ranked_tv(ranked) << '\n';
    }
  }
  const size_t d = values.empty() || values[0].empty() ? 0 : values[0][0].size();
  if (values.size() >= 2) {
    size_t len = values[0].size();
    for (const auto& chain : values) len = std::min(len, chain.size());
    std::ofstream csv(fs::path(out_dir) / "gelman_rubin.csv");
    csv << "rank,r_hat,degenerate\n" << std::setprecision(12);
    for (size_t k = 0; k < d; ++k) {
      std::vector<std::vector<double>> traces;
      for (const auto& chain : values) {
        std::vector<double> t;
        for (size_t r = 0; r < len; ++r) {
          auto rec = chain[r];
          std::sort(rec.begin(), rec.end());
          t.push_back(rec[k]);
        }
        traces.push_back(std::move(t));
      }
      const auto gr = gelman_rubin(traces);
      csv << k + 1 << ',' << gr.r_hat << ',' << (gr.degenerate ? 1 : 0) << '\n';
    }
  }
  {
    std::ofstream csv(fs::path(out_dir) / "ess.csv");
    csv << "chain,rank,ess_steps\n" << std::setprecision(12);
    for (size_t c = 0; c < values.size(); ++c) {
      if (values[c].size() < 10) continue;
      for (size_t k = 0; k < d; ++k) {
        std::vector<double> t;
        for (auto rec : values[c]) {
          std::sort(rec.begin(), rec.end());
          t.push_back(rec[k]);
        }
        const double ess = ess_steps(t);
        csv << c << ',' << k + 1 << ',' << ess << '\n';
        if (d == 1) std::cout << "chain " << c << " ess_steps " << ess << '\n';
      }
    }
  }
  {
    std::vector<StepOutcome> all;
    for (const auto& o : outcomes) all.insert(all.end(), o.begin(), o.end());
    const auto profile = proposal_profiles(all, bin_width);
    std::ofstream csv(fs::path(out_dir) / "acceptance_profile.csv");
    csv << "pop_change_lo,pop_change_hi,count,q25,median,q75\n" << std::setprecision(12);
    for (const auto& b : profile.bins) {
      csv << b.lo << ',' << b.hi << ',' << b.count << ',' << b.q25 << ',' << b.median << ','
          << b.q75 << '\n';
    }
    std::ofstream moved(fs::path(out_dir) / "moved_histogram.csv");
    moved << "moved,count\n";
    for (const auto& [m, n] : profile.moved_histogram) moved << m << ',' << n << '\n';
  }
  std::cout << "diagnostics written to " << out_dir << '\n';
  return 0;
}

int cmd_make_grid(int rows, int cols, const std::string& kind, bool votes,
                  const std::string& out) {
  if (rows < 2 || cols < 2) throw UsageError("grid needs at least 2 rows and 2 columns");
  if (kind != "square" && kind != "triangular") throw UsageError("kind must be square or triangular");
  Graph g = make_grid(rows, cols, kind == "square" ? LatticeKind::square : LatticeKind::triangular);
  if (votes) {
    std::vector<double> dem(g.num_vertices());
    std::vector<double> rep(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) {
      dem[v] = (v % cols + 0.5) / cols;
      rep[v] = 1.0 - dem[v];
    }
    g.set_column("dem", std::move(dem));
    g.set_column("rep", std::move(rep));
  }
  std::ofstream f(out);
  if (!f) throw UsageError("cannot write '" + out + "'");
  f << graph_to_json(g) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle walk sampler for balanced connected graph partitions"};
  app.require_subcommand(1);

  Overrides run_o;
  auto* run = app.add_subcommand("run", "run one or more chains");
  add_common(run, run_o);
  run->add_option("--p2tree", run_o.p2tree, "probability of a 2-tree step");
  run->add_option("--steps", run_o.steps, "proposals per chain");
  run->add_option("--chains", run_o.chains, "number of independent chains");
  run->add_option("--seed", run_o.seed, "base seed");
  run->add_option("--out", run_o.out, "output directory");
  run->add_option("--observables", run_o.observables, "comma-separated observables");

  Overrides enum_o;
  auto* enumerate = app.add_subcommand("enumerate", "exact partition distribution");
  add_common(enumerate, enum_o);
  enumerate->add_option("--out", enum_o.out, "output directory");

  std::vector<std::string> val_logs;
  std::string val_exact;
  std::string val_observable = "cut_edges";
  double val_tol = 0.01;
  double val_burn = 0.0;
  auto* validate_cmd = app.add_subcommand("validate", "compare a run with the exact pmf");
  validate_cmd->add_option("logs", val_logs, "sample logs")->required();
  validate_cmd->add_option("--exact", val_exact, "pmf CSV from enumerate")->required();
  validate_cmd->add_option("--observable", val_observable, "scalar record field");
  validate_cmd->add_option("--tolerance", val_tol, "maximum total variation");
  validate_cmd->add_option("--burn-in", val_burn, "fraction of records to drop");

  std::vector<std::string> diag_logs;
  std::string diag_field = "vote_shares";
  int diag_bins = 200;
  double diag_burn = 0.0;
  double diag_width = 0.05;
  std::string diag_out = "diagnostics";
  auto* diagnose = app.add_subcommand("diagnose", "convergence diagnostics from logs");
  diagnose->add_option("logs", diag_logs, "sample logs")->required();
  diagnose->add_option("--observables", diag_field, "record field to analyse");
  diagnose->add_option("--bins", diag_bins, "bins for real-valued fields");
  diagnose->add_option("--burn-in", diag_burn, "fraction of records to drop");
  diagnose->add_option("--profile-width", diag_width, "population-change bin width");
  diagnose->add_option("--out", diag_out, "output directory");

  int rows = 4;
  int cols = 4;
  std::string kind = "square";
  bool votes = false;
  std::string grid_out;
  auto* grid = app.add_subcommand("make-grid", "write a lattice graph file");
  grid->add_option("--rows", rows, "rows");
  grid->add_option("--cols", cols, "columns");
  grid->add_option("--kind", kind, "square or triangular");
  grid->add_flag("--votes", votes, "add dem/rep columns with a left-right gradient");
  grid->add_option("--out", grid_out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run) return cmd_run(run_o);
    if (*enumerate) return cmd_enumerate(enum_o);
    if (*validate_cmd) return cmd_validate(val_logs, val_exact, val_observable, val_tol, val_burn);
    if (*diagnose) return cmd_diagnose(diag_logs, diag_field, diag_bins, diag_burn, diag_out, diag_width);
    if (*grid) return cmd_make_grid(rows, cols, kind, votes, grid_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
