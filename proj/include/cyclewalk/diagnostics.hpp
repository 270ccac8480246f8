#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "cyclewalk/walks.hpp"

namespace cyclewalk {

class DiagnosticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Counts over fixed bins. Values outside the edges land in the end bins.
struct Histogram {
  std::vector<double> edges;
  std::vector<double> counts;
  double total = 0.0;

  static Histogram uniform(double lo, double hi, int bins);
  // Unit-width bins centred on the integers lo .. hi.
  static Histogram integer(int lo, int hi);

  int bin_of(double x) const;
  void add(double x, double weight = 1.0);
  std::vector<double> probabilities() const;
};

// records[r][i]: value of district i in record r. Histogram k collects the
// k-th smallest value of every record.
std::vector<Histogram> ranked_marginals(
    const std::vector<std::vector<double>>& records, const Histogram& bins);

double tv_distance(const Histogram& h1, const Histogram& h2);
double max_pairwise_tv(const std::vector<Histogram>& chains);
// per_chain[c][k]: rank-k histogram of chain c. For each chain pair the TV is
// averaged over ranks; the maximum over pairs is returned.
double max_pairwise_ranked_tv(const std::vector<std::vector<Histogram>>& per_chain);

struct GelmanRubin {
  double r_hat = 1.0;
  bool degenerate = false;  // zero within-chain variance but distinct means
};
GelmanRubin gelman_rubin(const std::vector<std::vector<double>>& traces);

// Sample autocorrelation rho_0 .. rho_{n-1}.
std::vector<double> autocorrelation(std::span<const double> trace);
// Steps per effectively independent sample: 1 + 2 * sum of rho_i up to the
// first positive lag with rho_i <= 0.
double ess_steps(std::span<const double> trace);

// Type-7 sample quantile.
double quantile(std::vector<double> values, double q);

struct ProfileBin {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
};
struct ProposalProfile {
  std::vector<ProfileBin> bins;      // non-empty bins only, ascending
  std::map<int, int> moved_histogram;  // over proposals with acceptance > 0
};
ProposalProfile proposal_profiles(std::span<const StepOutcome> outcomes,
                                  double bin_width = 0.05);

}  // namespace cyclewalk
