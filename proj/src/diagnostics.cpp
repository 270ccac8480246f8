#include "cyclewalk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fftw3.h>

namespace cyclewalk {

Histogram Histogram::uniform(double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) throw DiagnosticsError("invalid histogram range");
  Histogram h;
  h.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * i / bins;
  h.counts.assign(bins, 0.0);
  return h;
}

Histogram Histogram::integer(int lo, int hi) {
  if (hi < lo) throw DiagnosticsError("invalid histogram range");
  Histogram h;
  for (int k = lo; k <= hi + 1; ++k) h.edges.push_back(k - 0.5);
  h.counts.assign(hi - lo + 1, 0.0);
  return h;
}

int Histogram::bin_of(double x) const {
  const int bins = static_cast<int>(counts.size());
  auto it = std::upper_bound(edges.begin(), edges.end(), x);
  const int k = static_cast<int>(it - edges.begin()) - 1;
  return std::clamp(k, 0, bins - 1);
}

void Histogram::add(double x, double weight) {
  counts[bin_of(x)] += weight;
  total += weight;
}

std::vector<double> Histogram::probabilities() const {
  std::vector<double> p(counts.size(), 0.0);
  if (total <= 0.0) return p;
  for (size_t i = 0; i < p.size(); ++i) p[i] = counts[i] / total;
  return p;
}

std::vector<Histogram> ranked_marginals(
    const std::vector<std::vector<double>>& records, const Histogram& bins) {
  if (records.empty()) return {};
  const size_t d = records.front().size();
  Histogram empty = bins;
  std::fill(empty.counts.begin(), empty.counts.end(), 0.0);
  empty.total = 0.0;
  std::vector<Histogram> out(d, empty);
  std::vector<double> sorted;
  for (size_t r = 0; r < records.size(); ++r) {
    if (records[r].size() != d) {
      throw DiagnosticsError("record " + std::to_string(r) + " has " +
                             std::to_string(records[r].size()) + " districts, expected " +
                             std::to_string(d));
    }
    sorted = records[r];
    std::sort(sorted.begin(), sorted.end());
    for (size_t k = 0; k < d; ++k) out[k].add(sorted[k]);
  }
  return out;
}

double tv_distance(const Histogram& h1, const Histogram& h2) {
  if (h1.edges != h2.edges) throw DiagnosticsError("histograms have different bins");
  const auto p1 = h1.probabilities();
  const auto p2 = h2.probabilities();
  double sum = 0.0;
  for (size_t i = 0; i < p1.size(); ++i) sum += std::abs(p1[i] - p2[i]);
  return 0.5 * sum;
}

double max_pairwise_tv(const std::vector<Histogram>& chains) {
  double worst = 0.0;
  for (size_t i = 0; i < chains.size(); ++i) {
    for (size_t j = i + 1; j < chains.size(); ++j) {
      worst = std::max(worst, tv_distance(chains[i], chains[j]));
    }
  }
  return worst;
}

double max_pairwise_ranked_tv(const std::vector<std::vector<Histogram>>& per_chain) {
  double worst = 0.0;
  for (size_t i = 0; i < per_chain.size(); ++i) {
    for (size_t j = i + 1; j < per_chain.size(); ++j) {
      if (per_chain[i].size() != per_chain[j].size()) {
        throw DiagnosticsError("chains have different district counts");
      }
      double sum = 0.0;
      for (size_t k = 0; k < per_chain[i].size(); ++k) {
        sum += tv_distance(per_chain[i][k], per_chain[j][k]);
      }
      if (!per_chain[i].empty()) worst = std::max(worst, sum / per_chain[i].size());
    }
  }
  return worst;
}

GelmanRubin gelman_rubin(const std::vector<std::vector<double>>& traces) {
  if (traces.size() < 2) throw DiagnosticsError("Gelman-Rubin needs at least two chains");
  const size_t n = traces.front().size();
  if (n < 2) throw DiagnosticsError("Gelman-Rubin needs traces of length >= 2");
  for (const auto& t : traces) {
    if (t.size() != n) throw DiagnosticsError("traces have different lengths");
  }
  const double m = static_cast<double>(traces.size());
  const double len = static_cast<double>(n);
  std::vector<double> means;
  double within = 0.0;
  for (const auto& t : traces) {
    const double mean = std::accumulate(t.begin(), t.end(), 0.0) / len;
    double ss = 0.0;
    for (double x : t) ss += (x - mean) * (x - mean);
    within += ss / (len - 1.0);
    means.push_back(mean);
  }
  within /= m;
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
  double between = 0.0;
  for (double mu : means) between += (mu - grand) * (mu - grand);
  between *= len / (m - 1.0);

  GelmanRubin out;
  if (within == 0.0) {
    if (between == 0.0) return out;
    out.r_hat = 1e12;
    out.degenerate = true;
    return out;
  }
  const double var_hat = (len - 1.0) / len * within + between / len;
  out.r_hat = std::sqrt(var_hat / within);
  return out;
}

std::vector<double> autocorrelation(std::span<const double> trace) {
  const size_t n = trace.size();
  if (n == 0) return {};
  const double mean = std::accumulate(trace.begin(), trace.end(), 0.0) / n;
  size_t size = 1;
  while (size < 2 * n) size <<= 1;
  const size_t spectrum = size / 2 + 1;

  double* in = fftw_alloc_real(size);
  fftw_complex* freq = fftw_alloc_complex(spectrum);
  const fftw_plan forward = fftw_plan_dft_r2c_1d(static_cast<int>(size), in, freq, FFTW_ESTIMATE);
  const fftw_plan backward = fftw_plan_dft_c2r_1d(static_cast<int>(size), freq, in, FFTW_ESTIMATE);
  for (size_t i = 0; i < size; ++i) in[i] = i < n ? trace[i] - mean : 0.0;
  fftw_execute(forward);
  for (size_t i = 0; i < spectrum; ++i) {
    freq[i][0] = freq[i][0] * freq[i][0] + freq[i][1] * freq[i][1];
    freq[i][1] = 0.0;
  }
  fftw_execute(backward);
  std::vector<double> rho(n, 0.0);
  const double c0 = in[0];
  if (c0 > 0.0) {
    for (size_t k = 0; k < n; ++k) rho[k] = in[k] / c0;
  } else {
    rho[0] = 1.0;
  }
  fftw_destroy_plan(forward);
  fftw_destroy_plan(backward);
  fftw_free(in);
  fftw_free(freq);
  return rho;
}

double ess_steps(std::span<const double> trace) {
  if (trace.size() < 10) throw DiagnosticsError("ess_steps needs at least 10 values");
  const auto [lo, hi] = std::minmax_element(trace.begin(), trace.end());
  if (*lo == *hi) return 1.0;
  const auto rho = autocorrelation(trace);
  double sum = 0.0;
  for (size_t i = 1; i < rho.size() && rho[i] > 0.0; ++i) sum += rho[i];
  return 1.0 + 2.0 * sum;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DiagnosticsError("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * q;
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

ProposalProfile proposal_profiles(std::span<const StepOutcome> outcomes,
                                  double bin_width) {
  if (!(bin_width > 0.0)) throw DiagnosticsError("bin width must be positive");
  std::map<long long, std::vector<double>> by_bin;
  ProposalProfile out;
  for (const auto& o : outcomes) {
    if (!o.proposed) continue;
    const auto bin = static_cast<long long>(std::floor(o.pop_change / bin_width));
    by_bin[bin].push_back(o.acceptance_probability);
    if (o.acceptance_probability > 0.0) ++out.moved_histogram[o.moved];
  }
  for (auto& [bin, acc] : by_bin) {
    ProfileBin b;
    b.lo = bin * bin_width;
    b.hi = (bin + 1) * bin_width;
    b.count = static_cast<int>(acc.size());
    b.q25 = quantile(acc, 0.25);
    b.median = quantile(acc, 0.5);
    b.q75 = quantile(acc, 0.75);
    out.bins.push_back(b);
  }
  return out;
}

}  // namespace cyclewalk
