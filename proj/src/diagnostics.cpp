#include "llmbi/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <json.hpp>

#include "llmbi/numfmt.hpp"

namespace llmbi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_of(std::span<const double> x) {
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

/// Halves every chain, dropping an odd trailing draw.
std::vector<std::vector<double>> split_chains(std::span<const std::vector<double>> chains) {
  if (chains.empty()) throw Error(ErrorCode::InsufficientSamples, "no chains");
  std::size_t n = chains.front().size();
  for (const auto& c : chains) n = std::min(n, c.size());
  if (n < 4) {
    throw Error(ErrorCode::InsufficientSamples,
                "need at least 4 draws per chain, got " + std::to_string(n));
  }
  const std::size_t half = n / 2;
  std::vector<std::vector<double>> out;
  out.reserve(2 * chains.size());
  for (const auto& c : chains) {
    out.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
    out.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(half),
                     c.begin() + static_cast<std::ptrdiff_t>(2 * half));
  }
  return out;
}

bool all_identical(const std::vector<std::vector<double>>& chains) {
  const double first = chains.front().front();
  for (const auto& c : chains) {
    for (double v : c) {
      if (v != first) return false;
    }
  }
  return true;
}

void warn(std::vector<Warning>* warnings, ErrorCode code, std::string message) {
  if (warnings) warnings->push_back({code, std::move(message)});
}

/// Replaces values by normal scores of their average ranks across all chains.
std::vector<std::vector<double>> rank_normalize(const std::vector<std::vector<double>>& chains) {
  std::vector<std::pair<double, std::size_t>> pooled;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (double v : chains[c]) pooled.emplace_back(v, pooled.size());
  }
  const std::size_t total = pooled.size();
  std::vector<double> ranks(total);
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pooled[a].first < pooled[b].first; });
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j + 1 < total && pooled[order[j + 1]].first == pooled[order[i]].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg_rank;
    i = j + 1;
  }
  const boost::math::normal standard;
  const double s = static_cast<double>(total);
  std::vector<std::vector<double>> out(chains.size());
  std::size_t idx = 0;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    out[c].reserve(chains[c].size());
    for (std::size_t d = 0; d < chains[c].size(); ++d, ++idx) {
      out[c].push_back(boost::math::quantile(standard, (ranks[idx] - 0.375) / (s + 0.25)));
    }
  }
  return out;
}

/// Multi-chain ESS on equal-length chains (Stan's estimator).
double ess_from_chains(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  const std::size_t n = chains.front().size();
  std::vector<double> means(m);
  std::vector<double> chain_var(m);
  for (std::size_t c = 0; c < m; ++c) {
    means[c] = mean_of(chains[c]);
    chain_var[c] = variance_of(chains[c]);
  }
  const double mean_var = mean_of(chain_var);
  double var_plus = mean_var * static_cast<double>(n - 1) / static_cast<double>(n);
  if (m > 1) var_plus += variance_of(means);

  // Mean over chains of the biased autocovariance at `lag`.
  auto mean_acov = [&](std::size_t lag) {
    double total = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      const auto& x = chains[c];
      double s = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - means[c]) * (x[i + lag] - means[c]);
      total += s / static_cast<double>(n);
    }
    return total / static_cast<double>(m);
  };

  std::vector<double> rho(n + 2, 0.0);
  rho[0] = 1.0;
  double rho_even = 1.0;
  double rho_odd = 1.0 - (mean_var - mean_acov(1)) / var_plus;
  rho[1] = rho_odd;
  std::size_t t = 1;
  while (t + 5 < n && rho_even + rho_odd > 0.0) {
    rho_even = 1.0 - (mean_var - mean_acov(t + 1)) / var_plus;
    rho_odd = 1.0 - (mean_var - mean_acov(t + 2)) / var_plus;
    if (rho_even + rho_odd >= 0.0) {
      rho[t + 1] = rho_even;
      rho[t + 2] = rho_odd;
    }
    t += 2;
  }
  const std::size_t max_t = t;
  if (rho_even > 0.0) rho[max_t + 1] = rho_even;

  // Initial monotone sequence.
  for (t = 1; t + 2 <= max_t; t += 2) {
    if (rho[t + 1] + rho[t + 2] > rho[t - 1] + rho[t]) {
      rho[t + 1] = 0.5 * (rho[t - 1] + rho[t]);
      rho[t + 2] = rho[t + 1];
    }
  }
  const double total = static_cast<double>(m * n);
  double tau = -1.0 + 2.0 * std::accumulate(rho.begin(), rho.begin() + static_cast<std::ptrdiff_t>(max_t + 1), 0.0) +
               rho[max_t + 1];
  tau = std::max(tau, 1.0 / std::log10(total));
  return total / tau;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::string percent_label(double fraction) {
  const double pct = std::round(fraction * 100.0 * 1e4) / 1e4;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", pct);
  return buf;
}

}  // namespace

double split_rhat(std::span<const std::vector<double>> chains, std::vector<Warning>* warnings) {
  const auto split = split_chains(chains);
  if (all_identical(split)) {
    warn(warnings, ErrorCode::ZeroVariance, "r_hat undefined: all draws are identical");
    return kNaN;
  }
  const double n = static_cast<double>(split.front().size());
  std::vector<double> means;
  std::vector<double> vars;
  for (const auto& c : split) {
    means.push_back(mean_of(c));
    vars.push_back(variance_of(c));
  }
  const double w = mean_of(vars);
  const double b = n * variance_of(means);
  if (!(w > 0.0)) {
    warn(warnings, ErrorCode::ZeroVariance, "r_hat undefined: within-chain variance is zero");
    return kNaN;
  }
  return std::sqrt(((n - 1.0) / n * w + b / n) / w);
}

double ess_bulk(std::span<const std::vector<double>> chains, std::vector<Warning>* warnings) {
  const auto split = split_chains(chains);
  if (all_identical(split)) {
    warn(warnings, ErrorCode::ZeroVariance, "ess_bulk undefined: all draws are identical");
    return kNaN;
  }
  return ess_from_chains(rank_normalize(split));
}

std::pair<double, double> hdi(std::span<const double> samples, double prob) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "hdi probability must lie in (0, 1), got " + format_double(prob));
  }
  if (samples.size() < 2) {
    throw Error(ErrorCode::InsufficientSamples, "hdi needs at least 2 samples");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  auto width = static_cast<std::size_t>(std::ceil(prob * static_cast<double>(n) - 1e-9));
  width = std::clamp<std::size_t>(width, 2, n);
  std::size_t best = 0;
  double best_width = sorted[width - 1] - sorted[0];
  for (std::size_t i = 1; i + width <= n; ++i) {
    const double w = sorted[i + width - 1] - sorted[i];
    if (w < best_width) {
      best_width = w;
      best = i;
    }
  }
  return {sorted[best], sorted[best + width - 1]};
}

double mode_estimate(std::span<const double> samples) {
  if (samples.size() < 10) {
    throw Error(ErrorCode::InsufficientSamples, "mode estimate needs at least 10 samples");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (lo == hi) return lo;

  const double n = static_cast<double>(sorted.size());
  const double sd = std::sqrt(variance_of(sorted));
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = std::max(sd, iqr / 1.34);
  const double floor_bw = 1e-12 * std::max({1.0, std::fabs(lo), std::fabs(hi)});
  const double bw = std::max(0.9 * spread * std::pow(n, -0.2), floor_bw);

  constexpr std::size_t kGrid = 512;
  const double cutoff = 8.0 * bw;
  double best_x = lo;
  double best_density = -1.0;
  for (std::size_t g = 0; g < kGrid; ++g) {
    const double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(kGrid - 1);
    auto first = std::lower_bound(sorted.begin(), sorted.end(), x - cutoff);
    auto last = std::upper_bound(first, sorted.end(), x + cutoff);
    double density = 0.0;
    for (auto it = first; it != last; ++it) {
      const double u = (x - *it) / bw;
      density += std::exp(-0.5 * u * u);
    }
    if (density > best_density) {
      best_density = density;
      best_x = x;
    }
  }
  return best_x;
}

const SummaryRow& SummaryTable::row(std::string_view parameter) const {
  for (const auto& r : rows) {
    if (r.parameter == parameter) return r;
  }
  throw Error(ErrorCode::MalformedTrace, "summary has no parameter '" + std::string(parameter) + "'");
}

SummaryTable summarize(const Trace& trace, double hdi_prob) {
  if (trace.n_chains() == 0 || trace.n_draws() == 0) {
    throw Error(ErrorCode::MalformedTrace, "trace has no draws");
  }
  SummaryTable table;
  table.hdi_prob = hdi_prob;
  for (std::size_t p = 0; p < trace.n_params(); ++p) {
    const std::string& name = trace.param_names[p];
    const auto chains = trace.chains_for(p);
    const auto pooled = trace.pooled(p);
    SummaryRow row;
    row.parameter = name;
    row.mean = mean_of(pooled);
    row.sd = pooled.size() > 1 ? std::sqrt(variance_of(pooled)) : kNaN;

    auto cell = [&](std::string_view column, auto&& compute) {
      try {
        compute();
      } catch (const Error& e) {
        table.warnings.push_back({e.code(), name + "." + std::string(column) + ": " + e.detail()});
      }
    };
    std::vector<Warning> local;
    row.mode = kNaN;
    cell("mode", [&] { row.mode = mode_estimate(pooled); });
    row.hdi_low = row.hdi_high = kNaN;
    cell("hdi", [&] { std::tie(row.hdi_low, row.hdi_high) = hdi(pooled, hdi_prob); });
    row.ess_bulk = kNaN;
    cell("ess_bulk", [&] { row.ess_bulk = ess_bulk(chains, &local); });
    row.r_hat = kNaN;
    cell("r_hat", [&] { row.r_hat = split_rhat(chains, &local); });
    for (auto& w : local) table.warnings.push_back({w.code, name + ": " + w.message});
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::pair<std::string, std::string> hdi_column_names(double hdi_prob) {
  return {"hdi_" + percent_label((1.0 - hdi_prob) / 2.0) + "%",
          "hdi_" + percent_label((1.0 + hdi_prob) / 2.0) + "%"};
}

std::string render_text(const SummaryTable& table) {
  const auto [lo_name, hi_name] = hdi_column_names(table.hdi_prob);
  std::size_t name_width = 9;
  for (const auto& r : table.rows) name_width = std::max(name_width, r.parameter.size());
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-*s %9s %9s %9s %9s %9s %9s %6s\n", static_cast<int>(name_width), "Parameter",
                "mean", "mode", "sd", lo_name.c_str(), hi_name.c_str(), "ess_bulk", "r_hat");
  out += buf;
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%-*s %9.3f %9.3f %9.3f %9.3f %9.3f %9.0f %6.2f\n", static_cast<int>(name_width),
                  r.parameter.c_str(), r.mean, r.mode, r.sd, r.hdi_low, r.hdi_high, r.ess_bulk, r.r_hat);
    out += buf;
  }
  for (const auto& w : table.warnings) out += "warning: " + std::string(to_string(w.code)) + ": " + w.message + "\n";
  return out;
}

std::string render_json(const SummaryTable& table) {
  using json = nlohmann::ordered_json;
  const auto [lo_name, hi_name] = hdi_column_names(table.hdi_prob);
  auto number = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json rows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back(json{{"parameter", r.parameter},
                        {"mean", number(r.mean)},
                        {"mode", number(r.mode)},
                        {"sd", number(r.sd)},
                        {lo_name, number(r.hdi_low)},
                        {hi_name, number(r.hdi_high)},
                        {"ess_bulk", number(r.ess_bulk)},
                        {"r_hat", number(r.r_hat)}});
  }
  json warnings = json::array();
  for (const auto& w : table.warnings) {
    warnings.push_back(json{{"code", std::string(to_string(w.code))}, {"message", w.message}});
  }
  return json{{"hdi_prob", table.hdi_prob}, {"rows", rows}, {"warnings", warnings}}.dump(2) + "\n";
}

std::string render_csv(const SummaryTable& table) {
  const auto [lo_name, hi_name] = hdi_column_names(table.hdi_prob);
  std::string out = "parameter,mean,mode,sd," + lo_name + "," + hi_name + ",ess_bulk,r_hat\n";
  auto cell = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("nan"); };
  for (const auto& r : table.rows) {
    out += r.parameter + "," + cell(r.mean) + "," + cell(r.mode) + "," + cell(r.sd) + "," + cell(r.hdi_low) + "," +
           cell(r.hdi_high) + "," + cell(r.ess_bulk) + "," + cell(r.r_hat) + "\n";
  }
  return out;
}

}  // namespace llmbi
