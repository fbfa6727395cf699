#include "llmbi/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "llmbi/error.hpp"
#include "llmbi/numfmt.hpp"
#include "llmbi/rng.hpp"

namespace llmbi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxDeltaH = 1000.0;
constexpr int kInitAttempts = 100;
const double kInitJitterSd = std::sqrt(0.1);

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void add_to(Vec& acc, const Vec& v) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
}

Vec sum(const Vec& a, const Vec& b) {
  Vec out(a);
  add_to(out, b);
  return out;
}

double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

std::string describe(const Vec& z) {
  std::string out = "[";
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i) out += ", ";
    out += format_double(z[i]);
  }
  return out + "]";
}

/// Stan-style adaptation window schedule: an initial fast buffer, slow
/// windows doubling in size, and a terminal fast buffer.
class WindowSchedule {
 public:
  WindowSchedule(std::size_t num_warmup, std::size_t init_buffer = 75, std::size_t term_buffer = 50,
                 std::size_t base_window = 25)
      : num_warmup_(static_cast<long>(num_warmup)) {
    if (num_warmup < 20) {
      enabled_ = false;
      return;
    }
    long init = static_cast<long>(init_buffer);
    long term = static_cast<long>(term_buffer);
    long base = static_cast<long>(base_window);
    if (init + base + term > num_warmup_) {
      init = static_cast<long>(0.15 * static_cast<double>(num_warmup_));
      term = static_cast<long>(0.1 * static_cast<double>(num_warmup_));
      base = num_warmup_ - (init + term);
    }
    init_buffer_ = init;
    term_buffer_ = term;
    base_window_ = base;
    window_size_ = base_window_;
    next_window_ = init_buffer_ + window_size_ - 1;
  }

  bool enabled() const { return enabled_; }

  bool in_window() const {
    return enabled_ && counter_ >= init_buffer_ && counter_ < num_warmup_ - term_buffer_ &&
           counter_ != num_warmup_;
  }

  bool end_of_window() const { return enabled_ && counter_ == next_window_ && counter_ != num_warmup_; }

  void compute_next_window() {
    const long last = num_warmup_ - term_buffer_ - 1;
    if (next_window_ == last) return;
    window_size_ *= 2;
    next_window_ = counter_ + window_size_;
    if (next_window_ != last) {
      const long next_boundary = next_window_ + 2 * window_size_;
      if (next_boundary >= num_warmup_ - term_buffer_) next_window_ = last;
    }
  }

  void advance() { ++counter_; }

 private:
  bool enabled_ = true;
  long num_warmup_;
  long init_buffer_ = 0;
  long term_buffer_ = 0;
  long base_window_ = 0;
  long counter_ = 0;
  long window_size_ = 0;
  long next_window_ = 0;
};

class Welford {
 public:
  explicit Welford(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

  void add(const Vec& x) {
    ++n_;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double delta = x[i] - mean_[i];
      mean_[i] += delta / static_cast<double>(n_);
      m2_[i] += delta * (x[i] - mean_[i]);
    }
  }

  /// Sample variance shrunk toward 1e-3, as in Stan's diagonal adaptation.
  Vec regularized_variance() const {
    const double n = static_cast<double>(n_);
    Vec var(m2_.size());
    for (std::size_t i = 0; i < var.size(); ++i) {
      const double v = n > 1 ? m2_[i] / (n - 1.0) : 1.0;
      var[i] = (n / (n + 5.0)) * v + 1e-3 * (5.0 / (n + 5.0));
    }
    return var;
  }

  void restart() {
    n_ = 0;
    std::fill(mean_.begin(), mean_.end(), 0.0);
    std::fill(m2_.begin(), m2_.end(), 0.0);
  }

 private:
  std::size_t n_ = 0;
  Vec mean_;
  Vec m2_;
};

/// Dual averaging of log step size toward a target acceptance statistic.
class DualAveraging {
 public:
  explicit DualAveraging(double delta) : delta_(delta) {}

  void restart(double step_size) {
    mu_ = std::log(10.0 * step_size);
    counter_ = 0;
    s_bar_ = 0.0;
    x_bar_ = 0.0;
  }

  double learn(double accept_stat) {
    ++counter_;
    accept_stat = std::min(1.0, accept_stat);
    const double t = static_cast<double>(counter_);
    const double eta = 1.0 / (t + kT0);
    s_bar_ = (1.0 - eta) * s_bar_ + eta * (delta_ - accept_stat);
    const double x = mu_ - s_bar_ * std::sqrt(t) / kGamma;
    const double x_eta = std::pow(t, -kKappa);
    x_bar_ = (1.0 - x_eta) * x_bar_ + x_eta * x;
    return std::exp(x);
  }

  double final_step_size() const { return std::exp(x_bar_); }

 private:
  static constexpr double kGamma = 0.1;
  static constexpr double kT0 = 10.0;
  static constexpr double kKappa = 0.75;

  double delta_;
  double mu_ = 0.0;
  std::size_t counter_ = 0;
  double s_bar_ = 0.0;
  double x_bar_ = 0.0;
};

struct PhasePoint {
  Vec q;
  Vec p;
  Vec grad;  // gradient of log density at q
  double log_density = 0.0;
};

class NutsChain {
 public:
  NutsChain(const DifferentiableDensity& target, const SamplerConfig& cfg, std::size_t chain)
      : target_(target),
        cfg_(cfg),
        rng_(cfg.seed + chain),
        dim_(target.dimension()),
        inv_metric_(dim_, 1.0),
        step_size_(cfg.step_size_init) {}

  void run(Vec& draws, std::vector<DrawStats>& stats) {
    initialize();
    init_step_size();

    WindowSchedule windows(cfg_.warmup_draws);
    Welford estimator(dim_);
    DualAveraging averaging(cfg_.target_accept);
    averaging.restart(step_size_);

    for (std::size_t i = 0; i < cfg_.warmup_draws; ++i) {
      const DrawStats s = transition();
      step_size_ = averaging.learn(s.accept_prob);
      if (windows.in_window()) estimator.add(z_.q);
      if (windows.end_of_window()) {
        windows.compute_next_window();
        inv_metric_ = estimator.regularized_variance();
        estimator.restart();
        init_step_size();
        averaging.restart(step_size_);
      }
      windows.advance();
    }
    if (cfg_.warmup_draws > 0) step_size_ = averaging.final_step_size();

    draws.clear();
    draws.reserve(cfg_.kept_draws * dim_);
    stats.clear();
    stats.reserve(cfg_.kept_draws);
    for (std::size_t i = 0; i < cfg_.kept_draws; ++i) {
      stats.push_back(transition());
      const Vec x = target_.constrain(z_.q);
      draws.insert(draws.end(), x.begin(), x.end());
    }
  }

 private:
  void update_gradient(PhasePoint& z) const {
    z.log_density = target_.log_density_gradient(z.q, z.grad);
    if (std::isnan(z.log_density)) z.log_density = -kInf;
    if (std::isfinite(z.log_density)) {
      for (double g : z.grad) {
        if (!std::isfinite(g)) {
          throw Error(ErrorCode::NonFiniteGradient, "non-finite gradient at z=" + describe(z.q));
        }
      }
    }
  }

  void initialize() {
    z_.q.assign(dim_, 0.0);
    z_.p.assign(dim_, 0.0);
    z_.grad.assign(dim_, 0.0);
    for (int attempt = 0; attempt < kInitAttempts; ++attempt) {
      for (double& q : z_.q) q = kInitJitterSd * rng_.normal();
      try {
        update_gradient(z_);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonFiniteGradient || attempt + 1 == kInitAttempts) throw;
        continue;
      }
      if (std::isfinite(z_.log_density)) return;
    }
    throw Error(ErrorCode::NonFiniteGradient,
                "no initial point with finite log density found; last z=" + describe(z_.q));
  }

  void sample_momentum(PhasePoint& z) {
    for (std::size_t i = 0; i < dim_; ++i) z.p[i] = rng_.normal() / std::sqrt(inv_metric_[i]);
  }

  Vec velocity(const Vec& p) const {
    Vec v(dim_);
    for (std::size_t i = 0; i < dim_; ++i) v[i] = inv_metric_[i] * p[i];
    return v;
  }

  double hamiltonian(const PhasePoint& z) const {
    if (!std::isfinite(z.log_density)) return kInf;
    double kinetic = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) kinetic += inv_metric_[i] * z.p[i] * z.p[i];
    const double h = -z.log_density + 0.5 * kinetic;
    return std::isnan(h) ? kInf : h;
  }

  void leapfrog(PhasePoint& z, double eps) const {
    for (std::size_t i = 0; i < dim_; ++i) z.p[i] += 0.5 * eps * z.grad[i];
    for (std::size_t i = 0; i < dim_; ++i) z.q[i] += eps * inv_metric_[i] * z.p[i];
    update_gradient(z);
    for (std::size_t i = 0; i < dim_; ++i) z.p[i] += 0.5 * eps * z.grad[i];
  }

  void init_step_size() {
    const PhasePoint start = z_;
    const double threshold = std::log(0.8);
    auto trial = [&]() {
      z_ = start;
      sample_momentum(z_);
      const double h0 = hamiltonian(z_);
      leapfrog(z_, step_size_);
      return h0 - hamiltonian(z_);
    };
    const int direction = trial() > threshold ? 1 : -1;
    for (int iter = 0; iter < 200; ++iter) {
      const double delta_h = trial();
      if (direction == 1 && !(delta_h > threshold)) break;
      if (direction == -1 && !(delta_h < threshold)) break;
      step_size_ = direction == 1 ? 2.0 * step_size_ : 0.5 * step_size_;
      if (step_size_ > 1e7 || step_size_ < 1e-12) break;
    }
    step_size_ = std::clamp(step_size_, 1e-12, 1e7);
    z_ = start;
  }

  static bool no_u_turn(const Vec& p_sharp_minus, const Vec& p_sharp_plus, const Vec& rho) {
    return dot(p_sharp_plus, rho) > 0 && dot(p_sharp_minus, rho) > 0;
  }

  bool build_tree(std::size_t depth, PhasePoint& z_propose, Vec& p_sharp_beg, Vec& p_sharp_end, Vec& rho,
                  Vec& p_beg, Vec& p_end, double h0, double sign, int& n_leapfrog, double& log_sum_weight,
                  double& sum_metro_prob) {
    if (depth == 0) {
      leapfrog(z_, sign * step_size_);
      ++n_leapfrog;
      const double h = hamiltonian(z_);
      if (h - h0 > kMaxDeltaH) divergent_ = true;
      log_sum_weight = log_sum_exp(log_sum_weight, h0 - h);
      sum_metro_prob += h0 - h > 0 ? 1.0 : std::exp(h0 - h);
      z_propose = z_;
      p_sharp_beg = velocity(z_.p);
      p_sharp_end = p_sharp_beg;
      add_to(rho, z_.p);
      p_beg = z_.p;
      p_end = p_beg;
      return !divergent_;
    }

    double log_sum_weight_init = -kInf;
    Vec p_init_end(dim_);
    Vec p_sharp_init_end(dim_);
    Vec rho_init(dim_, 0.0);
    if (!build_tree(depth - 1, z_propose, p_sharp_beg, p_sharp_init_end, rho_init, p_beg, p_init_end, h0, sign,
                    n_leapfrog, log_sum_weight_init, sum_metro_prob)) {
      return false;
    }

    PhasePoint z_propose_final = z_;
    double log_sum_weight_final = -kInf;
    Vec p_final_beg(dim_);
    Vec p_sharp_final_beg(dim_);
    Vec rho_final(dim_, 0.0);
    if (!build_tree(depth - 1, z_propose_final, p_sharp_final_beg, p_sharp_end, rho_final, p_final_beg, p_end, h0,
                    sign, n_leapfrog, log_sum_weight_final, sum_metro_prob)) {
      return false;
    }

    const double log_sum_weight_subtree = log_sum_exp(log_sum_weight_init, log_sum_weight_final);
    log_sum_weight = log_sum_exp(log_sum_weight, log_sum_weight_subtree);
    if (log_sum_weight_final > log_sum_weight_subtree) {
      z_propose = z_propose_final;
    } else if (rng_.uniform() < std::exp(log_sum_weight_final - log_sum_weight_subtree)) {
      z_propose = z_propose_final;
    }

    const Vec rho_subtree = sum(rho_init, rho_final);
    add_to(rho, rho_subtree);
    bool persist = no_u_turn(p_sharp_beg, p_sharp_end, rho_subtree);
    persist = persist && no_u_turn(p_sharp_beg, p_sharp_final_beg, sum(rho_init, p_final_beg));
    persist = persist && no_u_turn(p_sharp_init_end, p_sharp_end, sum(rho_final, p_init_end));
    return persist;
  }

  DrawStats transition() {
    sample_momentum(z_);
    PhasePoint z_fwd = z_;
    PhasePoint z_bck = z_;
    PhasePoint z_sample = z_;
    PhasePoint z_propose = z_;

    Vec p_fwd_fwd = z_.p;
    Vec p_sharp_fwd_fwd = velocity(z_.p);
    Vec p_fwd_bck = z_.p;
    Vec p_sharp_fwd_bck = p_sharp_fwd_fwd;
    Vec p_bck_fwd = z_.p;
    Vec p_sharp_bck_fwd = p_sharp_fwd_fwd;
    Vec p_bck_bck = z_.p;
    Vec p_sharp_bck_bck = p_sharp_fwd_fwd;
    Vec rho = z_.p;

    double log_sum_weight = 0.0;
    const double h0 = hamiltonian(z_);
    int n_leapfrog = 0;
    double sum_metro_prob = 0.0;
    std::size_t depth = 0;
    divergent_ = false;

    while (depth < cfg_.max_tree_depth) {
      Vec rho_fwd(dim_, 0.0);
      Vec rho_bck(dim_, 0.0);
      bool valid = false;
      double log_sum_weight_subtree = -kInf;
      if (rng_.uniform() > 0.5) {
        z_ = z_fwd;
        rho_bck = rho;
        p_bck_fwd = p_fwd_fwd;
        p_sharp_bck_fwd = p_sharp_fwd_fwd;
        valid = build_tree(depth, z_propose, p_sharp_fwd_bck, p_sharp_fwd_fwd, rho_fwd, p_fwd_bck, p_fwd_fwd, h0,
                           1.0, n_leapfrog, log_sum_weight_subtree, sum_metro_prob);
        z_fwd = z_;
      } else {
        z_ = z_bck;
        rho_fwd = rho;
        p_fwd_bck = p_bck_bck;
        p_sharp_fwd_bck = p_sharp_bck_bck;
        valid = build_tree(depth, z_propose, p_sharp_bck_fwd, p_sharp_bck_bck, rho_bck, p_bck_fwd, p_bck_bck, h0,
                           -1.0, n_leapfrog, log_sum_weight_subtree, sum_metro_prob);
        z_bck = z_;
      }
      if (!valid) break;
      ++depth;

      if (log_sum_weight_subtree > log_sum_weight) {
        z_sample = z_propose;
      } else if (rng_.uniform() < std::exp(log_sum_weight_subtree - log_sum_weight)) {
        z_sample = z_propose;
      }
      log_sum_weight = log_sum_exp(log_sum_weight, log_sum_weight_subtree);

      rho = sum(rho_bck, rho_fwd);
      bool persist = no_u_turn(p_sharp_bck_bck, p_sharp_fwd_fwd, rho);
      persist = persist && no_u_turn(p_sharp_bck_bck, p_sharp_fwd_bck, sum(rho_bck, p_fwd_bck));
      persist = persist && no_u_turn(p_sharp_bck_fwd, p_sharp_fwd_fwd, sum(rho_fwd, p_bck_fwd));
      if (!persist) break;
    }

    DrawStats stats;
    stats.accept_prob = n_leapfrog > 0 ? sum_metro_prob / n_leapfrog : 0.0;
    stats.tree_depth = static_cast<int>(depth);
    stats.n_leapfrog = n_leapfrog;
    stats.divergent = divergent_;
    stats.step_size = step_size_;
    z_ = z_sample;
    stats.energy = hamiltonian(z_);
    return stats;
  }

  const DifferentiableDensity& target_;
  const SamplerConfig& cfg_;
  Rng rng_;
  std::size_t dim_;
  Vec inv_metric_;
  double step_size_;
  PhasePoint z_;
  bool divergent_ = false;
};

class RwmChain {
 public:
  RwmChain(const DifferentiableDensity& target, const SamplerConfig& cfg, std::size_t chain)
      : target_(target), cfg_(cfg), rng_(cfg.seed + chain), dim_(target.dimension()), scale_(dim_, 1.0) {
    log_lambda_ = std::log(2.38 / std::sqrt(static_cast<double>(dim_)));
  }

  void run(Vec& draws, std::vector<DrawStats>& stats) {
    initialize();
    WindowSchedule windows(cfg_.warmup_draws);
    Welford estimator(dim_);
    std::size_t rm_counter = 0;
    for (std::size_t i = 0; i < cfg_.warmup_draws; ++i) {
      const DrawStats s = step();
      ++rm_counter;
      log_lambda_ += (s.accept_prob - kTargetAccept) / std::pow(static_cast<double>(rm_counter), 0.6);
      if (windows.in_window()) estimator.add(q_);
      if (windows.end_of_window()) {
        windows.compute_next_window();
        const Vec var = estimator.regularized_variance();
        for (std::size_t d = 0; d < dim_; ++d) scale_[d] = std::sqrt(var[d]);
        estimator.restart();
        rm_counter = 0;
      }
      windows.advance();
    }

    draws.clear();
    draws.reserve(cfg_.kept_draws * dim_);
    stats.clear();
    stats.reserve(cfg_.kept_draws);
    for (std::size_t i = 0; i < cfg_.kept_draws; ++i) {
      stats.push_back(step());
      const Vec x = target_.constrain(q_);
      draws.insert(draws.end(), x.begin(), x.end());
    }
  }

 private:
  static constexpr double kTargetAccept = 0.234;

  double density(const Vec& q) const {
    const double lp = target_.log_density(q);
    return std::isnan(lp) ? -kInf : lp;
  }

  void initialize() {
    q_.assign(dim_, 0.0);
    for (int attempt = 0; attempt < kInitAttempts; ++attempt) {
      for (double& q : q_) q = kInitJitterSd * rng_.normal();
      log_density_ = density(q_);
      if (std::isfinite(log_density_)) return;
    }
    throw Error(ErrorCode::InvalidConfig, "no initial point with finite log density found");
  }

  DrawStats step() {
    const double lambda = std::exp(log_lambda_);
    Vec proposal(dim_);
    for (std::size_t d = 0; d < dim_; ++d) proposal[d] = q_[d] + lambda * scale_[d] * rng_.normal();
    const double lp = density(proposal);
    const double log_ratio = lp - log_density_;
    const double accept = std::isfinite(lp) ? std::min(1.0, std::exp(log_ratio)) : 0.0;
    const bool accepted = rng_.uniform() < accept;
    if (accepted) {
      q_ = std::move(proposal);
      log_density_ = lp;
    }
    DrawStats s;
    s.accept_prob = accept;
    s.tree_depth = accepted ? 1 : 0;
    s.n_leapfrog = 0;
    s.divergent = false;
    s.step_size = lambda;
    s.energy = -log_density_;
    return s;
  }

  const DifferentiableDensity& target_;
  const SamplerConfig& cfg_;
  Rng rng_;
  std::size_t dim_;
  Vec scale_;
  double log_lambda_ = 0.0;
  Vec q_;
  double log_density_ = 0.0;
};

template <class Chain>
Trace run_chains(const DifferentiableDensity& target, const SamplerConfig& cfg) {
  cfg.validate();
  if (target.dimension() == 0) throw Error(ErrorCode::InvalidConfig, "target has no parameters");

  Trace trace;
  trace.param_names = target.parameter_names();
  trace.config = cfg;
  trace.draws.resize(cfg.chains);
  trace.stats.resize(cfg.chains);
  std::vector<std::exception_ptr> failures(cfg.chains);

  auto work = [&](std::size_t c) {
    try {
      Chain chain(target, cfg, c);
      chain.run(trace.draws[c], trace.stats[c]);
    } catch (...) {
      failures[c] = std::current_exception();
    }
  };
  if (cfg.parallel && cfg.chains > 1) {
    std::vector<std::thread> workers;
    workers.reserve(cfg.chains);
    for (std::size_t c = 0; c < cfg.chains; ++c) workers.emplace_back(work, c);
    for (auto& w : workers) w.join();
  } else {
    for (std::size_t c = 0; c < cfg.chains; ++c) work(c);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  if (cfg.kept_draws > 0 && trace.divergence_rate() > 0.5) {
    throw Error(ErrorCode::AllDivergent, "more than half of the post-warmup transitions diverged (" +
                                             format_double(100.0 * trace.divergence_rate()) + "%)");
  }
  return trace;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) { return algorithm == Algorithm::Nuts ? "nuts" : "rwm"; }

Algorithm parse_algorithm(std::string_view name) {
  if (name == "nuts") return Algorithm::Nuts;
  if (name == "rwm") return Algorithm::Rwm;
  throw Error(ErrorCode::InvalidConfig, "unknown algorithm '" + std::string(name) + "' (expected nuts or rwm)");
}

void SamplerConfig::validate() const {
  if (chains < 1) throw Error(ErrorCode::InvalidConfig, "chains must be >= 1");
  if (!(target_accept > 0.0 && target_accept < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "target_accept must lie in (0, 1)");
  }
  if (!(step_size_init > 0.0) || !std::isfinite(step_size_init)) {
    throw Error(ErrorCode::InvalidConfig, "step_size_init must be > 0");
  }
  if (max_tree_depth < 1) throw Error(ErrorCode::InvalidConfig, "max_tree_depth must be >= 1");
}

std::size_t Trace::n_draws() const {
  if (draws.empty() || param_names.empty()) return 0;
  return draws.front().size() / param_names.size();
}

std::vector<std::vector<double>> Trace::chains_for(std::size_t param) const {
  std::vector<std::vector<double>> out(n_chains());
  const std::size_t n = n_draws();
  for (std::size_t c = 0; c < n_chains(); ++c) {
    out[c].reserve(n);
    for (std::size_t d = 0; d < n; ++d) out[c].push_back(value(c, d, param));
  }
  return out;
}

std::vector<double> Trace::pooled(std::size_t param) const {
  std::vector<double> out;
  out.reserve(n_chains() * n_draws());
  for (const auto& chain : chains_for(param)) out.insert(out.end(), chain.begin(), chain.end());
  return out;
}

std::size_t Trace::param_index(std::string_view name) const {
  for (std::size_t i = 0; i < param_names.size(); ++i) {
    if (param_names[i] == name) return i;
  }
  throw Error(ErrorCode::MalformedTrace, "trace has no parameter '" + std::string(name) + "'");
}

double Trace::divergence_rate() const {
  std::size_t total = 0;
  std::size_t divergent = 0;
  for (const auto& chain : stats) {
    for (const auto& s : chain) {
      ++total;
      divergent += s.divergent ? 1 : 0;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(divergent) / static_cast<double>(total);
}

Trace nuts_sample(const DifferentiableDensity& target, const SamplerConfig& cfg) {
  SamplerConfig c = cfg;
  c.algorithm = Algorithm::Nuts;
  return run_chains<NutsChain>(target, c);
}

Trace rwm_sample(const DifferentiableDensity& target, const SamplerConfig& cfg) {
  SamplerConfig c = cfg;
  c.algorithm = Algorithm::Rwm;
  return run_chains<RwmChain>(target, c);
}

Trace sample_posterior(const DifferentiableDensity& target, const SamplerConfig& cfg) {
  return cfg.algorithm == Algorithm::Nuts ? nuts_sample(target, cfg) : rwm_sample(target, cfg);
}

}  // namespace llmbi
