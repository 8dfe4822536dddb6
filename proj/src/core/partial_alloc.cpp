// Copyright 2026 uavmec contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/partial_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "core/error.hpp"

namespace uavmec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;
constexpr double kSeedShare = 1e-6;
constexpr double kMinShare = 1e-12;

UserMode mode_of(const P2Options& opt, int m) {
  return opt.modes.empty() ? UserMode::kPartial : opt.modes[m];
}
bool can_local(UserMode u) { return u != UserMode::kOffloadOnly; }
bool can_offload(UserMode u) { return u != UserMode::kLocalOnly; }

// Cumulative harvested power-sum eta0 P0 sum_{k<n} h; index 0 is zero. The
// common slot-length factor is dropped throughout the allocation math.
Eigen::VectorXd harvest_cumulative(const ChannelGains& g, const Scenario& s, int m) {
  const int n_slots = g.num_slots();
  Eigen::VectorXd e(n_slots + 1);
  e[0] = 0.0;
  const double scale = s.physics.eh_efficiency * s.uav.tx_power;
  for (int n = 0; n < n_slots; ++n) e[n + 1] = e[n] + scale * g.h(m, n);
  return e;
}

// Per-user constants of the closed-form responses.
struct UserConst {
  double local_coeff;  // gamma f(mu)^3 = local_coeff * mu^-1.5
  double rate_coeff;   // w B / (nu ln2); P(mu) = [rate_coeff / mu - sigma^2 / h]^+
  double freq_coeff;   // f(mu) = sqrt(freq_coeff / mu)
  double time_value;   // slot_len * w B / nu; per-unit-time worth of phi
};

UserConst user_const(const Scenario& s, int m) {
  const auto& u = s.users[m];
  UserConst c;
  c.freq_coeff = u.weight / (3.0 * u.cpu_cycles_per_bit * u.capacitance_coeff);
  c.local_coeff = u.capacitance_coeff * std::pow(c.freq_coeff, 1.5);
  c.rate_coeff = u.weight * s.physics.bandwidth / (u.overhead_factor * kLn2);
  c.time_value = s.slot_len() * u.weight * s.physics.bandwidth / u.overhead_factor;
  return c;
}

double power_at(const UserConst& c, double mu, double gain, double noise, double cap) {
  if (mu == kInf) return 0.0;
  if (mu <= 0.0) return cap;
  return std::max(0.0, c.rate_coeff / mu - noise / gain);
}

double freq_at(const UserConst& c, double mu, double cap) {
  if (mu == kInf) return 0.0;
  if (mu <= 0.0) return cap;
  return std::sqrt(c.freq_coeff / mu);
}

// Energy price that makes slots [lo, hi] spend exactly `avail` at a common
// suffix multiplier. Returns 0 if the slots cannot spend anything and +inf if
// there is nothing to spend.
double segment_price(const UserConst& c, bool local, const double* h, const double* t,
                     int lo, int hi, double avail, double noise) {
  const int count = hi - lo + 1;
  double t_total = 0.0;
  for (int i = lo; i <= hi; ++i) t_total += t[i];
  const double local_total = local ? c.local_coeff * count : 0.0;
  if (avail <= 0.0) return kInf;
  if (local_total == 0.0 && t_total == 0.0) return 0.0;

  auto spend = [&](double u, double& slope) {
    const double mu = std::exp(u);
    double val = local_total * std::pow(mu, -1.5);
    slope = -1.5 * val;
    for (int i = lo; i <= hi; ++i) {
      if (t[i] <= 0.0) continue;
      const double p = c.rate_coeff / mu - noise / h[i];
      if (p > 0.0) {
        val += t[i] * p;
        slope -= t[i] * c.rate_coeff / mu;
      }
    }
    return val - avail;
  };

  double mu_hi = std::max(local_total > 0 ? std::pow(2.0 * local_total / avail, 2.0 / 3.0) : 0.0,
                          2.0 * c.rate_coeff * t_total / avail);
  double slope;
  double u_hi = std::log(mu_hi);
  double u_lo;
  if (local_total > 0.0) {
    u_lo = std::log(std::pow(local_total / avail, 2.0 / 3.0));
  } else {
    u_lo = u_hi - std::log(2.0);
    while (spend(u_lo, slope) < 0.0) u_lo -= std::log(2.0);
  }
  if (spend(u_hi, slope) > 0.0) return std::exp(u_hi);

  // The spend is convex and decreasing in log(mu): Newton from the left
  // approaches the root monotonically; bisection guards the kinks.
  double u = u_lo;
  for (int it = 0; it < 200; ++it) {
    const double f = spend(u, slope);
    if (std::abs(f) <= 1e-15 * avail) break;
    if (f > 0.0) u_lo = u; else u_hi = u;
    double next = (slope < 0.0) ? u - f / slope : 0.5 * (u_lo + u_hi);
    if (!(next > u_lo && next < u_hi)) next = 0.5 * (u_lo + u_hi);
    if (std::abs(next - u) <= 1e-15 * std::max(1.0, std::abs(u))) { u = next; break; }
    u = next;
  }
  return std::exp(u);
}

// Energy-optimal suffix multipliers for one user at fixed time shares. The
// price must be nonincreasing in n; adjacent blocks that violate this are
// pooled, and a pooled price always lies between the two block prices.
void energy_prices(const UserConst& c, bool local, const double* h, const double* t,
                   const Eigen::VectorXd& cum, double noise, double* mu) {
  const int n_slots = static_cast<int>(cum.size()) - 1;
  struct Block { int lo, hi; double price; };
  std::vector<Block> stack;
  stack.reserve(n_slots);
  for (int k = 0; k < n_slots; ++k) {
    Block b{k, k, segment_price(c, local, h, t, k, k, cum[k + 1] - cum[k], noise)};
    while (!stack.empty() && b.price > stack.back().price) {
      b.lo = stack.back().lo;
      stack.pop_back();
      b.price = segment_price(c, local, h, t, b.lo, b.hi, cum[b.hi + 1] - cum[b.lo], noise);
    }
    stack.push_back(b);
  }
  for (const Block& b : stack)
    for (int i = b.lo; i <= b.hi; ++i) mu[i] = b.price;
}

// Exact maximization over (f, z) for the given t; fills f, P, z and the dual.
void energy_step(const ChannelGains& g, const Scenario& s, const P2Options& opt,
                 PrimalAllocation& a, DualState& d) {
  const int n_users = g.num_users();
  const int n_slots = g.num_slots();
  const double noise = s.physics.noise_power;
  std::vector<double> h(n_slots), t(n_slots), mu(n_slots);
  for (int m = 0; m < n_users; ++m) {
    const UserMode mode = mode_of(opt, m);
    const UserConst c = user_const(s, m);
    for (int n = 0; n < n_slots; ++n) {
      h[n] = g.h(m, n);
      t[n] = can_offload(mode) ? a.t(m, n) : 0.0;
    }
    const Eigen::VectorXd cum = harvest_cumulative(g, s, m);
    energy_prices(c, can_local(mode), h.data(), t.data(), cum, noise, mu.data());
    for (int n = 0; n < n_slots; ++n) {
      d.mu(m, n) = mu[n];
      a.f(m, n) = can_local(mode) ? freq_at(c, mu[n], s.solver.f_cap) : 0.0;
      a.t(m, n) = t[n];
      a.P(m, n) = t[n] > 0.0 ? power_at(c, mu[n], h[n], noise, s.solver.p_cap) : 0.0;
      a.z(m, n) = t[n] * a.P(m, n);
    }
    for (int n = 0; n < n_slots; ++n) {
      const double next = n + 1 < n_slots ? mu[n + 1] : 0.0;
      double lam = (mu[n] == kInf) ? (next == kInf ? 0.0 : kInf) : mu[n] - next;
      d.lambda(m, n) = std::max(0.0, lam);
    }
  }
}

// Share that maximizes the time-priced rate for one user at fixed z.
double share_at_price(double hz_over_noise, double price, double time_value) {
  if (hz_over_noise <= 0.0) return 0.0;
  if (price <= 0.0) return 1.0;
  const double x = phi_inverse(price / time_value);
  return std::clamp(hz_over_noise / x, kMinShare, 1.0);
}

// Exact maximization over t for the given z; fills t, P and alpha.
void time_step(const ChannelGains& g, const Scenario& s, const P2Options& opt,
               PrimalAllocation& a, DualState& d) {
  const int n_users = g.num_users();
  const int n_slots = g.num_slots();
  const double noise = s.physics.noise_power;
  std::vector<UserConst> uc;
  for (int m = 0; m < n_users; ++m) uc.push_back(user_const(s, m));

  for (int n = 0; n < n_slots; ++n) {
    std::vector<int> active;
    std::vector<double> load(n_users, 0.0);
    for (int m = 0; m < n_users; ++m) {
      a.t(m, n) = 0.0;
      if (!can_offload(mode_of(opt, m))) continue;
      load[m] = g.h(m, n) * a.z(m, n) / noise;
      if (load[m] > 0.0) active.push_back(m);
    }
    // Sum of shares and its derivative in log(price).
    auto total_share = [&](double price, double& slope) {
      double sum = 0.0;
      slope = 0.0;
      for (int m : active) {
        if (price <= 0.0) { sum += 1.0; continue; }
        const double c = price / uc[m].time_value;
        const double x = phi_inverse(c);
        const double share = load[m] / x;
        if (share >= 1.0) { sum += 1.0; continue; }
        if (share <= kMinShare) { sum += kMinShare; continue; }
        sum += share;
        // d share / d log(price) = -(share / x) * c / phi'(x)
        slope -= share / x * c * kLn2 * (1.0 + x) * (1.0 + x) / x;
      }
      return sum;
    };

    double price = 0.0;
    double slope;
    if (opt.fixed_time_price) {
      price = opt.time_price[n];
    } else if (active.size() > 1) {
      double hi = 0.0;
      for (int m : active) hi = std::max(hi, uc[m].time_value * phi(load[m]));
      while (total_share(hi, slope) > 1.0) hi *= 2.0;
      double lo = hi;
      while (total_share(lo, slope) <= 1.0) lo *= 0.5;
      double u_lo = std::log(lo), u_hi = std::log(hi), u = u_hi;
      for (int it = 0; it < 200; ++it) {
        const double f = total_share(std::exp(u), slope) - 1.0;
        if (std::abs(f) <= 1e-15) break;
        if (f > 0.0) u_lo = u; else u_hi = u;
        double next = slope < 0.0 ? u - f / slope : 0.5 * (u_lo + u_hi);
        if (!(next > u_lo && next < u_hi)) next = 0.5 * (u_lo + u_hi);
        if (std::abs(next - u) <= 1e-16 * std::max(1.0, std::abs(u))) { u = next; break; }
        u = next;
      }
      price = std::exp(u);
    }
    d.alpha[n] = price;
    double used = 0.0;
    for (int m : active) {
      a.t(m, n) = share_at_price(load[m], price, uc[m].time_value);
      used += a.t(m, n);
    }
    if (used > 1.0) {
      for (int m : active) a.t(m, n) /= used;
      used = 1.0;
    }

    // Give a user stuck at z = 0 a foothold when time is worth more to it
    // than the slot price, so the energy step can size its transmission.
    std::vector<int> seeds;
    for (int m = 0; m < n_users; ++m) {
      if (!can_offload(mode_of(opt, m)) || load[m] > 0.0) continue;
      const double p = power_at(uc[m], d.mu(m, n), g.h(m, n), noise, s.solver.p_cap);
      if (p > 0.0 && uc[m].time_value * phi(g.h(m, n) * p / noise) > price) seeds.push_back(m);
    }
    if (!seeds.empty()) {
      const double seed_total = kSeedShare * static_cast<double>(seeds.size());
      if (!opt.fixed_time_price && used + seed_total > 1.0) {
        const double scale = (1.0 - seed_total) / used;
        for (int m : active) a.t(m, n) *= scale;
      }
      for (int m : seeds) a.t(m, n) = kSeedShare;
    }
    for (int m = 0; m < n_users; ++m)
      a.P(m, n) = a.t(m, n) > 0.0 ? a.z(m, n) / a.t(m, n) : 0.0;
  }
}

P2Result solve_exact(const ChannelGains& g, const Scenario& s, const P2Options& opt) {
  const int n_users = g.num_users();
  const int n_slots = g.num_slots();
  P2Result r;
  r.alloc = PrimalAllocation::zeros(n_users, n_slots);
  r.dual = DualState::zeros(n_users, n_slots);
  int offloaders = 0;
  for (int m = 0; m < n_users; ++m) offloaders += can_offload(mode_of(opt, m)) ? 1 : 0;
  for (int m = 0; m < n_users; ++m) {
    if (!can_offload(mode_of(opt, m))) continue;
    const double share = opt.fixed_time_price ? 1.0 : 1.0 / offloaders;
    for (int n = 0; n < n_slots; ++n) r.alloc.t(m, n) = share;
  }
  if (opt.fixed_time_price) r.dual.alpha = opt.time_price;

  double prev = -kInf;
  const int cap = s.solver.max_dual;
  for (int it = 1; it <= cap; ++it) {
    energy_step(g, s, opt, r.alloc, r.dual);
    r.iterations = it;
    r.objective = evaluate_objective_partial(r.alloc, g, s);
    if (offloaders == 0 ||
        std::abs(r.objective - prev) <= s.solver.dual_tol * std::max(std::abs(r.objective), 1e-300)) {
      r.converged = true;
      break;
    }
    prev = r.objective;
    if (it == cap) break;
    time_step(g, s, opt, r.alloc, r.dual);
  }
  r.dual.refresh_mu();
  return r;
}

// Closed-form share update: z built from the previous share,
// then the root of the stationarity equation in t.
void subgradient_response(const ChannelGains& g, const Scenario& s, const P2Options& opt,
                          const DualState& d, const Matrix& t_prev, PrimalAllocation& a) {
  const double noise = s.physics.noise_power;
  for (int m = 0; m < g.num_users(); ++m) {
    const UserMode mode = mode_of(opt, m);
    const UserConst c = user_const(s, m);
    for (int n = 0; n < g.num_slots(); ++n) {
      const double mu = d.mu(m, n);
      a.f(m, n) = can_local(mode) ? freq_at(c, mu, s.solver.f_cap) : 0.0;
      double t = 0.0, p = 0.0;
      if (can_offload(mode)) {
        p = power_at(c, mu, g.h(m, n), noise, s.solver.p_cap);
        if (p > 0.0) {
          const double base = t_prev(m, n) > 0.0 ? t_prev(m, n) : kSeedShare;
          t = offload_time_root(m, n, base * p, g.h(m, n), d.alpha[n], s);
        }
      }
      a.t(m, n) = t;
      a.P(m, n) = t > 0.0 ? p : 0.0;
      a.z(m, n) = t * a.P(m, n);
    }
  }
}

P2Result solve_subgradient(const ChannelGains& g, const Scenario& s, const P2Options& opt) {
  const int n_users = g.num_users();
  const int n_slots = g.num_slots();
  DualState d = DualState::zeros(n_users, n_slots);
  if (opt.fixed_time_price) d.alpha = opt.time_price;
  int offloaders = 0;
  for (int m = 0; m < n_users; ++m) offloaders += can_offload(mode_of(opt, m)) ? 1 : 0;
  const double share0 = 1.0 / std::max(1, offloaders);
  // Start each user at the common price whose full response, offloading at
  // the initial share, spends exactly the total harvest; the ascent then
  // only has to redistribute it across prefixes.
  for (int m = 0; m < n_users; ++m) {
    const Eigen::VectorXd cum = harvest_cumulative(g, s, m);
    if (!(cum[n_slots] > 0.0)) continue;
    const UserMode mode = mode_of(opt, m);
    const UserConst c = user_const(s, m);
    auto spend = [&](double mu) {
      double e = 0.0;
      for (int n = 0; n < n_slots; ++n) {
        if (can_local(mode)) e += c.local_coeff * std::pow(mu, -1.5);
        if (can_offload(mode))
          e += share0 * power_at(c, mu, g.h(m, n), s.physics.noise_power, s.solver.p_cap);
      }
      return e;
    };
    double lo = std::log(1e-300), hi = std::log(1e300);
    for (int k = 0; k < 200 && hi - lo > 1e-12; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (spend(std::exp(mid)) > cum[n_slots]) lo = mid; else hi = mid;
    }
    d.lambda(m, n_slots - 1) = std::exp(0.5 * (lo + hi));
  }
  d.refresh_mu();

  PrimalAllocation a = PrimalAllocation::zeros(n_users, n_slots);
  for (int m = 0; m < n_users; ++m)
    if (can_offload(mode_of(opt, m))) a.t.row(m).setConstant(share0);

  P2Result best;
  best.objective = -kInf;
  StepSchedule sched;
  Matrix avg_f = Matrix::Zero(n_users, n_slots), avg_z = avg_f, avg_t = avg_f;
  double weight_sum = 0.0;
  for (int l = 1; l <= s.solver.subgradient_iters; ++l) {
    const Matrix t_prev = a.t;
    subgradient_response(g, s, opt, d, t_prev, a);
    // Dual iterates pin the primal only loosely; the step-weighted running
    // average of the responses converges to a primal optimum, so both the
    // raw and the averaged point are candidates.
    const double weight = 1.0 / std::sqrt(static_cast<double>(l));
    avg_f += weight * a.f;
    avg_z += weight * a.z;
    avg_t += weight * a.t;
    weight_sum += weight;
    PrimalAllocation mean = PrimalAllocation::zeros(n_users, n_slots);
    mean.f = avg_f / weight_sum;
    mean.z = avg_z / weight_sum;
    mean.t = avg_t / weight_sum;
    for (int m = 0; m < n_users; ++m)
      for (int n = 0; n < n_slots; ++n)
        mean.P(m, n) = mean.t(m, n) > 0.0 ? mean.z(m, n) / mean.t(m, n) : 0.0;
    for (const PrimalAllocation* cand : {&a, &mean}) {
      const PrimalAllocation feas = restore_feasibility(*cand, g, s);
      const double obj = evaluate_objective_partial(feas, g, s);
      if (obj > best.objective) {
        best.objective = obj;
        best.alloc = feas;
        best.dual = d;
      }
    }
    if (l == 1) {
      double max_lam = d.lambda.maxCoeff(), max_dl = 0.0, value_scale = 0.0;
      for (int m = 0; m < n_users; ++m) {
        const Eigen::VectorXd cum = harvest_cumulative(g, s, m);
        const UserConst c = user_const(s, m);
        double spent = 0.0;
        for (int n = 0; n < n_slots; ++n) {
          const double gam = s.users[m].capacitance_coeff;
          spent += gam * std::pow(a.f(m, n), 3) + a.z(m, n);
          max_dl = std::max(max_dl, s.slot_len() * std::abs(cum[n + 1] - spent));
          value_scale = std::max(value_scale,
                                 c.time_value * phi(g.h(m, n) * a.P(m, n) / s.physics.noise_power));
        }
      }
      sched.theta_lambda0 = s.solver.subgradient_step * max_lam / std::max(max_dl, 1e-300);
      sched.theta_alpha0 = s.solver.subgradient_step * value_scale;
    }
    if (opt.fixed_time_price) {
      const Eigen::VectorXd keep = d.alpha;
      d = subgradient_step(d, a, g, s, l, sched);
      d.alpha = keep;
    } else {
      d = subgradient_step(d, a, g, s, l, sched);
    }
    best.iterations = l;
  }
  // Converged once the dual bound at the kept multipliers closes the gap.
  const double bound = dual_function_value(best.dual, g, s, opt);
  best.converged = bound - best.objective <= 1e-3 * std::max(std::abs(best.objective), 1e-300);
  return best;
}

}  // namespace

PrimalAllocation PrimalAllocation::zeros(int users, int slots) {
  PrimalAllocation a;
  a.f = Matrix::Zero(users, slots);
  a.P = Matrix::Zero(users, slots);
  a.t = Matrix::Zero(users, slots);
  a.z = Matrix::Zero(users, slots);
  return a;
}

DualState DualState::zeros(int users, int slots) {
  DualState d;
  d.lambda = Matrix::Zero(users, slots);
  d.alpha = Eigen::VectorXd::Zero(slots);
  d.mu = Matrix::Zero(users, slots);
  return d;
}

void DualState::refresh_mu() {
  mu.resize(lambda.rows(), lambda.cols());
  for (Eigen::Index m = 0; m < lambda.rows(); ++m) {
    double acc = 0.0;
    for (Eigen::Index n = lambda.cols() - 1; n >= 0; --n) {
      acc += lambda(m, n);
      mu(m, n) = acc;
    }
  }
}

double optimal_cpu_frequency(double weight, double cycles_per_bit, double gamma, double mu) {
  if (!(mu > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "unbounded frequency: suffix multiplier is zero");
  return std::sqrt(weight / (3.0 * cycles_per_bit * gamma * mu));
}

double optimal_cpu_frequency(int m, int n, const DualState& dual, const Scenario& s) {
  const auto& u = s.users[m];
  return optimal_cpu_frequency(u.weight, u.cpu_cycles_per_bit, u.capacitance_coeff,
                               dual.mu(m, n));
}

double optimal_offload_power(int m, int n, const DualState& dual, double gain,
                             const Scenario& s) {
  const double mu = dual.mu(m, n);
  if (!(mu > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "unbounded power: suffix multiplier is zero");
  const auto& u = s.users[m];
  const double level = u.weight * s.physics.bandwidth / (u.overhead_factor * kLn2 * mu);
  return std::max(0.0, level - s.physics.noise_power / gain);
}

double phi(double x) {
  if (x <= 0.0) return 0.0;
  if (x < 1e-3) {
    // log1p(x) - x/(1+x) = sum_{k>=2} (-1)^k (k-1)/k x^k
    double term = x * x, sum = 0.0;
    for (int k = 2; k < 12; ++k) {
      sum += ((k % 2 == 0) ? 1.0 : -1.0) * (k - 1.0) / k * term;
      term *= x;
    }
    return sum / kLn2;
  }
  return (std::log1p(x) - x / (1.0 + x)) / kLn2;
}

double phi_inverse(double c) {
  if (c <= 0.0) return 0.0;
  // phi(e^u) is increasing in u with derivative x^2 / (ln2 (1+x)^2).
  double u_lo = -1.0, u_hi = 1.0;
  while (phi(std::exp(u_lo)) > c) u_lo *= 2.0;
  while (phi(std::exp(u_hi)) < c) u_hi *= 2.0;
  double u = (c < 1.0) ? 0.5 * std::log(2.0 * kLn2 * c) : (c + 1.0 / kLn2) * kLn2;
  if (!(u > u_lo && u < u_hi)) u = 0.5 * (u_lo + u_hi);
  for (int it = 0; it < 200; ++it) {
    const double x = std::exp(u);
    const double f = phi(x) - c;
    if (f == 0.0) break;
    if (f > 0.0) u_hi = u; else u_lo = u;
    const double slope = x * x / (kLn2 * (1.0 + x) * (1.0 + x));
    double next = u - f / slope;
    if (!(next > u_lo && next < u_hi)) next = 0.5 * (u_lo + u_hi);
    if (std::abs(next - u) <= 1e-16 * std::max(1.0, std::abs(u))) { u = next; break; }
    u = next;
  }
  return std::exp(u);
}

double offload_time_root(int m, int n, double z, double gain, double alpha_n,
                         const Scenario& s) {
  (void)n;
  if (z <= 0.0) return 0.0;
  if (alpha_n <= 0.0) return 1.0;
  const auto& u = s.users[m];
  const double noise = s.physics.noise_power;
  const double c = u.overhead_factor * s.grid.slots * alpha_n /
                   (u.weight * s.physics.bandwidth * s.grid.horizon);
  auto g = [&](double t) {
    const double x = gain * z / (noise * t);
    return phi(x) - c;
  };
  if (g(1.0) >= 0.0) return 1.0;
  double lo = kMinShare, hi = 1.0;
  if (g(lo) <= 0.0) return lo;
  const double tol = std::max(s.solver.bisection_tol, 1e-16);
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

DualState subgradient_step(const DualState& dual, const PrimalAllocation& primal,
                           const ChannelGains& gains, const Scenario& s, int iteration,
                           const StepSchedule& schedule) {
  DualState next = dual;
  const double root = std::sqrt(static_cast<double>(std::max(iteration, 1)));
  const double th_l = schedule.theta_lambda0 / root;
  const double th_a = schedule.theta_alpha0 / root;
  const double delta = s.slot_len();
  for (int m = 0; m < gains.num_users(); ++m) {
    const Eigen::VectorXd cum = harvest_cumulative(gains, s, m);
    const double gam = s.users[m].capacitance_coeff;
    double spent = 0.0;
    for (int n = 0; n < gains.num_slots(); ++n) {
      const double f = primal.f(m, n);
      spent += gam * f * f * f + primal.z(m, n);
      const double grad = delta * (cum[n + 1] - spent);
      next.lambda(m, n) = std::max(0.0, dual.lambda(m, n) - th_l * grad);
    }
  }
  for (int n = 0; n < gains.num_slots(); ++n) {
    const double grad = 1.0 - primal.t.col(n).sum();
    next.alpha[n] = std::max(0.0, dual.alpha[n] - th_a * grad);
  }
  next.refresh_mu();
  return next;
}

Eigen::VectorXd per_user_bits(const PrimalAllocation& a, const ChannelGains& g,
                              const Scenario& s) {
  Eigen::VectorXd bits = Eigen::VectorXd::Zero(g.num_users());
  const double delta = s.slot_len();
  for (int m = 0; m < g.num_users(); ++m) {
    const auto& u = s.users[m];
    double sum = 0.0;
    for (int n = 0; n < g.num_slots(); ++n) {
      sum += delta * a.f(m, n) / u.cpu_cycles_per_bit;
      sum += offload_capacity(g.h(m, n), a.P(m, n), a.t(m, n), m, s);
    }
    bits[m] = sum;
  }
  return bits;
}

double evaluate_objective_partial(const PrimalAllocation& a, const ChannelGains& g,
                                  const Scenario& s) {
  const Eigen::VectorXd bits = per_user_bits(a, g, s);
  double total = 0.0;
  for (int m = 0; m < g.num_users(); ++m) total += s.users[m].weight * bits[m];
  return total;
}

double dual_function_value(const DualState& dual, const ChannelGains& g, const Scenario& s,
                           const P2Options& opt) {
  const double delta = s.slot_len();
  const double noise = s.physics.noise_power;
  double value = 0.0;
  for (int m = 0; m < g.num_users(); ++m) {
    const UserMode mode = mode_of(opt, m);
    const UserConst c = user_const(s, m);
    const auto& u = s.users[m];
    const Eigen::VectorXd cum = harvest_cumulative(g, s, m);
    for (int n = 0; n < g.num_slots(); ++n) {
      const double mu = dual.mu(m, n);
      if (mu <= 0.0 && (can_local(mode) || can_offload(mode))) return kInf;
      if (can_local(mode)) {
        const double f = std::sqrt(c.freq_coeff / mu);
        value += delta * (u.weight * f / u.cpu_cycles_per_bit - mu * u.capacitance_coeff * f * f * f);
      }
      if (can_offload(mode)) {
        const double p = std::max(0.0, c.rate_coeff / mu - noise / g.h(m, n));
        const double per_share =
            c.time_value * std::log2(1.0 + g.h(m, n) * p / noise) - delta * mu * p;
        value += std::max(0.0, per_share - dual.alpha[n]);
      }
      value += dual.lambda(m, n) * delta * cum[n + 1];
    }
  }
  if (!opt.fixed_time_price) value += dual.alpha.sum();
  return value;
}

PrimalAllocation restore_feasibility(const PrimalAllocation& a, const ChannelGains& g,
                                     const Scenario& s) {
  PrimalAllocation r = a;
  for (int m = 0; m < g.num_users(); ++m) {
    const Eigen::VectorXd cum = harvest_cumulative(g, s, m);
    const double gam = s.users[m].capacitance_coeff;
    double spent = 0.0, factor = 1.0;
    for (int n = 0; n < g.num_slots(); ++n) {
      spent += gam * std::pow(a.f(m, n), 3) + a.z(m, n);
      if (spent > cum[n + 1]) factor = std::min(factor, cum[n + 1] / spent);
    }
    if (factor < 1.0) {
      const double froot = std::cbrt(factor);
      for (int n = 0; n < g.num_slots(); ++n) {
        r.f(m, n) *= froot;
        r.z(m, n) *= factor;
      }
    }
  }
  for (int n = 0; n < g.num_slots(); ++n) {
    const double used = r.t.col(n).sum();
    if (used > 1.0) r.t.col(n) /= used;
  }
  for (int m = 0; m < g.num_users(); ++m)
    for (int n = 0; n < g.num_slots(); ++n)
      r.P(m, n) = r.t(m, n) > 0.0 ? r.z(m, n) / r.t(m, n) : 0.0;
  return r;
}

StationarityResiduals stationarity_residuals(const PrimalAllocation& a, const DualState& d,
                                             const ChannelGains& g, const Scenario& s) {
  StationarityResiduals r;
  const double noise = s.physics.noise_power;
  for (int m = 0; m < g.num_users(); ++m) {
    const auto& u = s.users[m];
    const double ref_f = u.weight / u.cpu_cycles_per_bit;
    for (int n = 0; n < g.num_slots(); ++n) {
      const double mu = d.mu(m, n);
      const double f = a.f(m, n);
      if (f > 0.0)
        r.frequency = std::max(
            r.frequency, std::abs(ref_f - 3.0 * u.capacitance_coeff * f * f * mu) / ref_f);
      if (a.z(m, n) > 0.0 && a.t(m, n) > 0.0) {
        const double h = g.h(m, n);
        const double marginal = u.weight * s.physics.bandwidth * a.t(m, n) * h /
                                (u.overhead_factor * kLn2 * (noise * a.t(m, n) + h * a.z(m, n)));
        r.power = std::max(r.power, std::abs(marginal - mu) / std::max(mu, marginal));
      }
    }
  }
  return r;
}

double energy_slack(const PrimalAllocation& a, const ChannelGains& g, const Scenario& s) {
  double worst = kInf;
  for (int m = 0; m < g.num_users(); ++m) {
    const Eigen::VectorXd cum = harvest_cumulative(g, s, m);
    const double gam = s.users[m].capacitance_coeff;
    double spent = 0.0;
    for (int n = 0; n < g.num_slots(); ++n) {
      spent += gam * std::pow(a.f(m, n), 3) + a.z(m, n);
      const double slack = cum[n + 1] > 0.0 ? (cum[n + 1] - spent) / cum[n + 1]
                                            : (spent > 0.0 ? -1.0 : 0.0);
      worst = std::min(worst, slack);
    }
  }
  return worst;
}

P2Result solve_p2(const ChannelGains& g, const Scenario& s, const P2Options& opt) {
  if (g.num_users() != s.num_users() || g.num_slots() != s.num_slots())
    throw Error(ErrorCode::kInvalidArgument, "solve_p2: gains do not match the scenario");
  if (!opt.modes.empty() && static_cast<int>(opt.modes.size()) != s.num_users())
    throw Error(ErrorCode::kInvalidArgument, "solve_p2: one mode per user required");
  if (opt.fixed_time_price && opt.time_price.size() != s.num_slots())
    throw Error(ErrorCode::kInvalidArgument, "solve_p2: one time price per slot required");
  P2Result r = s.solver.dual_method == DualMethod::kExact ? solve_exact(g, s, opt)
                                                          : solve_subgradient(g, s, opt);
  r.dual_value = dual_function_value(r.dual, g, s, opt);
  return r;
}

P2Result solve_p2(const Trajectory& traj, const Scenario& s, const P2Options& opt) {
  return solve_p2(gains_for_trajectory(traj, s), s, opt);
}

}  // namespace uavmec
