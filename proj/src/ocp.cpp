// Copyright 2026 The AIM Simulator Authors
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

#include "aim/ocp.hpp"

#include "aim/errors.hpp"
#include "aim/safety.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

namespace aim
{

std::string_view to_string(SolveStatus status)
{
  switch (status) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::IterLimit:
      return "iter_limit";
  }
  return "unknown";
}

std::size_t OcpSpec::steps() const
{
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

void OcpSpec::validate() const
{
  if (!(dt > 0.0)) throw ContractViolation("OcpSpec: dt must be positive");
  if (!(horizon > 0.0)) throw ContractViolation("OcpSpec: horizon must be positive");
  const double ratio = horizon / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-6) {
    throw ContractViolation("OcpSpec: horizon must be a multiple of dt");
  }
  if (earliest_entry && *earliest_entry < t0 - 1e-9) {
    throw ContractViolation("OcpSpec: earliest_entry precedes t0");
  }
  if (leader && std::abs(leader->trajectory.dt - dt) > 1e-12) {
    throw ContractViolation("OcpSpec: leader trajectory uses a different dt");
  }
  params.validate();
}

namespace
{

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Row3 = Eigen::RowVector3d;

// g = ax x_k + av v_k + au u_k + cvv v_k^2 + c0 <= 0
struct StageConstraint
{
  std::size_t k{0};
  double ax{0.0};
  double av{0.0};
  double au{0.0};
  double cvv{0.0};
  double c0{0.0};
};

struct Problem
{
  std::size_t n{0};
  double dt{0.1};
  double x0{0.0};
  double v0{0.0};
  double p0{0.0};
  double wv{0.0};
  double wa{0.0};
  double wj{0.0};
  double brake{3.0};
  std::vector<StageConstraint> cons;  // sorted by stage
  std::vector<std::size_t> first;     // cons of stage k are [first[k], first[k+1])
};

// Returns false if a sample-0 condition (independent of the controls) fails.
bool build_problem(const OcpSpec & spec, const SolverSettings & settings, Problem & prob)
{
  const std::size_t n = spec.steps();
  const double dt = spec.dt;
  const double a = -spec.params.u_min;
  const double tol = settings.tolerance;
  prob.n = n;
  prob.dt = dt;
  prob.x0 = spec.x0;
  prob.v0 = spec.v0;
  prob.p0 = spec.u_prev;
  const double wscale = std::max(
    {std::abs(spec.weights.velocity), std::abs(spec.weights.accel), std::abs(spec.weights.jerk)});
  const double wnorm = wscale > 0.0 ? 1.0 / wscale : 1.0;
  prob.wv = spec.weights.velocity * wnorm;
  prob.wa = spec.weights.accel * wnorm;
  prob.wj = spec.weights.jerk * wnorm;
  prob.brake = a;

  if (spec.v0 < spec.params.v_min - tol || spec.v0 > spec.params.v_max + tol) return false;

  auto & cons = prob.cons;
  for (std::size_t k = 0; k <= n; ++k) {
    if (k < n) {
      cons.push_back({k, 0.0, 0.0, 1.0, 0.0, -spec.params.u_max});
      cons.push_back({k, 0.0, 0.0, -1.0, 0.0, spec.params.u_min});
    }
    if (k > 0) {
      cons.push_back({k, 0.0, 1.0, 0.0, 0.0, -spec.params.v_max});
      cons.push_back({k, 0.0, -1.0, 0.0, 0.0, spec.params.v_min});
    }
  }

  if (spec.entry_prevention) {
    // v^2 + a dt v + 2a (x + margin) <= 0, margin shrunk to the start slack.
    const double slack0 = -discrete_envelope(spec.x0, spec.v0, spec.params.u_min, dt);
    if (slack0 < -tol) return false;
    const double shift = std::min(2.0 * a * settings.stop_margin, slack0);
    for (std::size_t k = 1; k <= n; ++k) {
      cons.push_back({k, 2.0 * a, a * dt, 0.0, 1.0, shift});
    }
  }

  if (spec.leader) {
    const auto & lt = spec.leader->trajectory;
    const double off = (spec.t0 - lt.t0) / dt;
    if (std::abs(off - std::round(off)) > 1e-6 || std::lround(off) < 0) {
      throw ContractViolation("solve: leader trajectory is not on the spec grid");
    }
    const long shift = std::lround(off);
    const double base = spec.leader->length + spec.params.robustness;
    // Gap >= L + r and x + (v^2 + a dt v)/(2a) <= x_j + v_j^2/(2a) - L - r.
    const double xl0 = lt.position_at(shift);
    const double vl0 = lt.velocity_at(shift);
    const double g_lin0 = spec.x0 - xl0 + base;
    const double g_quad0 = spec.x0 + (spec.v0 * spec.v0 + a * dt * spec.v0) / (2.0 * a) - xl0 -
                           vl0 * vl0 / (2.0 * a) + base;
    if (g_lin0 > tol || g_quad0 > tol) return false;
    const double relax_lin = std::max(0.0, g_lin0);
    const double relax_quad = std::max(0.0, g_quad0);
    for (std::size_t k = 1; k <= n; ++k) {
      const double xl = lt.position_at(shift + static_cast<long>(k));
      const double vl = lt.velocity_at(shift + static_cast<long>(k));
      cons.push_back({k, 1.0, 0.0, 0.0, 0.0, -xl + base - relax_lin});
      cons.push_back(
        {k, 1.0, dt / 2.0, 0.0, 1.0 / (2.0 * a), -xl - vl * vl / (2.0 * a) + base - relax_quad});
    }
  }

  long k_entry = -1;
  if (spec.earliest_entry) {
    const double rel = (*spec.earliest_entry - spec.t0) / dt;
    k_entry = std::min(static_cast<long>(std::ceil(rel - 1e-9)), static_cast<long>(n));
    if (spec.x0 > tol) return false;
    const double margin = std::min(settings.entry_margin, -spec.x0);
    for (long k = 1; k <= k_entry; ++k) {
      cons.push_back({static_cast<std::size_t>(k), 1.0, 0.0, 0.0, 0.0, margin});
    }
  }

  std::optional<long> k_exit;
  if (spec.require_exit_by_horizon) k_exit = static_cast<long>(n);
  if (spec.exit_deadline) {
    const double rel = (*spec.exit_deadline - spec.t0) / dt;
    const long kd = static_cast<long>(std::floor(rel + 1e-9));
    k_exit = k_exit ? std::min(*k_exit, kd) : std::min(kd, static_cast<long>(n));
  }
  if (k_exit) {
    if (*k_exit < 0 || *k_exit <= k_entry) return false;
    if (*k_exit == 0) {
      if (spec.x0 < spec.span - tol) return false;
    } else {
      cons.push_back(
        {static_cast<std::size_t>(*k_exit), -1.0, 0.0, 0.0, 0.0, spec.span + settings.entry_margin});
    }
  }

  std::stable_sort(cons.begin(), cons.end(), [](const auto & l, const auto & r) { return l.k < r.k; });
  prob.first.assign(n + 2, 0);
  std::size_t c = 0;
  for (std::size_t k = 0; k <= n + 1; ++k) {
    while (c < cons.size() && cons[c].k < k) ++c;
    prob.first[k] = c;
  }
  return true;
}

class InteriorPointSolver
{
public:
  InteriorPointSolver(const Problem & prob, const SolverSettings & settings)
  : p_(prob), set_(settings)
  {
    const std::size_t n = p_.n;
    const std::size_t m = p_.cons.size();
    u_.assign(n, 0.0);
    x_.resize(n + 1);
    v_.resize(n + 1);
    g_.resize(m);
    s_.resize(m);
    lam_.resize(m);
    rp_.resize(m);
    rc_.resize(m);
    ds_.resize(m);
    dl_.resize(m);
    dg_.resize(m);
    huu_.resize(n);
    huz_.resize(n);
    gain_.resize(n);
    kf_.resize(n);
    du_.resize(n);
    dx_.resize(n + 1);
    dv_.resize(n + 1);
    grad_u_.resize(n);
    a_ << 1.0, p_.dt, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0;
    b_ << 0.5 * p_.dt * p_.dt, p_.dt, 1.0;
  }

  SolveStatus run(int & iterations, double & kkt)
  {
    const std::size_t m = p_.cons.size();
    // Braking keeps the envelope and rear-end constraints satisfied.
    double v = p_.v0;
    for (std::size_t k = 0; k < p_.n; ++k) {
      u_[k] = v > 0.0 ? std::max(-p_.brake, -v / p_.dt) : 0.0;
      v = std::max(0.0, v + u_[k] * p_.dt);
    }
    simulate();
    evaluate();
    for (std::size_t i = 0; i < m; ++i) {
      s_[i] = std::max(-g_[i], 1.0);
      lam_[i] = 1.0 / s_[i];
    }
    int stalled = 0;
    for (int it = 0; it <= set_.max_iterations; ++it) {
      iterations = it;
      residuals();
      const double mu = m > 0 ? dot(s_, lam_) / static_cast<double>(m) : 0.0;
      const double rd = dual_residual();
      const double rp = max_abs(rp_);
      kkt = std::max({rd, rp, mu});
      if (rd <= set_.tolerance && rp <= set_.primal_tolerance && mu <= 1e-2 * set_.tolerance) {
        return SolveStatus::Optimal;
      }
      double lam_peak = 0.0;
      for (double l : lam_) lam_peak = std::max(lam_peak, l);
      rp_history_.push_back(rp);
      bool stagnant = it >= 30;
      for (int j = std::max(0, it - 25); stagnant && j < it; ++j) {
        stagnant = rp > 0.99 * rp_history_[static_cast<std::size_t>(j)];
      }
      if (it >= 20 && rp > set_.primal_tolerance && (lam_peak > 1e10 || stalled >= 5 || stagnant)) {
        return SolveStatus::Infeasible;
      }
      if (it == set_.max_iterations) break;

      factor();
      // Affine-scaling probe picks the centering target.
      for (std::size_t i = 0; i < m; ++i) rc_[i] = s_[i] * lam_[i];
      direction();
      const double alpha_aff = step_to_boundary(1.0);
      double mu_aff = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        mu_aff += (s_[i] + alpha_aff * ds_[i]) * (lam_[i] + alpha_aff * dl_[i]);
      }
      mu_aff /= static_cast<double>(std::max<std::size_t>(m, 1));
      const double sigma = mu > 0.0 ? std::clamp(std::pow(mu_aff / mu, 3), 1e-4, 0.5) : 0.0;
      const double target = std::max(sigma * mu, std::min(0.5 * mu, 0.1 * std::max(rp, rd)));
      for (std::size_t i = 0; i < m; ++i) rc_[i] = s_[i] * lam_[i] - target;
      direction();

      const double merit0 = merit(target);
      const double alpha_max =
        std::min(1.0, 0.995 * step_to_boundary(std::numeric_limits<double>::infinity()));
      u_save_ = u_;
      s_save_ = s_;
      lam_save_ = lam_;
      double alpha = alpha_max;
      for (int bt = 0; bt < 40; ++bt) {
        for (std::size_t k = 0; k < p_.n; ++k) u_[k] = u_save_[k] + alpha * du_[k];
        for (std::size_t i = 0; i < m; ++i) {
          s_[i] = s_save_[i] + alpha * ds_[i];
          lam_[i] = lam_save_[i] + alpha * dl_[i];
        }
        simulate();
        evaluate();
        for (std::size_t i = 0; i < m; ++i) {
          if (g_[i] < 0.0) s_[i] = -g_[i];
        }
        residuals();
        dual_residual();
        if (merit(target) <= (1.0 - 0.01 * alpha) * merit0) break;
        alpha *= 0.5;
      }
      stalled = alpha < 1e-8 ? stalled + 1 : 0;
    }
    return SolveStatus::IterLimit;
  }

  const std::vector<double> & controls() const { return u_; }

private:
  static double dot(const std::vector<double> & a, const std::vector<double> & b)
  {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
  }

  static double max_abs(const std::vector<double> & a)
  {
    double out = 0.0;
    for (double v : a) out = std::max(out, std::abs(v));
    return out;
  }

  double prev_u(std::size_t k) const { return k == 0 ? p_.p0 : u_[k - 1]; }

  void simulate()
  {
    const double dt = p_.dt;
    x_[0] = p_.x0;
    v_[0] = p_.v0;
    for (std::size_t k = 0; k < p_.n; ++k) {
      v_[k + 1] = v_[k] + u_[k] * dt;
      x_[k + 1] = x_[k] + v_[k] * dt + 0.5 * u_[k] * dt * dt;
    }
  }

  double control(std::size_t k) const { return k < p_.n ? u_[k] : 0.0; }

  void evaluate()
  {
    for (std::size_t i = 0; i < p_.cons.size(); ++i) {
      const auto & c = p_.cons[i];
      const double v = v_[c.k];
      g_[i] = c.ax * x_[c.k] + c.av * v + c.au * control(c.k) + c.cvv * v * v + c.c0;
    }
  }

  void residuals()
  {
    for (std::size_t i = 0; i < p_.cons.size(); ++i) rp_[i] = g_[i] + s_[i];
  }

  // Stage gradient of the cost (x, v, p, u).
  void cost_gradient(std::size_t k, Vec3 & gz, double & gu) const
  {
    const double dt = p_.dt;
    const double jerk_diff = u_[k] - prev_u(k);
    gz << 0.0, -p_.wv * dt, -2.0 * p_.wj / dt * jerk_diff;
    gu = 2.0 * p_.wa * dt * u_[k] + 2.0 * p_.wj / dt * jerk_diff;
  }

  // Norm of the KKT residual with complementarity centered at `target`.
  double merit(double target) const
  {
    double acc = 0.0;
    for (double r : grad_u_) acc += r * r;
    for (std::size_t i = 0; i < rp_.size(); ++i) {
      const double rc = s_[i] * lam_[i] - target;
      acc += rp_[i] * rp_[i] + rc * rc;
    }
    return std::sqrt(acc);
  }

  double dual_residual()
  {
    const std::size_t n = p_.n;
    Vec3 costate = Vec3::Zero();
    double scale = 1.0;
    auto add_constraints = [&](std::size_t k, Vec3 & gz, double & gu) {
      for (std::size_t i = p_.first[k]; i < p_.first[k + 1]; ++i) {
        const auto & c = p_.cons[i];
        gz(0) += lam_[i] * c.ax;
        gz(1) += lam_[i] * (c.av + 2.0 * c.cvv * v_[k]);
        gu += lam_[i] * c.au;
      }
    };
    {
      Vec3 gz = Vec3::Zero();
      double gu = 0.0;
      add_constraints(n, gz, gu);
      costate = gz;
    }
    double worst = 0.0;
    for (std::size_t kk = n; kk-- > 0;) {
      Vec3 gz;
      double gu;
      cost_gradient(kk, gz, gu);
      scale = std::max({scale, std::abs(gu), gz.cwiseAbs().maxCoeff()});
      add_constraints(kk, gz, gu);
      grad_u_[kk] = gu + b_.dot(costate);
      worst = std::max(worst, std::abs(grad_u_[kk]));
      costate = gz + a_.transpose() * costate;
    }
    return worst / scale;
  }

  // Riccati factorization of the condensed Newton matrix; depends on s and lambda only.
  void factor()
  {
    const std::size_t n = p_.n;
    const double dt = p_.dt;
    Mat3 P = stage_hessian(n);
    for (std::size_t k = n; k-- > 0;) {
      Mat3 Q = stage_hessian(k);
      Vec3 S = Vec3::Zero();
      double R = 2.0 * p_.wa * dt + 2.0 * p_.wj / dt;
      Q(2, 2) += 2.0 * p_.wj / dt;
      S(2) += -2.0 * p_.wj / dt;
      for (std::size_t i = p_.first[k]; i < p_.first[k + 1]; ++i) {
        const auto & c = p_.cons[i];
        if (c.au == 0.0) continue;
        const double w = lam_[i] / s_[i];
        const Vec3 gz(c.ax, c.av + 2.0 * c.cvv * v_[k], 0.0);
        S += w * gz * c.au;
        R += w * c.au * c.au;
      }
      const Vec3 pb = P * b_;
      const double huu = R + b_.dot(pb);
      const Row3 huz = S.transpose() + pb.transpose() * a_;
      huu_[k] = huu;
      huz_[k] = huz;
      gain_[k] = -huz / huu;
      P = Q + a_.transpose() * P * a_ - huz.transpose() * huz / huu;
      P = 0.5 * (P + P.transpose()).eval();
    }
  }

  // State block of the stage Hessian (constraints without a control term).
  Mat3 stage_hessian(std::size_t k) const
  {
    Mat3 Q = Mat3::Zero();
    for (std::size_t i = p_.first[k]; i < p_.first[k + 1]; ++i) {
      const auto & c = p_.cons[i];
      const double w = lam_[i] / s_[i];
      const Vec3 gz(c.ax, c.av + 2.0 * c.cvv * v_[k], 0.0);
      Q += w * gz * gz.transpose();
      Q(1, 1) += 2.0 * lam_[i] * c.cvv;
    }
    return Q;
  }

  // Solves for (du, ds, dl) given rc_, using the stored factorization.
  void direction()
  {
    const std::size_t n = p_.n;
    auto stage_linear = [&](std::size_t k, Vec3 & q, double & r) {
      q.setZero();
      r = 0.0;
      if (k < n) cost_gradient(k, q, r);
      for (std::size_t i = p_.first[k]; i < p_.first[k + 1]; ++i) {
        const auto & c = p_.cons[i];
        const double coef = lam_[i] + (lam_[i] * rp_[i] - rc_[i]) / s_[i];
        q(0) += coef * c.ax;
        q(1) += coef * (c.av + 2.0 * c.cvv * v_[k]);
        r += coef * c.au;
      }
    };
    Vec3 pvec;
    double unused;
    stage_linear(n, pvec, unused);
    for (std::size_t k = n; k-- > 0;) {
      Vec3 q;
      double r;
      stage_linear(k, q, r);
      const double hu = r + b_.dot(pvec);
      kf_[k] = -hu / huu_[k];
      pvec = q + a_.transpose() * pvec + huz_[k].transpose() * kf_[k];
    }
    Vec3 dz = Vec3::Zero();
    for (std::size_t k = 0; k < n; ++k) {
      dx_[k] = dz(0);
      dv_[k] = dz(1);
      du_[k] = gain_[k].dot(dz) + kf_[k];
      dz = a_ * dz + b_ * du_[k];
    }
    dx_[n] = dz(0);
    dv_[n] = dz(1);
    for (std::size_t i = 0; i < p_.cons.size(); ++i) {
      const auto & c = p_.cons[i];
      const double dctl = c.k < n ? du_[c.k] : 0.0;
      dg_[i] = c.ax * dx_[c.k] + (c.av + 2.0 * c.cvv * v_[c.k]) * dv_[c.k] + c.au * dctl;
      ds_[i] = -rp_[i] - dg_[i];
      dl_[i] = (-rc_[i] - lam_[i] * ds_[i]) / s_[i];
    }
  }

  double step_to_boundary(double cap) const
  {
    double alpha = cap;
    for (std::size_t i = 0; i < s_.size(); ++i) {
      if (ds_[i] < 0.0) alpha = std::min(alpha, -s_[i] / ds_[i]);
      if (dl_[i] < 0.0) alpha = std::min(alpha, -lam_[i] / dl_[i]);
    }
    return alpha;
  }

  const Problem & p_;
  const SolverSettings & set_;
  Mat3 a_;
  Vec3 b_;
  std::vector<double> u_, x_, v_;
  std::vector<double> g_, s_, lam_, rp_, rc_;
  std::vector<double> ds_, dl_, dg_;
  std::vector<double> huu_;
  std::vector<Row3> huz_;
  std::vector<Row3> gain_;
  std::vector<double> kf_, du_, dx_, dv_, grad_u_;
  std::vector<double> u_save_, s_save_, lam_save_;
  std::vector<double> rp_history_;
};

}  // namespace

OcpSolution solve(const OcpSpec & spec, const SolverSettings & settings)
{
  spec.validate();
  OcpSolution out;
  Problem prob;
  const std::size_t n = spec.steps();
  if (!build_problem(spec, settings, prob)) {
    out.status = SolveStatus::Infeasible;
    out.trajectory = braking_trajectory(
      spec.t0, spec.x0, spec.v0, spec.u_prev, spec.dt, n, spec.params.u_min);
    out.objective = vehicle_objective(out.trajectory, spec.weights, spec.t0, spec.horizon);
    out.kkt_residual = std::numeric_limits<double>::infinity();
    return out;
  }
  InteriorPointSolver ipm(prob, settings);
  out.status = ipm.run(out.iterations, out.kkt_residual);
  out.trajectory = integrate(spec.x0, spec.v0, ipm.controls(), spec.dt, spec.t0, spec.u_prev);
  out.objective = vehicle_objective(out.trajectory, spec.weights, spec.t0, spec.horizon);
  return out;
}

SampledTrajectory braking_trajectory(
  double t0, double x0, double v0, double u_prev, double dt, std::size_t steps, double u_min)
{
  std::vector<double> u(steps, 0.0);
  double v = v0;
  for (std::size_t k = 0; k < steps; ++k) {
    u[k] = v > 0.0 ? std::max(u_min, -v / dt) : 0.0;
    v = std::max(0.0, v + u[k] * dt);
  }
  auto traj = integrate(x0, v0, u, dt, t0, u_prev);
  // -v/dt cancels v up to rounding; pin the stopped samples to exactly zero.
  for (std::size_t k = 1; k < traj.v.size(); ++k) {
    if (std::abs(traj.v[k]) < 1e-12) traj.v[k] = 0.0;
  }
  return traj;
}

OcpSolution hold_trajectory(const OcpSpec & spec, const SolverSettings & settings)
{
  OcpSpec held = spec;
  held.entry_prevention = true;
  held.earliest_entry.reset();
  held.require_exit_by_horizon = false;
  held.exit_deadline.reset();
  auto sol = solve(held, settings);
  if (sol.status != SolveStatus::Optimal) {
    sol.trajectory = braking_trajectory(
      held.t0, held.x0, held.v0, held.u_prev, held.dt, held.steps(), held.params.u_min);
    sol.objective = vehicle_objective(sol.trajectory, held.weights, held.t0, held.horizon);
    sol.fallback = true;
  }
  return sol;
}

FixedSequenceResult solve_fixed_sequence(
  std::span<const BatchVehicle> batch, std::span<const std::size_t> order,
  const ScheduledSet & scheduled, const LaneGeometry & geometry, const BatchContext & ctx)
{
  FixedSequenceResult result;
  result.solutions.resize(batch.size());
  std::vector<bool> fixed(batch.size(), false);
  ScheduledSet entries = scheduled;
  for (const std::size_t idx : order) {
    const auto & veh = batch[idx];
    OcpSpec spec;
    spec.t0 = ctx.t_coord;
    spec.horizon = ctx.horizon;
    spec.dt = ctx.dt;
    spec.x0 = veh.x0;
    spec.v0 = veh.v0;
    spec.u_prev = veh.u_prev;
    spec.weights = ctx.weights;
    spec.params = ctx.params;
    spec.span = geometry.span(veh.lane);
    spec.require_exit_by_horizon = true;

    std::optional<std::size_t> ahead;
    for (std::size_t j = 0; j < batch.size(); ++j) {
      if (j == idx || batch[j].lane != veh.lane || !(batch[j].x0 > veh.x0)) continue;
      if (!fixed[j]) {
        throw ContractViolation("solve_fixed_sequence: order breaks the in-lane order");
      }
      if (!ahead || batch[j].x0 < batch[*ahead].x0) ahead = j;
    }
    if (ahead) {
      spec.leader = Leader{result.solutions[*ahead].trajectory, batch[*ahead].length};
    } else {
      spec.leader = veh.external_leader;
    }

    double earliest = ctx.t_coord;
    for (const auto & e : entries) {
      if (geometry.incompatible(veh.lane, e.lane)) earliest = std::max(earliest, e.exit);
    }
    spec.earliest_entry = earliest;

    auto sol = solve(spec, ctx.settings);
    if (sol.status != SolveStatus::Optimal) {
      result.solutions[idx] = std::move(sol);
      result.feasible = false;
      return result;
    }
    const auto t_entry = crossing_time(sol.trajectory, 0.0);
    const auto t_exit = crossing_time(sol.trajectory, spec.span);
    ScheduleEntry entry{veh.id, veh.lane, t_entry.value_or(spec.t0), t_exit.value_or(sol.trajectory.t_end())};
    entries.push_back(entry);
    result.entries.push_back(entry);
    result.total_objective += sol.objective;
    result.solutions[idx] = std::move(sol);
    fixed[idx] = true;
  }
  result.feasible = true;
  return result;
}

}  // namespace aim
