// Copyright 2026 The tarmagarch Authors
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

#ifndef TARMA__OPTIMIZE_HPP_
#define TARMA__OPTIMIZE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include <Eigen/Dense>

namespace tarma
{

struct BfgsOptions
{
  int max_iterations = 500;
  double f_rel_tol = 1e-8;
  double grad_tol = 1e-6;
  double fd_step = 1e-5;  // relative central-difference step
};

struct BfgsResult
{
  Eigen::VectorXd x;
  double f = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

/// Central finite-difference gradient.
template<typename F>
Eigen::VectorXd fd_gradient(F & f, const Eigen::VectorXd & x, double rel_step)
{
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * (1.0 + std::abs(x[i]));
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
    if (!std::isfinite(g[i])) {g[i] = 0.0;}
  }
  return g;
}

/// Quasi-Newton minimization with an inverse-Hessian BFGS update and Armijo
/// backtracking. `f` maps an Eigen::VectorXd to a double; +inf marks infeasible points.
template<typename F>
BfgsResult bfgs_minimize(F && f, Eigen::VectorXd x0, const BfgsOptions & opts = {})
{
  const Eigen::Index k = x0.size();
  BfgsResult res;
  res.x = std::move(x0);
  res.f = f(res.x);
  if (!std::isfinite(res.f)) {return res;}
  if (k == 0) {
    res.converged = true;
    return res;
  }

  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(k, k);
  Eigen::VectorXd g = fd_gradient(f, res.x, opts.fd_step);
  bool fresh_h = true;

  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    if (g.lpNorm<Eigen::Infinity>() < opts.grad_tol) {
      res.converged = true;
      return res;
    }
    Eigen::VectorXd dir = -H * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      H.setIdentity();
      fresh_h = true;
      dir = -g;
      slope = -g.squaredNorm();
    }

    double step = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = res.x + step * dir;
      f_new = f(x_new);
      if (std::isfinite(f_new) && f_new <= res.f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!fresh_h) {
        H.setIdentity();
        fresh_h = true;
        continue;
      }
      // No descent along the steepest direction: gradient is at noise level.
      res.converged = g.lpNorm<Eigen::Infinity>() < 1e-3;
      return res;
    }

    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd g_new = fd_gradient(f, x_new, opts.fd_step);
    const Eigen::VectorXd y = g_new - g;
    const double f_old = res.f;
    res.x = x_new;
    res.f = f_new;
    g = g_new;

    if (std::abs(f_old - f_new) <= opts.f_rel_tol * std::max(std::abs(f_new), 1e-300)) {
      res.converged = true;
      return res;
    }

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh_h) {
        H *= sy / y.squaredNorm();
        fresh_h = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd Hy = H * y;
      H += ((sy + y.dot(Hy)) * rho * rho) * (s * s.transpose()) -
        rho * (Hy * s.transpose() + s * Hy.transpose());
    }
  }
  return res;
}

}  // namespace tarma

#endif  // TARMA__OPTIMIZE_HPP_
