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

#ifndef TARMA__CRITICAL_VALUES_HPP_
#define TARMA__CRITICAL_VALUES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tarma/core.hpp"
#include "tarma/error.hpp"
#include "tarma/rng.hpp"

namespace tarma
{

enum class CvSource
{
  table,
  simulated,
};

/// Rows (dim, pi0, alpha, value) of the sup-LM critical-value table.
class CriticalValueTable
{
public:
  struct Entry
  {
    int dim;
    double pi0;
    double alpha;
    double value;
  };

  CriticalValueTable() = default;
  explicit CriticalValueTable(std::vector<Entry> entries)
  : entries_(std::move(entries)) {}

  /// Reads a CSV with header `dim,pi0,alpha,value`.
  static CriticalValueTable load(const std::string & path)
  {
    std::ifstream in(path);
    if (!in) {throw DataError("cannot open critical-value table: " + path);}
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "dim,pi0,alpha,value") {
      throw DataError("critical-value table must start with header dim,pi0,alpha,value");
    }
    std::vector<Entry> entries;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (detail::trim(line).empty()) {continue;}
      const auto cells = detail::split_csv_line(line);
      if (cells.size() != 4) {
        throw DataError("critical-value table line " + std::to_string(line_no) + " needs 4 cells");
      }
      std::optional<double> v[4];
      for (int i = 0; i < 4; ++i) {v[i] = detail::parse_number(cells[i]);}
      if (!v[0] || !v[1] || !v[2] || !v[3]) {
        throw DataError("non-numeric cell in critical-value table line " + std::to_string(line_no));
      }
      entries.push_back({static_cast<int>(*v[0]), *v[1], *v[2], *v[3]});
    }
    return CriticalValueTable(std::move(entries));
  }

  std::optional<double> lookup(int dim, double pi0, double alpha) const
  {
    for (const auto & e : entries_) {
      if (e.dim == dim && std::abs(e.pi0 - pi0) < 1e-9 && std::abs(e.alpha - alpha) < 1e-9) {
        return e.value;
      }
    }
    return std::nullopt;
  }

  const std::vector<Entry> & entries() const noexcept {return entries_;}
  bool empty() const noexcept {return entries_.empty();}

private:
  std::vector<Entry> entries_;
};

/// Location of the shipped table: $TARMA_CV_TABLE, else the build-time data directory.
inline std::string default_table_path()
{
  if (const char * env = std::getenv("TARMA_CV_TABLE"); env && *env) {return env;}
#ifdef TARMA_DATA_DIR
  return std::string(TARMA_DATA_DIR) + "/andrews_critical_values.csv";
#else
  return "data/andrews_critical_values.csv";
#endif
}

/// Shipped table, loaded once; empty when the file is unavailable.
inline const CriticalValueTable & default_table()
{
  static const CriticalValueTable table = [] {
      try {
        return CriticalValueTable::load(default_table_path());
      } catch (const DataError &) {
        return CriticalValueTable{};
      }
    }();
  return table;
}

/// Discretized covariance kernel of the limiting Gaussian process on a grid.
/// Block (i, j) of `cov` is Sigma(r_i, r_j) = L22(r_i ^ r_j) - L21(r_i) L11^{-1} L12(r_j).
struct SupKernel
{
  int dim = 1;
  std::vector<double> r;
  Eigen::MatrixXd cov;
};

/// Assembles the kernel from Lambda blocks evaluated at sorted grid points.
inline SupKernel build_kernel(
  const std::vector<double> & r, const Eigen::MatrixXd & lambda11,
  const std::vector<Eigen::MatrixXd> & lambda12, const std::vector<Eigen::MatrixXd> & lambda22)
{
  const std::size_t g = r.size();
  if (g == 0 || lambda12.size() != g || lambda22.size() != g) {
    throw std::invalid_argument("kernel blocks must match the grid");
  }
  for (std::size_t i = 1; i < g; ++i) {
    if (!(r[i] > r[i - 1])) {throw std::invalid_argument("kernel grid must be increasing");}
  }
  const auto k = lambda22[0].rows();
  Eigen::LLT<Eigen::MatrixXd> l11(lambda11);
  if (l11.info() != Eigen::Success) {throw NumericError("Lambda11 is not positive definite");}
  std::vector<Eigen::MatrixXd> G(g);
  for (std::size_t i = 0; i < g; ++i) {G[i] = l11.matrixL().solve(lambda12[i]);}
  SupKernel out;
  out.dim = static_cast<int>(k);
  out.r = r;
  out.cov.resize(static_cast<Eigen::Index>(g) * k, static_cast<Eigen::Index>(g) * k);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = i; j < g; ++j) {
      const Eigen::MatrixXd block = lambda22[i] - G[i].transpose() * G[j];
      const auto bi = static_cast<Eigen::Index>(i) * k;
      const auto bj = static_cast<Eigen::Index>(j) * k;
      out.cov.block(bi, bj, k, k) = block;
      out.cov.block(bj, bi, k, k) = block.transpose();
    }
  }
  return out;
}

/// Sorted draws of sup_i xi_i' Sigma(r_i, r_i)^{-1} xi_i with xi ~ N(0, cov).
inline std::vector<double> simulate_sup_distribution(
  const SupKernel & kernel, int n_sim, std::uint64_t seed)
{
  if (n_sim < 1) {throw std::invalid_argument("n_sim must be positive");}
  const Eigen::Index m = kernel.cov.rows();
  const Eigen::Index k = kernel.dim;
  const Eigen::Index g = m / k;
  Eigen::MatrixXd cov = 0.5 * (kernel.cov + kernel.cov.transpose());
  const double ridge = 1e-10 * std::max(cov.diagonal().maxCoeff(), 1e-300);
  cov.diagonal().array() += ridge;

  Eigen::MatrixXd factor;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    factor = llt.matrixL();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const double tol = 1e-8 * cov.trace();
    if (es.eigenvalues().minCoeff() < -tol) {
      throw NumericError("kernel matrix is not positive semidefinite");
    }
    factor = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  std::vector<Eigen::LLT<Eigen::MatrixXd>> diag_llt;
  diag_llt.reserve(static_cast<std::size_t>(g));
  for (Eigen::Index i = 0; i < g; ++i) {
    diag_llt.emplace_back(cov.block(i * k, i * k, k, k));
    if (diag_llt.back().info() != Eigen::Success) {
      throw NumericError("kernel diagonal block is not positive definite");
    }
  }

  GaussianSampler z(seed);
  std::vector<double> draws(static_cast<std::size_t>(n_sim));
  Eigen::VectorXd zz(m);
  for (int s = 0; s < n_sim; ++s) {
    for (Eigen::Index i = 0; i < m; ++i) {zz[i] = z();}
    const Eigen::VectorXd xi = factor * zz;
    double best = 0.0;
    for (Eigen::Index i = 0; i < g; ++i) {
      const Eigen::VectorXd seg = xi.segment(i * k, k);
      best = std::max(best, seg.dot(diag_llt[static_cast<std::size_t>(i)].solve(seg)));
    }
    draws[static_cast<std::size_t>(s)] = best;
  }
  std::sort(draws.begin(), draws.end());
  return draws;
}

/// Empirical (1 - alpha) quantile: order statistic ceil((1 - alpha) N) of sorted draws.
inline double quantile_from_draws(const std::vector<double> & sorted, double alpha)
{
  if (sorted.empty()) {throw std::invalid_argument("no draws");}
  if (!(alpha > 0.0 && alpha < 1.0)) {throw std::invalid_argument("alpha must lie in (0, 1)");}
  const double n = static_cast<double>(sorted.size());
  auto idx = static_cast<std::size_t>(std::ceil((1.0 - alpha) * n - 1e-9));
  idx = std::clamp<std::size_t>(idx, 1, sorted.size());
  return sorted[idx - 1];
}

/// Add-one p-value (count + 1) / (N + 1) of draws at or above `observed`.
inline double p_value_from_draws(const std::vector<double> & sorted, double observed)
{
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), observed);
  const auto count = static_cast<double>(std::distance(it, sorted.end()));
  return (count + 1.0) / (static_cast<double>(sorted.size()) + 1.0);
}

inline double simulated_p_value(
  double observed, const SupKernel & kernel, int n_sim, std::uint64_t seed)
{
  return p_value_from_draws(simulate_sup_distribution(kernel, n_sim, seed), observed);
}

/// Critical value from the table or from kernel simulation.
inline double critical_value(
  int dim, double pi0, double alpha, CvSource source, const SupKernel * kernel = nullptr,
  int n_sim = 2000, std::uint64_t seed = 1, const CriticalValueTable & table = default_table())
{
  if (source == CvSource::table) {
    const auto v = table.lookup(dim, pi0, alpha);
    if (!v) {
      throw DataError(
              "no table entry for dim=" + std::to_string(dim) + " pi0=" + detail::format_double(pi0) +
              " alpha=" + detail::format_double(alpha));
    }
    return *v;
  }
  if (!kernel) {throw std::invalid_argument("simulated critical values need a kernel");}
  if (kernel->dim != dim) {throw std::invalid_argument("kernel dimension mismatch");}
  return quantile_from_draws(simulate_sup_distribution(*kernel, n_sim, seed), alpha);
}

}  // namespace tarma

#endif  // TARMA__CRITICAL_VALUES_HPP_
