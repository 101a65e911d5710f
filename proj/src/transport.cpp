#include "stablemf/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stablemf {

double TransportCost::operator()(double x, double y) const {
  if (kind == Kind::power_q) return std::pow(std::abs(x - y), q);
  const DistanceFunctionA a(q);
  return std::abs(a(x) - a(y));
}

double coupled_a_distance(std::span<const double> xs, std::span<const double> ys, double q) {
  if (xs.size() != ys.size()) throw std::invalid_argument("coupled_a_distance: length mismatch");
  if (xs.empty()) throw std::invalid_argument("coupled_a_distance: empty input");
  const DistanceFunctionA a(q);
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) s += std::abs(a(xs[i]) - a(ys[i]));
  return s / static_cast<double>(xs.size());
}

namespace {

void check_exact_inputs(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.size() != nu.size()) throw std::invalid_argument("exact transport needs equal atom counts");
  if (mu.size() == 0) throw std::invalid_argument("exact transport needs nonempty measures");
  if (mu.size() > kExactTransportLimit)
    throw std::length_error("oracle regime exceeded; use coupled_a_distance");
}

// Shortest augmenting path Hungarian method, O(n^3). Returns col_of_row.
std::vector<std::size_t> hungarian(const std::vector<double>& cost, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> row_of(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> col_of_row(n);
  for (std::size_t j = 1; j <= n; ++j) col_of_row[row_of[j] - 1] = j - 1;
  return col_of_row;
}

}  // namespace

std::vector<std::size_t> optimal_assignment(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                            TransportCost cost) {
  check_exact_inputs(mu, nu);
  const std::size_t n = mu.size();
  std::vector<double> c(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] = cost(mu.atoms[i], nu.atoms[j]);
  return hungarian(c, n);
}

double wasserstein_q_exact(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, TransportCost cost) {
  const auto perm = optimal_assignment(mu, nu, cost);
  double s = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) s += cost(mu.atoms[i], nu.atoms[perm[i]]);
  return s / static_cast<double>(perm.size());
}

double quantile_coupling_cost(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, TransportCost cost) {
  if (mu.size() == 0 || nu.size() == 0) throw std::invalid_argument("quantile coupling needs nonempty measures");
  std::vector<double> xs = mu.atoms, ys = nu.atoms;
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  // Breakpoints i/n and j/m in units of 1/(n m).
  const std::uint64_t n = xs.size(), m = ys.size();
  std::uint64_t i = 0, j = 0, pos = 0;
  double total = 0.0;
  while (i < n && j < m) {
    const std::uint64_t next = std::min((i + 1) * m, (j + 1) * n);
    total += static_cast<double>(next - pos) * cost(xs[i], ys[j]);
    pos = next;
    if (pos == (i + 1) * m) ++i;
    if (pos == (j + 1) * n) ++j;
  }
  return total / (static_cast<double>(n) * static_cast<double>(m));
}

double sorted_matching_cost(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
  if (p < 1.0) throw std::invalid_argument("sorted matching is optimal only for p >= 1");
  if (mu.size() != nu.size() || mu.size() == 0) throw std::invalid_argument("sorted matching needs equal nonempty sizes");
  std::vector<double> xs = mu.atoms, ys = nu.atoms;
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) s += std::pow(std::abs(xs[i] - ys[i]), p);
  return s / static_cast<double>(xs.size());
}

}  // namespace stablemf
