// Copyright 2026 The dis2 Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dis2/assignment.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <utility>

#include "dis2/error.h"

namespace dis2 {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sink-to-sink residual arcs. A source j shipping to sink c can be rerouted to
// sink k at marginal cost cost(j, k) - cost(j, c); arcs_[c][k] keeps those
// candidates ordered so the cheapest is at begin().
class RerouteArcs {
 public:
  RerouteArcs(const Matrix& cost, int64_t sinks)
      : cost_(cost), sinks_(sinks),
        arcs_(static_cast<size_t>(sinks * sinks)) {}

  void Add(int64_t j, int64_t c) {
    for (int64_t k = 0; k < sinks_; ++k) {
      if (k != c) Arc(c, k).emplace(cost_(j, k) - cost_(j, c), j);
    }
  }

  void Remove(int64_t j, int64_t c) {
    for (int64_t k = 0; k < sinks_; ++k) {
      if (k != c) Arc(c, k).erase({cost_(j, k) - cost_(j, c), j});
    }
  }

  // Cheapest reroute c -> k, or nullptr if no source ships to c.
  const std::pair<double, int64_t>* Best(int64_t c, int64_t k) const {
    const auto& s = arcs_[static_cast<size_t>(c * sinks_ + k)];
    return s.empty() ? nullptr : &*s.begin();
  }

 private:
  std::set<std::pair<double, int64_t>>& Arc(int64_t c, int64_t k) {
    return arcs_[static_cast<size_t>(c * sinks_ + k)];
  }

  const Matrix& cost_;
  int64_t sinks_;
  std::vector<std::set<std::pair<double, int64_t>>> arcs_;
};

}  // namespace

AssignmentResult SolveAssignment(const Matrix& cost) {
  const auto n = static_cast<size_t>(cost.rows());
  if (cost.rows() != cost.cols()) {
    Fail(ErrorKind::kShape, "assignment needs a square cost matrix");
  }
  RequireFinite(cost, "assignment cost");
  AssignmentResult out;
  out.column_of_row.assign(n, -1);
  if (n == 0) return out;

  // 1-based potentials; column 0 is a virtual start.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
  std::vector<size_t> row_of_col(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (size_t i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    size_t j0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const size_t i0 = row_of_col[j0];
      double delta = kInf;
      size_t j1 = 0;
      for (size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1),
                                static_cast<Eigen::Index>(j - 1)) -
                           u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (size_t j = 1; j <= n; ++j) {
    out.column_of_row[row_of_col[j] - 1] = static_cast<int>(j - 1);
  }
  for (size_t i = 0; i < n; ++i) {
    out.cost += cost(static_cast<Eigen::Index>(i), out.column_of_row[i]);
  }
  return out;
}

TransportResult SolveTransport(const Matrix& cost,
                               std::span<const int64_t> source_mass,
                               std::span<const int64_t> sink_mass) {
  const int64_t n = cost.rows();
  const int64_t sinks = cost.cols();
  if (static_cast<int64_t>(source_mass.size()) != n ||
      static_cast<int64_t>(sink_mass.size()) != sinks) {
    Fail(ErrorKind::kShape, "transport: mass vectors do not match cost shape");
  }
  RequireFinite(cost, "transport cost");
  for (int64_t a : source_mass) {
    if (a < 0) Fail(ErrorKind::kDomain, "transport: negative mass");
  }
  for (int64_t a : sink_mass) {
    if (a < 0) Fail(ErrorKind::kDomain, "transport: negative mass");
  }
  if (std::accumulate(source_mass.begin(), source_mass.end(), int64_t{0}) !=
      std::accumulate(sink_mass.begin(), sink_mass.end(), int64_t{0})) {
    Fail(ErrorKind::kDomain, "transport: unbalanced masses");
  }

  TransportResult out;
  out.flow.assign(static_cast<size_t>(n),
                  std::vector<int64_t>(static_cast<size_t>(sinks), 0));
  std::vector<int64_t> deficit(sink_mass.begin(), sink_mass.end());
  RerouteArcs arcs(cost, sinks);

  auto set_flow = [&](int64_t j, int64_t c, int64_t value) {
    int64_t& f = out.flow[static_cast<size_t>(j)][static_cast<size_t>(c)];
    if (f == 0 && value > 0) arcs.Add(j, c);
    if (f > 0 && value == 0) arcs.Remove(j, c);
    f = value;
  };

  std::vector<double> dist(static_cast<size_t>(sinks));
  // pred[k] = (previous sink, rerouted source) or (-1, -1) for the direct arc.
  std::vector<std::pair<int64_t, int64_t>> pred(static_cast<size_t>(sinks));
  for (int64_t i = 0; i < n; ++i) {
    int64_t excess = source_mass[static_cast<size_t>(i)];
    while (excess > 0) {
      for (int64_t k = 0; k < sinks; ++k) {
        dist[static_cast<size_t>(k)] = cost(i, k);
        pred[static_cast<size_t>(k)] = {-1, -1};
      }
      // Bellman-Ford over sinks. The residual graph has no negative cycles,
      // so sinks-1 rounds suffice.
      for (int64_t round = 1; round < sinks; ++round) {
        bool changed = false;
        for (int64_t c = 0; c < sinks; ++c) {
          for (int64_t k = 0; k < sinks; ++k) {
            if (k == c) continue;
            const auto* arc = arcs.Best(c, k);
            if (!arc) continue;
            const double cand = dist[static_cast<size_t>(c)] + arc->first;
            if (cand < dist[static_cast<size_t>(k)] - 1e-13) {
              dist[static_cast<size_t>(k)] = cand;
              pred[static_cast<size_t>(k)] = {c, arc->second};
              changed = true;
            }
          }
        }
        if (!changed) break;
      }
      int64_t target = -1;
      for (int64_t k = 0; k < sinks; ++k) {
        if (deficit[static_cast<size_t>(k)] > 0 &&
            (target < 0 ||
             dist[static_cast<size_t>(k)] < dist[static_cast<size_t>(target)])) {
          target = k;
        }
      }
      if (target < 0) Fail(ErrorKind::kDomain, "transport: no sink capacity");

      // Walk the path back to find the bottleneck, then push flow.
      int64_t amount = std::min(excess, deficit[static_cast<size_t>(target)]);
      int64_t k = target;
      int64_t hops = 0;
      while (pred[static_cast<size_t>(k)].first >= 0) {
        const auto [c, j] = pred[static_cast<size_t>(k)];
        amount = std::min(
            amount, out.flow[static_cast<size_t>(j)][static_cast<size_t>(c)]);
        k = c;
        if (++hops > sinks) {
          Fail(ErrorKind::kDomain, "transport: cyclic shortest-path tree");
        }
      }
      const int64_t first = k;
      k = target;
      while (pred[static_cast<size_t>(k)].first >= 0) {
        const auto [c, j] = pred[static_cast<size_t>(k)];
        set_flow(j, c,
                 out.flow[static_cast<size_t>(j)][static_cast<size_t>(c)] -
                     amount);
        set_flow(j, k,
                 out.flow[static_cast<size_t>(j)][static_cast<size_t>(k)] +
                     amount);
        k = c;
      }
      set_flow(i, first,
               out.flow[static_cast<size_t>(i)][static_cast<size_t>(first)] +
                   amount);
      excess -= amount;
      deficit[static_cast<size_t>(target)] -= amount;
    }
  }

  for (int64_t i = 0; i < n; ++i) {
    for (int64_t k = 0; k < sinks; ++k) {
      const int64_t f = out.flow[static_cast<size_t>(i)][static_cast<size_t>(k)];
      if (f) out.cost += static_cast<double>(f) * cost(i, k);
    }
  }
  return out;
}

}  // namespace dis2
