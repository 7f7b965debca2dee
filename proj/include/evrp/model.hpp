#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace evrp {

/// Absolute tolerance for real comparisons throughout the library.
inline constexpr double kTolerance = 1e-9;

/// One vehicle of the fleet; soc_start is a percentage of battery capacity.
struct Vehicle {
  std::string id;
  double soc_start = 100.0;
};

/// A routing instance over nodes 0..node_count-1. Node 0 is the depot, the
/// rest are customers. cost holds travel costs, energy holds battery
/// expenditure in percentage points of capacity, both indexed [from][to].
/// Neither matrix is assumed symmetric; no triangle inequality is assumed.
struct Instance {
  int node_count = 0;
  std::vector<std::vector<double>> cost;
  std::vector<std::vector<double>> energy;
  std::vector<Vehicle> vehicles;

  int vehicle_count() const { return static_cast<int>(vehicles.size()); }
  int customer_count() const { return node_count - 1; }
};

/// A broken invariant, named by the offending field.
struct Violation {
  std::string field;
  std::string message;
};

/// Customer visit order of one vehicle. The depot is implicit at both ends.
using Tour = std::vector<int>;

/// One closed tour per vehicle, listed in vehicle order.
struct Solution {
  std::vector<Tour> tours;
};

/// Per-vehicle end-of-route battery state plus the fleet DoD extremes.
/// dod[k] == 100 - soc_end[k] exactly.
struct FleetState {
  std::vector<double> soc_end;
  std::vector<double> dod;
  double dod_max = 0.0;
  double dod_min = 0.0;

  double spread() const { return dod_max - dod_min; }
};

namespace detail {

inline std::string index1(const std::string& name, int i) {
  return name + "[" + std::to_string(i) + "]";
}

inline std::string index2(const std::string& name, int i, int j) {
  return name + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

inline void check_matrix(const std::string& name,
                         const std::vector<std::vector<double>>& m, int n,
                         std::vector<Violation>& out) {
  if (static_cast<int>(m.size()) != n) {
    out.push_back({name, "expected " + std::to_string(n) + " rows, got " +
                             std::to_string(m.size())});
    return;
  }
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(m[i].size()) != n) {
      out.push_back({index1(name, i), "expected " + std::to_string(n) +
                                          " columns, got " +
                                          std::to_string(m[i].size())});
      continue;
    }
    for (int j = 0; j < n; ++j) {
      const double v = m[i][j];
      if (!std::isfinite(v)) {
        out.push_back({index2(name, i, j), "entry is not finite"});
      } else if (v < 0.0) {
        out.push_back({index2(name, i, j), "entry is negative"});
      } else if (i == j && v != 0.0) {
        out.push_back({index2(name, i, j), "diagonal entry must be zero"});
      }
    }
  }
}

}  // namespace detail

/// Checks every Instance invariant. Returns one violation per broken
/// invariant; an empty list means the instance is well formed.
inline std::vector<Violation> validate_instance(const Instance& inst) {
  std::vector<Violation> out;
  if (inst.node_count < 2) {
    out.push_back({"node_count", "need at least a depot and one customer"});
    return out;
  }
  detail::check_matrix("cost", inst.cost, inst.node_count, out);
  detail::check_matrix("energy", inst.energy, inst.node_count, out);
  if (inst.vehicles.empty()) {
    out.push_back({"vehicles", "fleet is empty"});
  } else if (inst.vehicle_count() > inst.customer_count()) {
    out.push_back({"vehicles",
                   "fleet size " + std::to_string(inst.vehicle_count()) +
                       " exceeds customer count " +
                       std::to_string(inst.customer_count()) +
                       "; every vehicle must serve at least one customer"});
  }
  for (int k = 0; k < inst.vehicle_count(); ++k) {
    const double soc = inst.vehicles[k].soc_start;
    if (!std::isfinite(soc) || soc < 0.0 || soc > 100.0) {
      out.push_back({detail::index1("vehicles", k) + ".soc_start",
                     "must lie in [0, 100]"});
    }
  }
  return out;
}

/// Result of a solution feasibility check.
struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;
};

/// Verifies that a solution visits every customer exactly once, gives every
/// vehicle a nonempty tour, and references only valid customer nodes.
inline FeasibilityReport check_feasibility(const Instance& inst,
                                           const Solution& sol) {
  FeasibilityReport report;
  auto fail = [&report](std::string field, std::string message) {
    report.feasible = false;
    report.violations.push_back({std::move(field), std::move(message)});
  };

  if (static_cast<int>(sol.tours.size()) != inst.vehicle_count()) {
    fail("tours", "expected one tour per vehicle (" +
                      std::to_string(inst.vehicle_count()) + "), got " +
                      std::to_string(sol.tours.size()));
    return report;
  }

  std::vector<int> visits(inst.node_count, 0);
  for (int k = 0; k < inst.vehicle_count(); ++k) {
    const Tour& tour = sol.tours[k];
    if (tour.empty()) {
      fail(detail::index1("tours", k), "tour is empty; vehicle must leave the depot");
      continue;
    }
    for (std::size_t p = 0; p < tour.size(); ++p) {
      const int node = tour[p];
      if (node <= 0 || node >= inst.node_count) {
        fail(detail::index1("tours", k) + "[" + std::to_string(p) + "]",
             node == 0 ? "depot may not appear inside a tour"
                       : "node index " + std::to_string(node) + " out of range");
        continue;
      }
      ++visits[node];
    }
  }
  for (int node = 1; node < inst.node_count; ++node) {
    if (visits[node] == 0) {
      fail(detail::index1("node", node), "customer is never visited");
    } else if (visits[node] > 1) {
      fail(detail::index1("node", node),
           "customer visited " + std::to_string(visits[node]) + " times");
    }
  }
  return report;
}

/// Arc-variable form of a solution: at(k, i, j) is true when vehicle k
/// travels the arc from node i to node j.
class ArcForm {
 public:
  ArcForm(int vehicle_count, int node_count)
      : vehicles_(vehicle_count),
        nodes_(node_count),
        bits_(static_cast<std::size_t>(vehicle_count) * node_count * node_count,
              0) {}

  int vehicle_count() const { return vehicles_; }
  int node_count() const { return nodes_; }

  bool at(int k, int i, int j) const { return bits_[index(k, i, j)] != 0; }
  void set(int k, int i, int j, bool value = true) {
    bits_[index(k, i, j)] = value ? 1 : 0;
  }

 private:
  std::size_t index(int k, int i, int j) const {
    return (static_cast<std::size_t>(k) * nodes_ + i) * nodes_ + j;
  }

  int vehicles_;
  int nodes_;
  std::vector<std::uint8_t> bits_;
};

/// Expands tours into the binary arc tensor, including the depot arcs that
/// open and close each tour.
inline ArcForm to_arc_form(const Solution& sol, int node_count) {
  ArcForm x(static_cast<int>(sol.tours.size()), node_count);
  for (int k = 0; k < x.vehicle_count(); ++k) {
    const Tour& tour = sol.tours[k];
    if (tour.empty()) continue;
    int prev = 0;
    for (int node : tour) {
      x.set(k, prev, node);
      prev = node;
    }
    x.set(k, prev, 0);
  }
  return x;
}

enum class ArcError {
  depot_departure_missing,
  degree_mismatch,
  subtour,
  customer_unvisited,
  customer_revisited,
};

/// Structural defect found while reconstructing tours from arc form.
struct ArcFormError : std::runtime_error {
  ArcFormError(ArcError kind, const std::string& message)
      : std::runtime_error(message), kind(kind) {}

  ArcError kind;
};

/// Rebuilds tours by walking each vehicle's arcs from the depot. Accepts a
/// tensor exactly when each vehicle's arcs form a single depot-rooted cycle
/// and the cycles cover every customer once; this is the structural
/// equivalent of requiring a subtour-elimination ordering to exist.
inline Solution from_arc_form(const ArcForm& x) {
  const int n = x.node_count();
  Solution sol;
  sol.tours.resize(x.vehicle_count());
  std::vector<int> visits(n, 0);

  for (int k = 0; k < x.vehicle_count(); ++k) {
    std::vector<int> next(n, -1);
    std::vector<int> in_degree(n, 0);
    std::vector<int> out_degree(n, 0);
    int arc_count = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (!x.at(k, i, j)) continue;
        if (i == j) {
          throw ArcFormError(ArcError::degree_mismatch,
                             "vehicle " + std::to_string(k) +
                                 " has a self-loop at node " + std::to_string(i));
        }
        ++arc_count;
        ++out_degree[i];
        ++in_degree[j];
        next[i] = j;
      }
    }
    if (out_degree[0] == 0) {
      throw ArcFormError(ArcError::depot_departure_missing,
                         "vehicle " + std::to_string(k) +
                             " never departs the depot");
    }
    for (int i = 0; i < n; ++i) {
      if (out_degree[i] > 1 || in_degree[i] > 1) {
        throw ArcFormError(ArcError::degree_mismatch,
                           "vehicle " + std::to_string(k) + " visits node " +
                               std::to_string(i) + " more than once");
      }
      if (out_degree[i] != in_degree[i]) {
        throw ArcFormError(ArcError::degree_mismatch,
                           "vehicle " + std::to_string(k) + " enters node " +
                               std::to_string(i) +
                               " a different number of times than it leaves");
      }
    }

    // Walk the depot cycle; any arc left over lies on a cycle avoiding the
    // depot.
    Tour tour;
    int node = next[0];
    int used = 1;
    while (node != 0) {
      tour.push_back(node);
      ++visits[node];
      node = next[node];
      ++used;
    }
    if (used != arc_count) {
      std::string nodes;
      for (int i = 1; i < n; ++i) {
        if (out_degree[i] > 0 &&
            std::find(tour.begin(), tour.end(), i) == tour.end()) {
          nodes += (nodes.empty() ? "" : ", ") + std::to_string(i);
        }
      }
      throw ArcFormError(ArcError::subtour,
                         "vehicle " + std::to_string(k) +
                             " has a cycle that avoids the depot through nodes {" +
                             nodes + "}");
    }
    sol.tours[k] = std::move(tour);
  }

  for (int node = 1; node < n; ++node) {
    if (visits[node] == 0) {
      throw ArcFormError(ArcError::customer_unvisited,
                         "customer " + std::to_string(node) + " is never visited");
    }
    if (visits[node] > 1) {
      throw ArcFormError(ArcError::customer_revisited,
                         "customer " + std::to_string(node) +
                             " is visited by more than one vehicle");
    }
  }
  return sol;
}

/// Route cost and battery state of one solution. energy_feasible is false
/// when some vehicle would finish below 0% SoC; such solutions are treated
/// as hard-infeasible by the search.
struct Evaluation {
  double route_cost = 0.0;
  FleetState fleet;
  bool energy_feasible = true;
};

/// Sums travel cost and battery expenditure along every closed tour.
/// soc_end[k] = soc_start[k] minus the energy of vehicle k's tour; DoD is
/// its complement to 100.
inline Evaluation evaluate(const Instance& inst, const Solution& sol) {
  Evaluation ev;
  const int k_count = static_cast<int>(sol.tours.size());
  ev.fleet.soc_end.resize(k_count);
  ev.fleet.dod.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    double spent = 0.0;
    int prev = 0;
    for (int node : sol.tours[k]) {
      ev.route_cost += inst.cost[prev][node];
      spent += inst.energy[prev][node];
      prev = node;
    }
    if (!sol.tours[k].empty()) {
      ev.route_cost += inst.cost[prev][0];
      spent += inst.energy[prev][0];
    }
    const double soc_end = inst.vehicles[k].soc_start - spent;
    ev.fleet.soc_end[k] = soc_end;
    ev.fleet.dod[k] = 100.0 - soc_end;
    if (soc_end < -kTolerance) ev.energy_feasible = false;
  }
  ev.fleet.dod_max = *std::max_element(ev.fleet.dod.begin(), ev.fleet.dod.end());
  ev.fleet.dod_min = *std::min_element(ev.fleet.dod.begin(), ev.fleet.dod.end());
  return ev;
}

}  // namespace evrp
