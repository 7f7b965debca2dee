#pragma once

#include <chrono>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evrp/degradation.hpp"
#include "evrp/model.hpp"

namespace evrp {

/// Search knobs. The defaults give an exhaustive, provably optimal search.
struct SolverConfig {
  std::optional<long long> node_limit;  // abort after this many search nodes
  double tolerance = kTolerance;        // objective comparison tolerance
};

struct SearchStats {
  long long nodes_explored = 0;
  long long nodes_pruned = 0;
  long long solutions_evaluated = 0;
  double wall_seconds = 0.0;
};

struct SolveResult {
  Solution solution;
  double objective = 0.0;
  double route_cost = 0.0;
  FleetState fleet;
  SearchStats stats;
  bool proven_optimal = false;
};

enum class SolveErrorKind {
  infeasible,                  // no energy-feasible route plan exists
  node_limit_before_solution,  // search aborted before finding any plan
};

struct SolveError : std::runtime_error {
  SolveError(SolveErrorKind kind, const std::string& message,
             std::string binding_vehicle = {})
      : std::runtime_error(message),
        kind(kind),
        binding_vehicle(std::move(binding_vehicle)) {}

  SolveErrorKind kind;
  std::string binding_vehicle;  // vehicle closest to feasible, for diagnostics
};

/// Canonical order on solutions: the vehicle-indexed tour lists compared
/// lexicographically. Objective ties are broken toward the smaller solution.
inline bool canonical_less(const Solution& a, const Solution& b) {
  return a.tours < b.tours;
}

/// A prefix of a route plan under construction. Vehicles before closed_count
/// carry finished closed tours; the vehicle at closed_count carries an open
/// prefix (possibly empty); vehicles after it are untouched.
struct PartialState {
  std::vector<Tour> tours;
  int closed_count = 0;

  bool complete(int vehicle_count) const { return closed_count >= vehicle_count; }
};

namespace detail {

/// min over j != i of cost[i][j], for every customer i.
inline std::vector<double> cheapest_outgoing(const Instance& inst) {
  std::vector<double> out(inst.node_count, 0.0);
  for (int i = 1; i < inst.node_count; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < inst.node_count; ++j) {
      if (j != i) best = std::min(best, inst.cost[i][j]);
    }
    out[i] = best;
  }
  return out;
}

/// Floor of the penalty term over all complete solutions. Zero for the base
/// and quadratic variants; for linear_min_dod, minus the largest DoD any
/// vehicle could feasibly reach (capped at 100).
inline double penalty_floor(const Instance& inst, const ObjectiveSpec& spec) {
  if (spec.variant != ObjectiveVariant::linear_min_dod) return 0.0;
  // A tour departs the depot once and each customer it serves once, so its
  // energy is at most one depot row maximum plus every customer row maximum.
  double max_spend = 0.0;
  for (int i = 0; i < inst.node_count; ++i) {
    double row_max = 0.0;
    for (int j = 0; j < inst.node_count; ++j) {
      if (j != i) row_max = std::max(row_max, inst.energy[i][j]);
    }
    max_spend += row_max;
  }
  double max_dod = 0.0;
  for (const Vehicle& v : inst.vehicles) {
    const double reachable = 100.0 - v.soc_start + std::min(v.soc_start, max_spend);
    max_dod = std::max(max_dod, reachable);
  }
  return -std::min(100.0, max_dod);
}

/// Depth-first enumeration of route plans: the open vehicle's tour is either
/// closed or extended by one unrouted customer, in a fixed deterministic
/// order. With bounding enabled the enumeration prunes on an admissible
/// objective bound and on committed energy overdraw; with bounding disabled
/// it visits and evaluates every complete plan, which is the oracle mode.
class Search {
 public:
  Search(const Instance& inst, const ObjectiveSpec& spec, double tolerance,
         bool bounding, std::optional<long long> node_limit)
      : inst_(inst),
        spec_(spec),
        tol_(tolerance),
        bounding_(bounding),
        node_limit_(node_limit),
        n_(inst.node_count),
        vehicle_count_(inst.vehicle_count()),
        cheapest_out_(cheapest_outgoing(inst)),
        alpha_floor_(spec.alpha * penalty_floor(inst, spec)),
        routed_(inst.node_count, 0) {
    current_.tours.resize(vehicle_count_);
    for (int c = 1; c < n_; ++c) remaining_sum_ += cheapest_out_[c];
  }

  void run() {
    const auto start = std::chrono::steady_clock::now();
    dfs();
    stats_.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
  }

  bool has_incumbent() const { return has_incumbent_; }
  bool limit_hit() const { return limit_hit_; }
  const SearchStats& stats() const { return stats_; }

  SolveResult result(bool proven_optimal) const {
    SolveResult res;
    res.solution = inc_solution_;
    res.objective = inc_objective_;
    res.route_cost = inc_eval_.route_cost;
    res.fleet = inc_eval_.fleet;
    res.stats = stats_;
    res.proven_optimal = proven_optimal;
    return res;
  }

  /// Vehicle that came closest to finishing above 0% SoC, for diagnostics.
  int deficit_vehicle() const { return deficit_vehicle_; }
  double best_deficit() const { return best_deficit_; }

 private:
  void dfs() {
    if (limit_hit_) return;
    ++stats_.nodes_explored;
    if (node_limit_ && stats_.nodes_explored > *node_limit_) {
      limit_hit_ = true;
      return;
    }
    if (open_vehicle_ == vehicle_count_) {
      leaf();
      return;
    }

    Tour& tour = current_.tours[open_vehicle_];
    const int last = tour.empty() ? 0 : tour.back();
    const double soc_start = inst_.vehicles[open_vehicle_].soc_start;
    const int vehicles_after = vehicle_count_ - open_vehicle_ - 1;
    const int unrouted = (n_ - 1) - routed_count_;

    // Close the open tour. Legal when it is nonempty and the vehicles still
    // to come can each take at least one of the remaining customers.
    const bool close_legal =
        !tour.empty() && (vehicles_after == 0 ? unrouted == 0
                                              : unrouted >= vehicles_after);
    if (close_legal) {
      const double close_cost = committed_cost_ + inst_.cost[last][0];
      const double close_energy = open_energy_ + inst_.energy[last][0];
      if (bounding_ && soc_start - close_energy < -tol_) {
        note_deficit(open_vehicle_, close_energy - soc_start);
        ++stats_.nodes_pruned;
      } else if (pruned_by_bound(close_cost + remaining_sum_)) {
        ++stats_.nodes_pruned;
      } else {
        const double saved_cost = committed_cost_;
        const double saved_energy = open_energy_;
        committed_cost_ = close_cost;
        open_energy_ = 0.0;
        ++open_vehicle_;
        dfs();
        --open_vehicle_;
        open_energy_ = saved_energy;
        committed_cost_ = saved_cost;
      }
    }

    // Extend the open tour by one unrouted customer, in index order. Futile
    // when that would leave too few customers for the remaining vehicles.
    if (unrouted - 1 < vehicles_after) return;
    for (int c = 1; c < n_; ++c) {
      if (routed_[c]) continue;
      const double new_energy = open_energy_ + inst_.energy[last][c];
      if (bounding_ && soc_start - new_energy < -tol_) {
        note_deficit(open_vehicle_, new_energy - soc_start);
        ++stats_.nodes_pruned;
        continue;
      }
      const double new_cost = committed_cost_ + inst_.cost[last][c];
      const double new_remaining = remaining_sum_ - cheapest_out_[c];
      if (pruned_by_bound(new_cost + new_remaining)) {
        ++stats_.nodes_pruned;
        continue;
      }
      const double saved_cost = committed_cost_;
      const double saved_energy = open_energy_;
      const double saved_remaining = remaining_sum_;
      tour.push_back(c);
      routed_[c] = 1;
      ++routed_count_;
      committed_cost_ = new_cost;
      open_energy_ = new_energy;
      remaining_sum_ = new_remaining;
      dfs();
      remaining_sum_ = saved_remaining;
      open_energy_ = saved_energy;
      committed_cost_ = saved_cost;
      --routed_count_;
      routed_[c] = 0;
      tour.pop_back();
    }
  }

  bool pruned_by_bound(double committed_and_remaining) const {
    return bounding_ && has_incumbent_ &&
           committed_and_remaining + alpha_floor_ > inc_objective_ + tol_;
  }

  void leaf() {
    ++stats_.solutions_evaluated;
    const Evaluation ev = evaluate(inst_, current_);
    if (!ev.energy_feasible) {
      int worst_k = 0;
      double deficit = 0.0;
      for (int k = 0; k < vehicle_count_; ++k) {
        if (-ev.fleet.soc_end[k] > deficit) {
          deficit = -ev.fleet.soc_end[k];
          worst_k = k;
        }
      }
      note_deficit(worst_k, deficit);
      return;
    }
    const double obj = total_objective(spec_, ev.route_cost, ev.fleet);
    const bool better = !has_incumbent_ || obj < inc_objective_ - tol_;
    const bool tied_smaller = has_incumbent_ && obj <= inc_objective_ + tol_ &&
                              canonical_less(current_, inc_solution_);
    if (better || tied_smaller) {
      has_incumbent_ = true;
      inc_objective_ = obj;
      inc_eval_ = ev;
      inc_solution_ = current_;
    }
  }

  void note_deficit(int vehicle, double deficit) {
    if (deficit < best_deficit_) {
      best_deficit_ = deficit;
      deficit_vehicle_ = vehicle;
    }
  }

  const Instance& inst_;
  ObjectiveSpec spec_;
  double tol_;
  bool bounding_;
  std::optional<long long> node_limit_;

  int n_;
  int vehicle_count_;
  std::vector<double> cheapest_out_;
  double alpha_floor_;

  Solution current_;
  std::vector<char> routed_;
  int open_vehicle_ = 0;
  int routed_count_ = 0;
  double committed_cost_ = 0.0;
  double open_energy_ = 0.0;
  double remaining_sum_ = 0.0;

  bool has_incumbent_ = false;
  double inc_objective_ = std::numeric_limits<double>::infinity();
  Evaluation inc_eval_;
  Solution inc_solution_;

  SearchStats stats_;
  bool limit_hit_ = false;

  double best_deficit_ = std::numeric_limits<double>::infinity();
  int deficit_vehicle_ = 0;
};

inline void require_valid(const Instance& inst, const char* who) {
  const auto violations = validate_instance(inst);
  if (!violations.empty()) {
    throw std::invalid_argument(std::string(who) + ": invalid instance: " +
                                violations.front().field + ": " +
                                violations.front().message);
  }
}

[[noreturn]] inline void throw_no_solution(const Instance& inst,
                                           const Search& search) {
  if (search.limit_hit()) {
    throw SolveError(SolveErrorKind::node_limit_before_solution,
                     "node limit reached before any feasible plan was found");
  }
  const std::string vehicle = inst.vehicles[search.deficit_vehicle()].id;
  throw SolveError(
      SolveErrorKind::infeasible,
      "no energy-feasible route plan exists; vehicle '" + vehicle +
          "' is binding (would finish " + std::to_string(search.best_deficit()) +
          " percentage points below 0% SoC on its best candidate)",
      vehicle);
}

}  // namespace detail

/// Admissible objective bound for every completion of a partial plan:
/// committed route cost, plus each unrouted customer's cheapest outgoing
/// arc, plus the weighted penalty floor. Exact for complete plans.
inline double lower_bound(const Instance& inst, const ObjectiveSpec& spec,
                          const PartialState& partial) {
  const int k_count = inst.vehicle_count();
  if (static_cast<int>(partial.tours.size()) != k_count) {
    throw std::invalid_argument("lower_bound: expected one tour per vehicle");
  }
  if (partial.complete(k_count)) {
    const Evaluation ev = evaluate(inst, Solution{partial.tours});
    if (!ev.energy_feasible) return std::numeric_limits<double>::infinity();
    return total_objective(spec, ev.route_cost, ev.fleet);
  }

  std::vector<char> routed(inst.node_count, 0);
  double committed = 0.0;
  for (int k = 0; k <= partial.closed_count && k < k_count; ++k) {
    const bool closed = k < partial.closed_count;
    int prev = 0;
    for (int node : partial.tours[k]) {
      committed += inst.cost[prev][node];
      routed[node] = 1;
      prev = node;
    }
    if (closed && !partial.tours[k].empty()) committed += inst.cost[prev][0];
  }
  const auto cheapest = detail::cheapest_outgoing(inst);
  double remaining = 0.0;
  for (int c = 1; c < inst.node_count; ++c) {
    if (!routed[c]) remaining += cheapest[c];
  }
  return committed + remaining + spec.alpha * detail::penalty_floor(inst, spec);
}

/// Exact branch-and-bound search for the minimum-objective feasible plan.
/// Deterministic: equal-objective plans resolve to the canonical smallest.
inline SolveResult solve(const Instance& inst, const ObjectiveSpec& spec,
                         const SolverConfig& cfg = {}) {
  detail::require_valid(inst, "solve");
  detail::Search search(inst, spec, cfg.tolerance, /*bounding=*/true,
                        cfg.node_limit);
  search.run();
  if (!search.has_incumbent()) detail::throw_no_solution(inst, search);
  return search.result(/*proven_optimal=*/!search.limit_hit());
}

/// Ground-truth oracle: enumerates and evaluates every complete plan (every
/// assignment of customers onto vehicles crossed with every visit order) and
/// keeps the minimum. Factorial cost; intended for small instances.
inline SolveResult solve_bruteforce(const Instance& inst,
                                    const ObjectiveSpec& spec) {
  detail::require_valid(inst, "solve_bruteforce");
  detail::Search search(inst, spec, kTolerance, /*bounding=*/false,
                        std::nullopt);
  search.run();
  if (!search.has_incumbent()) detail::throw_no_solution(inst, search);
  return search.result(/*proven_optimal=*/true);
}

/// One entry of an alpha sweep.
struct SweepPoint {
  double alpha = 0.0;
  SolveResult result;
  double cost_diff_percent = 0.0;  // route cost change vs. the alpha=0 base optimum
};

/// Solves the instance once per alpha (independently) and reports each
/// result's route-cost change against the base-variant optimum.
inline std::vector<SweepPoint> sweep_alpha(const Instance& inst,
                                           ObjectiveVariant variant,
                                           const std::vector<double>& alphas,
                                           const SolverConfig& cfg = {}) {
  if (alphas.empty()) {
    throw std::invalid_argument("sweep_alpha: need at least one alpha");
  }
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] >= 0.0) || !std::isfinite(alphas[i])) {
      throw std::invalid_argument("sweep_alpha: alphas must be finite and >= 0");
    }
    if (i > 0 && alphas[i] <= alphas[i - 1]) {
      throw std::invalid_argument("sweep_alpha: alphas must be strictly increasing");
    }
  }
  const SolveResult base =
      solve(inst, ObjectiveSpec{ObjectiveVariant::base, 0.0}, cfg);
  std::vector<SweepPoint> points;
  points.reserve(alphas.size());
  for (double alpha : alphas) {
    SweepPoint point;
    point.alpha = alpha;
    point.result = solve(inst, ObjectiveSpec{variant, alpha}, cfg);
    const double rc = point.result.route_cost;
    if (base.route_cost == 0.0) {
      point.cost_diff_percent =
          rc == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      point.cost_diff_percent = 100.0 * (rc - base.route_cost) / base.route_cost;
    }
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace evrp
