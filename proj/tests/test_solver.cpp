#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "evrp/solver.hpp"
#include "test_support.hpp"

using namespace evrp;
using testsupport::constant_matrix;
using testsupport::make_instance;

namespace {

long long factorial(int m) {
  long long f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

long long binomial(int a, int b) {
  if (b < 0 || b > a) return 0;
  long long r = 1;
  for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

// Complete plans for m customers over k vehicles: a permutation of the
// customers cut into k nonempty consecutive blocks.
long long plan_count(int customers, int vehicles) {
  return factorial(customers) * binomial(customers - 1, vehicles - 1);
}

const std::vector<ObjectiveVariant> kAllVariants{
    ObjectiveVariant::base, ObjectiveVariant::quadratic_spread,
    ObjectiveVariant::linear_min_dod};

}  // namespace

TEST_CASE("symmetric two-customer tie resolves to the canonical order") {
  auto cost = constant_matrix(3, 0.0);
  cost[0][1] = cost[1][0] = 1.0;
  cost[0][2] = cost[2][0] = 2.0;
  cost[1][2] = cost[2][1] = 3.0;
  Instance inst = make_instance(cost, constant_matrix(3, 1.0), {100.0});
  const SolveResult res = solve(inst, {ObjectiveVariant::base, 0.0});
  CHECK(res.objective == 6.0);
  CHECK(res.solution.tours == std::vector<Tour>{{1, 2}});
  CHECK(res.proven_optimal);
}

TEST_CASE("a two-node instance has exactly one plan") {
  Instance inst = make_instance(constant_matrix(2, 4.0), constant_matrix(2, 6.0),
                                {100.0});
  const SolveResult res = solve_bruteforce(inst, {ObjectiveVariant::base, 0.0});
  CHECK(res.solution.tours == std::vector<Tour>{{1}});
  CHECK(res.stats.solutions_evaluated == 1);
  CHECK(res.objective == 8.0);
}

TEST_CASE("brute force enumerates every plan exactly once") {
  testsupport::Rng rng(29);
  for (auto [n, k] : {std::pair{4, 2}, {5, 2}, {5, 3}, {6, 1}}) {
    Instance inst = testsupport::random_instance(rng, n, k);
    inst.energy = constant_matrix(n, 0.0);  // keep every plan energy-feasible
    const SolveResult res = solve_bruteforce(inst, {ObjectiveVariant::base, 0.0});
    CHECK(res.stats.solutions_evaluated == plan_count(n - 1, k));
  }
}

TEST_CASE("solve matches the exhaustive oracle") {
  testsupport::Rng rng(31);
  for (int iter = 0; iter < 12; ++iter) {
    const Instance inst = testsupport::random_feasible_instance(rng);
    for (ObjectiveVariant variant : kAllVariants) {
      for (double alpha : {0.0, 0.05, 0.5, 2.0}) {
        const ObjectiveSpec spec{variant, alpha};
        const SolveResult fast = solve(inst, spec);
        const SolveResult oracle = solve_bruteforce(inst, spec);
        CHECK(std::abs(fast.objective - oracle.objective) <= 1e-9);
        CHECK(fast.solution.tours == oracle.solution.tours);
      }
    }
  }
}

TEST_CASE("alpha zero makes every variant agree with the base variant") {
  testsupport::Rng rng(37);
  for (int iter = 0; iter < 10; ++iter) {
    const Instance inst = testsupport::random_feasible_instance(rng);
    const SolveResult base = solve(inst, {ObjectiveVariant::base, 0.0});
    for (ObjectiveVariant variant : kAllVariants) {
      const SolveResult res = solve(inst, {variant, 0.0});
      CHECK(res.objective == base.objective);
      CHECK(res.solution.tours == base.solution.tours);
    }
  }
}

TEST_CASE("solver outputs are always feasible plans") {
  testsupport::Rng rng(41);
  for (int iter = 0; iter < 25; ++iter) {
    const Instance inst = testsupport::random_feasible_instance(rng);
    const ObjectiveVariant variant = kAllVariants[rng.uniform_int(0, 2)];
    const SolveResult res = solve(inst, {variant, rng.uniform(0.0, 4.0)});
    CHECK(check_feasibility(inst, res.solution).feasible);
    for (double soc : res.fleet.soc_end) CHECK(soc >= -1e-9);
    const Evaluation ev = evaluate(inst, res.solution);
    CHECK(ev.route_cost == res.route_cost);
    CHECK(ev.fleet.dod == res.fleet.dod);
  }
}

TEST_CASE("objective field matches its decomposition") {
  testsupport::Rng rng(43);
  for (int iter = 0; iter < 10; ++iter) {
    const Instance inst = testsupport::random_feasible_instance(rng);
    const ObjectiveSpec spec{ObjectiveVariant::quadratic_spread,
                             rng.uniform(0.0, 2.0)};
    const SolveResult res = solve(inst, spec);
    CHECK(std::abs(res.objective -
                   total_objective(spec, res.route_cost, res.fleet)) <= 1e-9);
  }
}

TEST_CASE("weighted-sum optima are monotone in alpha") {
  testsupport::Rng rng(47);
  for (int iter = 0; iter < 8; ++iter) {
    const Instance inst = testsupport::random_feasible_instance(rng);
    double prev_spread = std::numeric_limits<double>::infinity();
    double prev_cost = 0.0;
    double prev_min = -1.0;
    for (double alpha : {0.0, 0.1, 0.5, 2.0}) {
      const SolveResult quad =
          solve(inst, {ObjectiveVariant::quadratic_spread, alpha});
      CHECK(quad.fleet.spread() <= prev_spread + 1e-9);
      CHECK(quad.route_cost >= prev_cost - 1e-9);
      prev_spread = quad.fleet.spread();
      prev_cost = quad.route_cost;

      const SolveResult lin = solve(inst, {ObjectiveVariant::linear_min_dod, alpha});
      CHECK(lin.fleet.dod_min >= prev_min - 1e-9);
      prev_min = lin.fleet.dod_min;
    }
  }
}

TEST_CASE("lower_bound is exact on a complete plan") {
  testsupport::Rng rng(53);
  const Instance inst = testsupport::random_feasible_instance(rng);
  const ObjectiveSpec spec{ObjectiveVariant::quadratic_spread, 0.5};
  const SolveResult res = solve(inst, spec);
  PartialState done{res.solution.tours, inst.vehicle_count()};
  CHECK(std::abs(lower_bound(inst, spec, done) - res.objective) <= 1e-9);
}

TEST_CASE("lower_bound never exceeds the optimum") {
  testsupport::Rng rng(59);
  for (int iter = 0; iter < 50; ++iter) {
    const Instance inst = testsupport::random_feasible_instance(rng, 4, 6, 2);
    for (ObjectiveVariant variant : kAllVariants) {
      const ObjectiveSpec spec{variant, 2.0};
      const SolveResult best = solve_bruteforce(inst, spec);
      PartialState empty;
      empty.tours.resize(inst.vehicle_count());
      CHECK(lower_bound(inst, spec, empty) <= best.objective + 1e-9);
    }
  }
}

TEST_CASE("lower_bound holds along every prefix of a plan") {
  testsupport::Rng rng(61);
  for (int iter = 0; iter < 30; ++iter) {
    const Instance inst = testsupport::random_feasible_instance(rng, 4, 7, 3);
    const Solution sol = testsupport::random_solution(rng, inst);
    const Evaluation ev = evaluate(inst, sol);
    if (!ev.energy_feasible) continue;
    const ObjectiveSpec spec{ObjectiveVariant::linear_min_dod, 1.5};
    const double objective = total_objective(spec, ev.route_cost, ev.fleet);

    PartialState partial;
    partial.tours.resize(inst.vehicle_count());
    CHECK(lower_bound(inst, spec, partial) <= objective + 1e-9);
    for (int k = 0; k < inst.vehicle_count(); ++k) {
      for (std::size_t len = 1; len <= sol.tours[k].size(); ++len) {
        partial.tours[k] = Tour(sol.tours[k].begin(), sol.tours[k].begin() + len);
        CHECK(lower_bound(inst, spec, partial) <= objective + 1e-9);
      }
      partial.closed_count = k + 1;
      CHECK(lower_bound(inst, spec, partial) <= objective + 1e-9);
    }
  }
}

TEST_CASE("an impossible energy budget reports the binding vehicle") {
  Instance inst = make_instance(constant_matrix(3, 1.0), constant_matrix(3, 10.0),
                                {5.0});
  try {
    solve(inst, {ObjectiveVariant::base, 0.0});
    FAIL("expected SolveError");
  } catch (const SolveError& e) {
    CHECK(e.kind == SolveErrorKind::infeasible);
    CHECK(e.binding_vehicle == "V1");
  }
  CHECK_THROWS_AS(solve_bruteforce(inst, {ObjectiveVariant::base, 0.0}),
                  SolveError);
}

TEST_CASE("node limit yields best-found results or a clean error") {
  testsupport::Rng rng(67);
  const Instance inst = testsupport::random_feasible_instance(rng, 7, 8, 3);
  const ObjectiveSpec spec{ObjectiveVariant::base, 0.0};

  SolverConfig strangled;
  strangled.node_limit = 1;
  try {
    solve(inst, spec, strangled);
    FAIL("expected SolveError");
  } catch (const SolveError& e) {
    CHECK(e.kind == SolveErrorKind::node_limit_before_solution);
  }

  SolverConfig tight;
  tight.node_limit = 40;
  const SolveResult some = solve(inst, spec, tight);
  CHECK_FALSE(some.proven_optimal);
  CHECK(check_feasibility(inst, some.solution).feasible);

  const SolveResult full = solve(inst, spec);
  CHECK(full.proven_optimal);
  CHECK(some.objective >= full.objective - 1e-9);
}

TEST_CASE("solve is deterministic") {
  testsupport::Rng rng(71);
  const Instance inst = testsupport::random_feasible_instance(rng);
  const ObjectiveSpec spec{ObjectiveVariant::quadratic_spread, 0.7};
  const SolveResult a = solve(inst, spec);
  const SolveResult b = solve(inst, spec);
  CHECK(a.solution.tours == b.solution.tours);
  CHECK(a.objective == b.objective);
  CHECK(a.stats.nodes_explored == b.stats.nodes_explored);
  CHECK(a.stats.nodes_pruned == b.stats.nodes_pruned);
  CHECK(a.stats.solutions_evaluated == b.stats.solutions_evaluated);
}

TEST_CASE("solve rejects invalid instances up front") {
  Instance inst = make_instance(constant_matrix(3, 1.0), constant_matrix(3, 1.0),
                                {100.0});
  inst.cost[0][1] = -2.0;
  CHECK_THROWS_AS(solve(inst, {ObjectiveVariant::base, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("sweep over a single zero alpha equals the base solve") {
  testsupport::Rng rng(73);
  const Instance inst = testsupport::random_feasible_instance(rng);
  const auto points = sweep_alpha(inst, ObjectiveVariant::quadratic_spread, {0.0});
  REQUIRE(points.size() == 1);
  const SolveResult base = solve(inst, {ObjectiveVariant::base, 0.0});
  CHECK(points[0].result.objective == base.objective);
  CHECK(points[0].result.solution.tours == base.solution.tours);
  CHECK(points[0].cost_diff_percent == 0.0);
}

TEST_CASE("sweep rejects malformed alpha lists") {
  testsupport::Rng rng(79);
  const Instance inst = testsupport::random_feasible_instance(rng);
  CHECK_THROWS_AS(sweep_alpha(inst, ObjectiveVariant::base, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sweep_alpha(inst, ObjectiveVariant::base, {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sweep_alpha(inst, ObjectiveVariant::base, {-1.0, 2.0}),
                  std::invalid_argument);
}
