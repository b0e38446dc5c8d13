#include "crsim/qp_oracle.hpp"
#include "crsim/stiffness_qp.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace crsim;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(g(rng), g(rng), g(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

ScalingProblem random_problem(std::mt19937_64& rng, int max_n = 5) {
  std::uniform_int_distribution<int> nd(1, max_n);
  std::uniform_real_distribution<double> logk(2.0, 6.0);
  std::uniform_real_distribution<double> bf(0.1, 3.0);
  const int n = nd(rng);
  std::vector<Vec3> c;
  for (int i = 0; i < n; ++i) {
    const Vec3 u = random_unit(rng);
    c.push_back(u.cwiseProduct(u));
  }
  const double K = std::pow(10.0, logk(rng));
  const double k_max = bf(rng) * n * K;
  return ScalingProblem(std::move(c), K, k_max);
}

double axis_load(const ScalingProblem& p, const std::vector<double>& s,
                 int j) {
  double load = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) load += s[i] * p.c_vectors[i][j];
  return p.stiffness * load;
}

}  // namespace

TEST_CASE("single overstiff contact is halved on its axis") {
  ScalingProblem p({Vec3(0, 0, 1)}, 1000.0, 500.0);
  const ScalingSolution sol = solve_scaling(p);
  REQUIRE(sol.scales.size() == 1);
  CHECK(sol.scales[0] == Catch::Approx(0.5).margin(1e-12));
  CHECK(sol.active_axes[2]);
  CHECK_FALSE(sol.active_axes[0]);
  CHECK_FALSE(sol.active_axes[1]);
  CHECK(sol.objective == Catch::Approx(0.25).margin(1e-12));
  CHECK(sol.kkt_residual <= 1e-8);
}

TEST_CASE("slack bound leaves every scale at one") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    ScalingProblem p = random_problem(rng);
    // Per-axis load at s = 1 never exceeds n*K <= k_max here.
    ScalingProblem slack(p.c_vectors, p.stiffness,
                         1.01 * p.size() * p.stiffness);
    const ScalingSolution sol = solve_scaling(slack);
    for (double s : sol.scales) REQUIRE(s == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(sol.objective <= 1e-15);
    REQUIRE(sol.active_bounds.empty());
  }
}

TEST_CASE("two identical contacts split the bound symmetrically") {
  ScalingProblem p({Vec3(0, 0, 1), Vec3(0, 0, 1)}, 1.0, 1.0);
  const ScalingSolution sol = solve_scaling(p);
  REQUIRE(sol.scales.size() == 2);
  CHECK(sol.scales[0] == Catch::Approx(0.5).margin(1e-12));
  CHECK(sol.scales[1] == Catch::Approx(0.5).margin(1e-12));

  // Coarse grid search over [0,1]^2 confirms the minimizer location.
  double best = 1e300, bs0 = -1, bs1 = -1;
  for (int a = 0; a <= 1000; ++a) {
    for (int b = 0; b <= 1000; ++b) {
      const double s0 = a / 1000.0, s1 = b / 1000.0;
      if (s0 + s1 > 1.0) continue;
      const double obj = (s0 - 1) * (s0 - 1) + (s1 - 1) * (s1 - 1);
      if (obj < best) {
        best = obj;
        bs0 = s0;
        bs1 = s1;
      }
    }
  }
  CHECK(bs0 == Catch::Approx(sol.scales[0]).margin(2e-3));
  CHECK(bs1 == Catch::Approx(sol.scales[1]).margin(2e-3));
  CHECK(best == Catch::Approx(sol.objective).margin(5e-3));
}

TEST_CASE("empty problem yields an empty solution") {
  const ScalingSolution sol = solve_scaling(ScalingProblem({}, 10.0, 5.0));
  CHECK(sol.scales.empty());
  CHECK(sol.objective == 0.0);
}

TEST_CASE("apply_scaling installs factors and caps the net stiffness") {
  std::vector<ContactPoint> pts;
  for (int i = 0; i < 4; ++i)
    pts.emplace_back(Vec3(0.1 * i, 0, 0), Vec3::UnitZ(), 0.001);
  ContactSet set(pts, 1000.0);

  const ScalingSolution sol = solve_scaling(make_scaling_problem(set, 2000.0));
  for (double s : sol.scales) CHECK(s == Catch::Approx(0.5).margin(1e-12));

  const ContactSet scaled = apply_scaling(set, sol);
  CHECK(equivalent_stiffness(scaled).matrix()(2, 2) ==
        Catch::Approx(2000.0).margin(1e-9 * 2000.0));
}

TEST_CASE("bound stays tight as redundant contacts accumulate") {
  for (int n : {4, 6, 11}) {
    std::vector<ContactPoint> pts;
    for (int i = 0; i < n; ++i)
      pts.emplace_back(Vec3(0.1 * i, 0, 0), Vec3::UnitZ(), 0.001);
    ContactSet set(pts, 1000.0);
    const ContactSet scaled =
        apply_scaling(set, solve_scaling(make_scaling_problem(set, 2000.0)));
    CHECK(equivalent_stiffness(scaled).matrix()(2, 2) ==
          Catch::Approx(2000.0).margin(1e-9 * 2000.0));
  }
}

TEST_CASE("apply_scaling rejects mismatched lengths") {
  ContactSet set({ContactPoint(Vec3::Zero(), Vec3::UnitZ(), 0.001)}, 100.0);
  ScalingSolution sol;
  sol.scales = {0.5, 0.5};
  CHECK_THROWS_AS(apply_scaling(set, sol), std::invalid_argument);
}

TEST_CASE("identity scaling is a no-op") {
  ContactSet set({ContactPoint(Vec3::Zero(), Vec3::UnitZ(), 0.001),
                  ContactPoint(Vec3::UnitX(), Vec3::UnitX(), 0.002)},
                 100.0);
  ScalingSolution sol;
  sol.scales = {1.0, 1.0};
  const ContactSet out = apply_scaling(set, sol);
  for (std::size_t i = 0; i < set.points.size(); ++i)
    CHECK(out.points[i].scale == set.points[i].scale);
}

TEST_CASE("solver matches the enumeration reference on random problems") {
  std::mt19937_64 rng(314);
  double max_dev = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const ScalingProblem p = random_problem(rng);
    const ScalingSolution main = solve_scaling(p);
    const ScalingSolution ref = oracle_solve(p);
    REQUIRE(main.scales.size() == ref.scales.size());
    for (std::size_t i = 0; i < main.scales.size(); ++i)
      max_dev = std::max(max_dev, std::abs(main.scales[i] - ref.scales[i]));
    REQUIRE(main.objective <= ref.objective + 1e-8);
    for (int j = 0; j < 3; ++j)
      REQUIRE(axis_load(p, main.scales, j) <= p.k_max + 1e-9 * p.k_max);
    REQUIRE(main.kkt_residual <= 1e-8);
  }
  CHECK(max_dev <= 1e-6);
}

TEST_CASE("raising the bound never raises the objective") {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> grow(1.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    const ScalingProblem tight = random_problem(rng);
    ScalingProblem loose(tight.c_vectors, tight.stiffness,
                         tight.k_max * grow(rng));
    const double obj_tight = solve_scaling(tight).objective;
    const double obj_loose = solve_scaling(loose).objective;
    REQUIRE(obj_loose <= obj_tight + 1e-10);
  }
}

TEST_CASE("argmin is invariant to joint rescaling of K and k_max") {
  std::mt19937_64 rng(161803);
  std::uniform_real_distribution<double> factor(1e-3, 1e3);
  for (int trial = 0; trial < 200; ++trial) {
    const ScalingProblem p = random_problem(rng);
    const double f = factor(rng);
    ScalingProblem q(p.c_vectors, f * p.stiffness, f * p.k_max);
    const ScalingSolution a = solve_scaling(p);
    const ScalingSolution b = solve_scaling(q);
    for (std::size_t i = 0; i < a.scales.size(); ++i)
      REQUIRE(a.scales[i] == Catch::Approx(b.scales[i]).margin(1e-9));
  }
}

TEST_CASE("oracle refuses large instances") {
  std::vector<Vec3> c(7, Vec3(0, 0, 1));
  CHECK_THROWS_AS(oracle_solve(ScalingProblem(c, 1.0, 1.0)),
                  std::invalid_argument);
}
