#include <doctest.h>

#include <cmath>
#include <random>

#include "mgtune/safeopt.hpp"

using namespace mgtune;

namespace {

Eigen::VectorXd vec1(double v) { return Eigen::VectorXd::Constant(1, v); }

ParamBounds ki_bounds(int n = 1000) { return ParamBounds{{0.0}, {300.0}, {n}}; }

KernelParams ref_kernel(double j_init) { return KernelParams{{0.05}, std::abs(j_init), 0.01 * std::abs(j_init)}; }

SafeOpt ref_1d() { return SafeOpt(ki_bounds(), vec1(10.0), -0.52, -1.04, ref_kernel(-0.52), 2.0); }

// Lower bounds recomputed by a full refit and a fictitious-observation refit,
// independent of the incremental state inside SafeOpt.
bool brute_expander(const SafeOpt& s, Eigen::Index i) {
  if (!s.safe_mask()[static_cast<std::size_t>(i)]) return false;
  const GpModel fict = s.gp().add_observation(s.grid_normalized().row(i).transpose(), s.upper()[static_cast<std::size_t>(i)]);
  for (Eigen::Index j = 0; j < s.grid_size(); ++j) {
    if (s.safe_mask()[static_cast<std::size_t>(j)]) continue;
    const auto ci = confidence_bounds(fict.posterior_at(s.grid_normalized().row(j).transpose()), s.beta());
    if (ci.lower >= s.j_min()) return true;
  }
  return false;
}

std::vector<double> sample_prior(std::mt19937_64& rng, const Eigen::MatrixXd& grid, const KernelParams& k) {
  const Eigen::Index n = grid.rows();
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = matern32(k, grid.row(i).transpose(), grid.row(j).transpose());
  c.diagonal().array() += 1e-10;
  const Eigen::MatrixXd l = c.llt().matrixL();
  std::normal_distribution<double> z;
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = z(rng);
  const Eigen::VectorXd f = l * w;
  return {f.data(), f.data() + n};
}

}  // namespace

TEST_CASE("bounds validation and tags") {
  CHECK_THROWS_AS((ParamBounds{{1.0}, {1.0}, {10}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ParamBounds{{0.0}, {1.0}, {1}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ParamBounds{{0.0}, {1.0, 2.0}, {5}}.validate()), std::invalid_argument);
  for (SetTag t : {SetTag::seed, SetTag::expander, SetTag::maximizer, SetTag::exploit_fallback})
    CHECK(parse_set_tag(to_string(t)) == t);
  CHECK(!parse_set_tag("bogus"));
}

TEST_CASE("init: reference 1d setup") {
  const SafeOpt s = ref_1d();
  CHECK(s.grid_size() == 1000);
  const Eigen::Index seed = s.nearest_index(vec1(10.0));
  CHECK(seed == 33);
  CHECK(s.safe_mask()[static_cast<std::size_t>(seed)]);
  CHECK(s.observations().size() == 1);
  CHECK(s.observations()[0].params(0) == doctest::Approx(300.0 * 33 / 999));
  CHECK(s.gp().prior_offset() == -0.52);
  CHECK(s.lower()[static_cast<std::size_t>(seed)] == doctest::Approx(-0.52).epsilon(0.05));
}

TEST_CASE("init rejects an unsafe seed") {
  CHECK_THROWS_AS(SafeOpt(ki_bounds(), vec1(10.0), -1.2, -1.04, ref_kernel(-0.52), 2.0), std::invalid_argument);
  CHECK_THROWS_AS(SafeOpt(ki_bounds(), vec1(10.0), -0.52, -1.04, ref_kernel(-0.52), 0.0), std::invalid_argument);
}

TEST_CASE("two-point grid contains exactly the bounds") {
  const SafeOpt s(ParamBounds{{-2.0, 5.0}, {3.0, 6.0}, {2, 2}}, Eigen::Vector2d(-2.0, 5.0), 0.0, -1.0,
                  KernelParams{{0.5, 0.5}, 1.0, 0.01}, 2.0);
  CHECK(s.grid_size() == 4);
  const auto& g = s.grid_physical();
  CHECK(g(0, 0) == -2.0);
  CHECK(g(0, 1) == 5.0);
  CHECK(g(1, 1) == 6.0);
  CHECK(g(3, 0) == 3.0);
  CHECK(g(3, 1) == 6.0);
}

TEST_CASE("after init only the seed neighbourhood is safe") {
  const SafeOpt s = ref_1d();
  // far from data the lower bound reverts to prior_offset - beta * signal_std
  CHECK(s.lower().back() == doctest::Approx(-0.52 - 2.0 * 0.52).epsilon(1e-9));
  CHECK(s.lower().back() < s.j_min());
  const double seed_u = s.grid_normalized()(s.nearest_index(vec1(10.0)), 0);
  for (Eigen::Index i = 0; i < s.grid_size(); ++i)
    if (s.safe_mask()[static_cast<std::size_t>(i)]) CHECK(std::abs(s.grid_normalized()(i, 0) - seed_u) <= 0.05);

  const Proposal p = s.propose_next();
  CHECK(s.safe_mask()[static_cast<std::size_t>(p.index)]);
  CHECK(std::abs(s.grid_normalized()(p.index, 0) - seed_u) <= 0.05);
  CHECK(p.width == doctest::Approx(s.upper()[static_cast<std::size_t>(p.index)] - s.lower()[static_cast<std::size_t>(p.index)]));
}

TEST_CASE("proposals are deterministic") {
  SafeOpt a = ref_1d(), b = ref_1d();
  for (int k = 0; k < 5; ++k) {
    const Proposal pa = a.propose_next(), pb = b.propose_next();
    CHECK(pa.index == pb.index);
    CHECK(pa.tag == pb.tag);
    const double j = -0.5 + 0.02 * k;
    a.add_measurement(pa.params, j, false);
    b.add_measurement(pb.params, j, false);
  }
}

TEST_CASE("expander test matches a literal fictitious-observation refit") {
  std::mt19937_64 rng(4);
  SafeOpt s(ParamBounds{{0.0}, {1.0}, {120}}, vec1(0.5), 0.0, -0.8, KernelParams{{0.08}, 1.0, 0.05}, 2.0, 0.0);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  for (int it = 0; it < 6; ++it) {
    const auto mask = s.expander_mask();
    int count = 0;
    for (Eigen::Index i = 0; i < s.grid_size(); ++i) {
      CHECK(mask[static_cast<std::size_t>(i)] == brute_expander(s, i));
      count += mask[static_cast<std::size_t>(i)];
    }
    if (it == 0) CHECK(count > 0);

    // argmax width over the union, lowest index on ties
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < s.grid_size(); ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (!(mask[ui] || s.maximizer_mask()[ui])) continue;
      if (best < 0 || s.upper()[ui] - s.lower()[ui] > s.upper()[static_cast<std::size_t>(best)] - s.lower()[static_cast<std::size_t>(best)])
        best = i;
    }
    const Proposal p = s.propose_next();
    CHECK(p.index == best);
    CHECK((p.tag == SetTag::maximizer) == static_cast<bool>(s.maximizer_mask()[static_cast<std::size_t>(p.index)]));
    const double x = p.params(0);
    s.add_measurement(p.params, std::sin(5.0 * x) - 0.3 + noise(rng), false);
  }
}

TEST_CASE("safe mask equals a from-scratch recomputation") {
  SafeOpt s = ref_1d();
  std::vector<double> xs{s.grid_normalized()(s.nearest_index(vec1(10.0)), 0)};
  std::vector<double> ys{-0.52};
  for (int it = 0; it < 8; ++it) {
    const Proposal p = s.propose_next();
    const double j = -0.52 + 0.4 * std::sin(p.params(0) / 60.0);
    s.add_measurement(p.params, j, false);
    xs.push_back(s.grid_normalized()(p.index, 0));
    ys.push_back(j);

    const Eigen::Map<Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
    const Eigen::Map<Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
    const GpModel fresh = GpModel::fit(x, y, ref_kernel(-0.52), -0.52);
    for (Eigen::Index i = 0; i < s.grid_size(); ++i) {
      const auto ci = confidence_bounds(fresh.posterior_at(s.grid_normalized().row(i).transpose()), 2.0);
      if (std::abs(ci.lower - s.j_min()) > 1e-9) CHECK(s.safe_mask()[static_cast<std::size_t>(i)] == (ci.lower >= s.j_min()));
    }
  }
}

TEST_CASE("raising j_min never enlarges the safe set") {
  for (double j_min : {-1.04, -0.9, -0.7, -0.6}) {
    SafeOpt lo(ki_bounds(300), vec1(10.0), -0.52, -1.04, ref_kernel(-0.52), 2.0);
    SafeOpt hi(ki_bounds(300), vec1(10.0), -0.52, std::max(j_min, -0.52), ref_kernel(-0.52), 2.0);
    for (double ki : {20.0, 30.0, 40.0}) {
      const Eigen::VectorXd p = lo.grid_physical().row(lo.nearest_index(vec1(ki))).transpose();
      lo.add_measurement(p, -0.4, false);
      hi.add_measurement(p, -0.4, false);
    }
    for (Eigen::Index i = 0; i < lo.grid_size(); ++i)
      if (hi.safe_mask()[static_cast<std::size_t>(i)]) CHECK(lo.safe_mask()[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("add_measurement effects") {
  SUBCASE("a bad measurement never expands the safe set on its side of the seed") {
    SafeOpt s = ref_1d();
    const Proposal p = s.propose_next();
    const Eigen::Index seed = s.nearest_index(vec1(10.0));
    REQUIRE(p.index != seed);
    const auto before = s.safe_mask();
    s.add_measurement(p.params, -3.0, true);
    // beyond the seed the posterior mean extrapolates the drop upwards, so only the near side is constrained
    for (Eigen::Index i = 0; i < s.grid_size(); ++i) {
      if ((i - seed) * (p.index - seed) <= 0) continue;
      if (s.safe_mask()[static_cast<std::size_t>(i)]) CHECK(before[static_cast<std::size_t>(i)]);
    }
    CHECK(!s.safe_mask()[static_cast<std::size_t>(p.index)]);
    CHECK(s.observations().back().aborted);
  }

  SUBCASE("repeating a measurement narrows the width there") {
    SafeOpt s = ref_1d();
    const Proposal p = s.propose_next();
    s.add_measurement(p.params, -0.45, false);
    const auto i = static_cast<std::size_t>(p.index);
    const double w1 = s.upper()[i] - s.lower()[i];
    s.add_measurement(p.params, -0.45, false);
    CHECK(s.upper()[i] - s.lower()[i] < w1);
  }

  SUBCASE("re-adding the seed value keeps the best observation") {
    SafeOpt s = ref_1d();
    const auto before = s.best_observed();
    s.add_measurement(s.observations()[0].params, -0.52, false);
    const auto after = s.best_observed();
    CHECK(after.second == before.second);
    CHECK(after.first == before.first);
  }

  SUBCASE("off-grid parameters are rejected") {
    SafeOpt s = ref_1d();
    CHECK_THROWS_AS(s.add_measurement(vec1(10.0001), -0.5, false), std::invalid_argument);
  }
}

TEST_CASE("best_observed") {
  SafeOpt s(ki_bounds(), vec1(10.0), -0.52, -1.04, ref_kernel(-0.52), 2.0);
  CHECK(s.best_observed().second == -0.52);
  const auto at = [&](double ki) { return Eigen::VectorXd(s.grid_physical().row(s.nearest_index(vec1(ki))).transpose()); };
  s.add_measurement(at(70.0), -0.29, false);
  s.add_measurement(at(40.0), -0.40, false);
  CHECK(s.best_observed().second == -0.29);
  CHECK(s.best_observed().first(0) == doctest::Approx(at(70.0)(0)));

  SafeOpt eq(ki_bounds(), vec1(10.0), -0.5, -1.0, ref_kernel(-0.5), 2.0);
  eq.add_measurement(Eigen::VectorXd(eq.grid_physical().row(100).transpose()), -0.5, false);
  CHECK(eq.best_observed().first(0) == eq.observations()[0].params(0));
}

TEST_CASE("empty safe set is terminal") {
  SafeOpt s(ParamBounds{{0.0}, {1.0}, {50}}, vec1(0.5), 0.0, -0.1, KernelParams{{0.1}, 1.0, 0.01}, 2.0);
  s.add_measurement(s.observations()[0].params, -10.0, true);
  s.add_measurement(s.observations()[0].params, -10.0, true);
  CHECK(s.safe_set_empty());
  CHECK_THROWS_AS(s.propose_next(), SafeSetEmpty);
}

TEST_CASE("expanders vanish once the whole grid is safe") {
  std::mt19937_64 rng(17);
  const KernelParams k{{0.2}, 1.0, 0.01};
  ParamBounds b{{0.0}, {1.0}, {60}};
  Eigen::MatrixXd grid(60, 1);
  for (int i = 0; i < 60; ++i) grid(i, 0) = i / 59.0;
  int checked = 0;
  for (int trial = 0; trial < 20 && checked < 3; ++trial) {
    const auto f = sample_prior(rng, grid, k);
    // j_min well below the sampled function so that full coverage is reachable
    const double fmin = *std::min_element(f.begin(), f.end());
    SafeOpt s(b, vec1(0.5), f[30], fmin - 1.0, k, 2.0, 0.0);
    for (int it = 0; it < 80 && s.safe_count() < s.grid_size(); ++it) {
      const Proposal p = s.propose_next();
      s.add_measurement(p.params, f[static_cast<std::size_t>(p.index)], false);
    }
    if (s.safe_count() != s.grid_size()) continue;
    ++checked;
    CHECK(s.safe_mask().front());
    CHECK(s.safe_mask().back());
    for (bool e : s.expander_mask()) CHECK(!e);
  }
  CHECK(checked >= 1);
}
