#include <gtest/gtest.h>

#include <random>

#include "gbspline/diagonals.hpp"

#include "gbspline/local_basis.hpp"
#include "support/cox_de_boor.hpp"
#include "support/fixtures.hpp"

namespace gbs {
namespace {

using testing::kHalfPi;

LocalBasis basis_of(const std::vector<double>& knots, int p, KnotFunctionSpec spec) {
  return build_local_basis(KnotVector::general(knots, p), KnotFunctionFamily::uniform(knots, spec));
}

TEST(LocalBasis, LinearQuadraticBernstein) {
  const auto basis = basis_of({0, 0, 0, 1, 1, 1}, 2, linear_spec());
  ASSERT_EQ(basis.size(), 3u);
  EXPECT_NEAR(eval_basis_function(basis, 0, 0.5), 0.25, 1e-14);
  EXPECT_NEAR(eval_basis_function(basis, 1, 0.5), 0.5, 1e-14);
  EXPECT_NEAR(eval_basis_function(basis, 2, 0.5), 0.25, 1e-14);
}

TEST(LocalBasis, TrigPartitionOfUnityExample) {
  const auto basis = basis_of(testing::deg4_midpoint_knots(), 4, trig_spec(kHalfPi));
  ASSERT_EQ(basis.size(), 6u);
  for (double t : {0.0, 0.1, 0.3, 0.5, 0.77, 1.0}) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 6; ++i) sum += eval_basis_function(basis, i, t);
    EXPECT_NEAR(sum, 1.0, 1e-12) << "t=" << t;
  }
}

TEST(LocalBasis, EndpointInterpolation) {
  for (const auto& spec : {linear_spec(), trig_spec(kHalfPi), exp_spec(2.0)}) {
    const auto basis = basis_of(testing::open_knots(3, {0.3, 0.6}), 3, spec);
    EXPECT_NEAR(eval_basis_function(basis, 0, 0.0), 1.0, 1e-12);
    EXPECT_NEAR(eval_basis_function(basis, basis.size() - 1, 1.0), 1.0, 1e-12);
  }
}

TEST(LocalBasis, Errors) {
  const auto knots = testing::open_knots(2, {0.5});
  try {
    build_local_basis(KnotVector::open({0, 1}, 0), KnotFunctionFamily::uniform({0, 1}, linear_spec()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegreeTooSmall);
  }
  const auto basis = basis_of(knots, 2, linear_spec());
  try {
    eval_basis_function(basis, 0, 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfActiveRegion);
  }
  const auto other = KnotFunctionFamily::uniform({0, 0, 0, 0.4, 1, 1, 1}, linear_spec());
  EXPECT_THROW(build_local_basis(KnotVector::open(knots, 2), other), Error);
  EXPECT_THROW(SplineCurve(KnotVector::open(knots, 2), KnotFunctionFamily::uniform(knots, linear_spec()), {1, 2}),
               Error);
}

TEST(LocalBasis, SupportAndLinearity) {
  const auto knots = testing::open_knots(3, {0.25, 0.5, 0.75});
  const auto basis = basis_of(knots, 3, exp_spec(1.0));
  EXPECT_EQ(eval_basis_function(basis, 0, 0.6), 0.0);
  EXPECT_EQ(eval_basis_function(basis, 6, 0.2), 0.0);
  std::vector<double> unit(basis.size(), 0.0);
  unit[2] = 3.0;
  const SplineCurve curve(basis.knots(), basis.family(), unit);
  const auto pw = form_piecewise(unit, basis);
  for (double t : testing::uniform_samples(0.0, 1.0, 41)) {
    EXPECT_NEAR(eval_curve(curve, basis, t), 3.0 * eval_basis_function(basis, 2, t), 1e-14);
    EXPECT_NEAR(pw(t), 3.0 * eval_basis_function(basis, 2, t), 1e-13);
  }
  const SplineCurve ones(basis.knots(), basis.family(), std::vector<double>(basis.size(), 1.0));
  for (double t : testing::uniform_samples(0.0, 1.0, 41)) EXPECT_NEAR(eval_curve(ones, basis, t), 1.0, 1e-12);
}

TEST(LocalBasis, SingleIntervalTableHasTwoRows) {
  const auto knots = testing::open_knots(2, {0.5});
  const auto basis = basis_of(knots, 2, trig_spec(1.0));
  // rows i..i+p+1 of the basis table: p+2 rows of p+1 slots
  const std::vector<std::vector<LocalTerm>> rows(basis.table().begin(), basis.table().begin() + 4);
  const auto by_interval = full_reverse_diagonals(rows);
  ASSERT_EQ(by_interval.size(), 2u);
  // second row lists the functions 1, 2, 3 on knot interval 3 = [0.5, 1]
  const double t = 0.8;
  for (std::size_t c = 0; c < 3; ++c)
    EXPECT_NEAR(eval_local_term(by_interval[1][c], basis.family(), 3, 2, t), eval_basis_function(basis, 1 + c, t), 1e-14);
}

TEST(LocalBasis, DegreeOneIsHat) {
  const auto basis = basis_of({0, 0, 0.5, 1, 1}, 1, trig_spec(1.0));
  const auto fam = KnotFunctionFamily::uniform({0, 0, 0.5, 1, 1}, trig_spec(1.0));
  EXPECT_NEAR(eval_basis_function(basis, 1, 0.25), fam.value(1, Generator::u, 0, 0.25), 1e-15);
  EXPECT_NEAR(eval_basis_function(basis, 1, 0.75), fam.value(2, Generator::v, 0, 0.75), 1e-15);
}

std::vector<double> random_open_knots(std::mt19937_64& rng, int p) {
  std::uniform_int_distribution<int> count(0, 5);
  std::uniform_real_distribution<double> pos(0.02, 0.98);
  std::bernoulli_distribution repeat(0.3);
  std::vector<double> interior;
  const int n = count(rng);
  for (int k = 0; k < n; ++k) {
    const double x = pos(rng);
    interior.push_back(x);
    if (repeat(rng) && p >= 2) interior.push_back(x);
  }
  std::sort(interior.begin(), interior.end());
  return testing::open_knots(p, interior, 0.0, 1.0);
}

KnotFunctionSpec random_spec(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_real_distribution<double> omega(0.2, 3.0);
  switch (kind(rng)) {
    case 0: return linear_spec();
    case 1: return trig_spec(omega(rng));
    default: return exp_spec(omega(rng));
  }
}

TEST(LocalBasis, PartitionOfUnityAndNonnegativityProperty) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int p = 2 + trial % 4;
    const auto knots = random_open_knots(rng, p);
    const auto basis = basis_of(knots, p, random_spec(rng));
    for (double t : testing::uniform_samples(0.0, 1.0, 200)) {
      const auto [first, values] = eval_nonzero_basis(basis, t);
      double sum = 0.0;
      for (double v : values) {
        EXPECT_GE(v, -1e-9);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-9) << "trial " << trial << " t=" << t;
    }
  }
}

TEST(LocalBasis, LinearFamilyMatchesCoxDeBoorProperty) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int p = 1 + trial % 5;
    const auto knots = random_open_knots(rng, p);
    const auto basis = basis_of(knots, p, linear_spec());
    for (double t : testing::uniform_samples(0.0, 1.0, 257))
      for (std::size_t i = 0; i < basis.size(); ++i)
        EXPECT_NEAR(eval_basis_function(basis, i, t), testing::cox_de_boor(knots, i, p, t), 1e-11);
  }
}

TEST(LocalBasis, PiecewiseFormMatchesDirectEvaluationProperty) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = 1 + trial % 5;
    const auto knots = random_open_knots(rng, p);
    auto built = testing::make_random_curve(knots, p, random_spec(rng), 100u + static_cast<unsigned>(trial));
    const auto pw = form_piecewise(built.curve.cpts, built.basis);
    for (double t : testing::uniform_samples(0.0, 1.0, 211)) {
      const double direct = eval_curve(built.curve, built.basis, t);
      EXPECT_NEAR(pw(t), direct, 1e-12 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST(LocalBasis, DeltaIsSupportIntegral) {
  const auto knots = testing::open_knots(3, {0.2, 0.7});
  const auto fam = KnotFunctionFamily::uniform(knots, trig_spec(1.5));
  const auto basis = build_local_basis(KnotVector::open(knots, 3), fam);
  // for polynomial splines the integral of N_i^p is (t_{i+p+1} - t_i)/(p+1)
  const auto lin = basis_of(knots, 3, linear_spec());
  for (std::size_t i = 0; i + 4 < knots.size(); ++i) {
    const double width = knots[i + 4] - knots[i];
    EXPECT_NEAR(lin.delta(3, i), width / 4.0, 1e-14);
    EXPECT_GE(basis.delta(3, i), 0.0);
  }
}

TEST(LocalBasis, ContinuityAtSimpleKnotsProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = 2 + trial % 4;
    const auto knots = random_open_knots(rng, p);
    const auto basis = basis_of(knots, p, random_spec(rng));
    EXPECT_LE(testing::worst_knot_derivative_jump(basis), 1e-8) << "trial " << trial;
  }
}

}  // namespace
}  // namespace gbs
