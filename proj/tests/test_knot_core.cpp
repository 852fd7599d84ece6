#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gbspline/knot_functions.hpp"
#include "gbspline/knot_vector.hpp"
#include "gbspline/oracle.hpp"
#include "support/fixtures.hpp"

namespace gbs {
namespace {

using testing::kHalfPi;

TEST(KnotVector, AcceptsOpenVectors) {
  const auto kv = validate_open_knot_vector(testing::deg4_midpoint_knots(), 4);
  EXPECT_EQ(kv.size(), 11u);
  EXPECT_EQ(kv.basis_count(), 6u);
  EXPECT_TRUE(kv.is_open());

  const std::vector<double> minimal{0, 1};
  EXPECT_EQ(validate_open_knot_vector(minimal, 0).size(), 2u);
}

TEST(KnotVector, RejectsMalformedVectors) {
  auto code_of = [](std::vector<double> k, int p) {
    try {
      validate_open_knot_vector(k, p);
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::InvalidPlan;
  };
  EXPECT_EQ(code_of({0, 0, 1, 0}, 1), ErrorCode::NotNondecreasing);
  EXPECT_EQ(code_of({0, 0, .5, 1, 1}, 2), ErrorCode::TooShort);
  EXPECT_EQ(code_of({0, 0, .5, 1, 1, 1}, 2), ErrorCode::NotOpen);
  EXPECT_EQ(code_of({0, 0.2, 0.5, 1, 1}, 1), ErrorCode::NotOpen);
}

TEST(KnotVector, ActiveRegion) {
  EXPECT_EQ(active_region(KnotVector::open(testing::deg4_midpoint_knots(), 4)), (std::vector<double>{0, .5, 1}));
  EXPECT_EQ(active_region(KnotVector::open({0, 0, 0, .5, .5, 1, 1, 1}, 2)), (std::vector<double>{0, .5, .5, 1}));
  EXPECT_EQ(active_region(KnotVector::open({0, 1}, 0)), (std::vector<double>{0, 1}));
}

TEST(KnotVector, ActiveRegionLengthProperty) {
  for (int p = 0; p <= 5; ++p) {
    const auto knots = testing::open_knots(p, {0.1, 0.4, 0.4, 0.9});
    const auto kv = KnotVector::open(knots, p);
    const auto reg = active_region(kv);
    ASSERT_EQ(reg.size(), kv.size() - 2 * static_cast<std::size_t>(p));
    EXPECT_EQ(reg.front(), kv[static_cast<std::size_t>(p)]);
    EXPECT_EQ(reg.back(), kv[kv.size() - static_cast<std::size_t>(p) - 1]);
  }
}

TEST(KnotFunctions, ValueExamples) {
  const auto lin = KnotFunctionFamily::uniform({0, 1}, linear_spec());
  EXPECT_DOUBLE_EQ(knot_function_value(lin, 0, Generator::u, 0, 0.5), 0.5);

  const auto trig = KnotFunctionFamily::uniform({0, 1}, trig_spec(kHalfPi));
  EXPECT_NEAR(knot_function_value(trig, 0, Generator::u, 0, 1.0), 1.0, 1e-15);

  // First antiderivative at t=1: quadrature of sin(pi t / 2) over [0, 1].
  const double quad = adaptive_simpson([](double t) { return std::sin(kHalfPi * t); }, 0.0, 1.0, {1e-14, 50});
  EXPECT_NEAR(quad, 2.0 / std::numbers::pi, 1e-13);
  EXPECT_NEAR(knot_function_value(trig, 0, Generator::u, 1, 1.0), quad, 1e-13);
}

TEST(KnotFunctions, RejectsOutOfIntervalAndBadFamilies) {
  const auto trig = KnotFunctionFamily::uniform({0, 1}, trig_spec(kHalfPi));
  EXPECT_THROW(trig.value(0, Generator::u, 0, 1.5), Error);
  EXPECT_THROW(KnotFunctionFamily::uniform({0, 2}, trig_spec(2.0)), Error);  // omega h >= pi
  EXPECT_THROW(KnotFunctionFamily::uniform({0, 1}, exp_spec(-1.0)), Error);
  const std::vector<KnotFunctionSpec> one{linear_spec()};
  EXPECT_THROW(KnotFunctionFamily::from_nonempty({0, 0.5, 1}, one), Error);
}

TEST(KnotFunctions, ZeroLengthIntervalsCarryNoFunctions) {
  const auto fam = KnotFunctionFamily::uniform({0, 0, 0.5, 0.5, 1}, trig_spec(1.0));
  EXPECT_FALSE(fam.has_functions(0));
  EXPECT_TRUE(fam.has_functions(1));
  EXPECT_FALSE(fam.has_functions(2));
  EXPECT_TRUE(fam.has_functions(3));
  EXPECT_EQ(fam.nonempty_specs().size(), 2u);
}

// Endpoint normalization and closed-form consistency across orders, for
// every built-in family on a few interval shapes.
TEST(KnotFunctions, NormalizationAndDerivativeChainProperty) {
  const std::vector<KnotFunctionSpec> specs{linear_spec(), trig_spec(kHalfPi), trig_spec(2.5), exp_spec(1.0),
                                            exp_spec(3.0)};
  const std::vector<std::pair<double, double>> intervals{{0, 1}, {-0.3, 0.2}, {2.0, 3.1}};
  for (const auto& spec : specs) {
    for (auto [a, b] : intervals) {
      if (spec.kind == KnotFunctionKind::trigonometric && spec.omega * (b - a) >= std::numbers::pi) continue;
      const auto fam = KnotFunctionFamily::uniform({a, b}, spec);
      EXPECT_NEAR(fam.value(0, Generator::u, 0, a), 0.0, 1e-12);
      EXPECT_NEAR(fam.value(0, Generator::u, 0, b), 1.0, 1e-12);
      EXPECT_NEAR(fam.value(0, Generator::v, 0, a), 1.0, 1e-12);
      EXPECT_NEAR(fam.value(0, Generator::v, 0, b), 0.0, 1e-12);

      const double h = b - a;
      const double step = 1e-6 * h;
      for (int k = -2; k <= 6; ++k) {
        for (Generator g : {Generator::u, Generator::v}) {
          for (int s = 1; s <= 10; ++s) {
            const double t = a + h * s / 11.0;
            const double fd = (fam.value(0, g, k, t + step) - fam.value(0, g, k, t - step)) / (2 * step);
            const double exact = fam.value(0, g, k - 1, t);
            EXPECT_NEAR(fd, exact, 1e-6 * std::max(1.0, std::abs(exact)))
                << kind_name(spec.kind) << " order " << k << " t=" << t;
          }
        }
      }
    }
  }
}

TEST(KnotFunctions, AntiderivativesMatchQuadrature) {
  const std::vector<KnotFunctionSpec> specs{linear_spec(), trig_spec(1.3), exp_spec(2.0)};
  for (const auto& spec : specs) {
    const auto fam = KnotFunctionFamily::uniform({0.5, 1.5}, spec);
    for (Generator g : {Generator::u, Generator::v}) {
      for (int k = 1; k <= 4; ++k) {
        const double t = 1.2;
        const double quad = adaptive_simpson([&](double s) { return fam.value(0, g, k - 1, s); }, 0.5, t,
                                             {1e-14, 50});
        EXPECT_NEAR(fam.value(0, g, k, t), quad, 1e-12);
      }
    }
  }
}

TEST(IntegralTable, Examples) {
  const auto trig = KnotFunctionFamily::uniform({0, 1}, trig_spec(kHalfPi));
  const std::vector<double> reg1{0, .5, 1};
  const auto table = build_integral_table(trig, reg1, 0, 2);
  EXPECT_NEAR(table.at(0, 1, kLeft, Generator::u), std::sqrt(2.0) / 2.0, 1e-15);
  // order-1 entry equals a quadrature of the generator from the source left end
  const double quad = adaptive_simpson([&](double s) { return trig.value(0, Generator::v, 0, s); }, 0.0, 0.5,
                                       {1e-14, 50});
  EXPECT_NEAR(table.at(1, 0, kRight, Generator::v), quad, 1e-12);

  const double h = 0.8;
  const auto lin = KnotFunctionFamily::uniform({0, h}, linear_spec());
  const std::vector<double> whole{0, h};
  const auto deriv = build_integral_table(lin, whole, 1, 0);
  for (int e = 0; e < 2; ++e) EXPECT_NEAR(deriv.at(0, 0, e, Generator::u), 1.0 / h, 1e-15);

  for (const auto& spec : {linear_spec(), trig_spec(1.0), exp_spec(2.0)}) {
    const auto fam = KnotFunctionFamily::uniform({0.2, 0.9}, spec);
    const std::vector<double> same{0.2, 0.9};
    const auto t0 = build_integral_table(fam, same, 0, 0);
    EXPECT_NEAR(t0.at(0, 0, kLeft, Generator::u), 0.0, 1e-15);
    EXPECT_NEAR(t0.at(0, 0, kRight, Generator::u), 1.0, 1e-15);
    EXPECT_NEAR(t0.at(0, 0, kLeft, Generator::v), 1.0, 1e-15);
    EXPECT_NEAR(t0.at(0, 0, kRight, Generator::v), 0.0, 1e-15);
  }
}

TEST(IntegralTable, StraddleAndEmptyRows) {
  const auto fam = KnotFunctionFamily::uniform({0, 0.5, 1}, linear_spec());
  const std::vector<double> bad{0, 0.75, 1};
  EXPECT_THROW(build_integral_table(fam, bad, 0, 1), Error);

  const std::vector<double> with_empty{0, 0.5, 0.5, 1};
  const auto table = build_integral_table(fam, with_empty, 0, 1);
  EXPECT_TRUE(std::isnan(table.at(0, 1, kLeft, Generator::u)));
  EXPECT_FALSE(std::isnan(table.at(0, 2, kLeft, Generator::u)));
}

}  // namespace
}  // namespace gbs
