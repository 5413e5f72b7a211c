#include <gtest/gtest.h>

#include <cmath>
#include <optional>

#include "oracles.hpp"
#include "valsim/error.hpp"
#include "valsim/pooling_lab.hpp"

namespace valsim {
namespace {

const CorrelationMatrix kCorrelated{{1.0, 0.6, 0.2}, {0.6, 1.0, 0.3}, {0.2, 0.3, 1.0}};
const CorrelationMatrix kNullCriterion{{1.0, 0.6, 0.0}, {0.6, 1.0, 0.0}, {0.0, 0.0, 1.0}};

std::optional<ErrorCode> code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

SimDesign design(const CorrelationMatrix& sigma, std::size_t nss, std::size_t sss,
                 std::size_t reps, std::uint64_t seed) {
  return SimDesign{sigma, nss, sss, reps, seed, {}};
}

void expect_same(const CellResult& a, const CellResult& b) {
  ASSERT_EQ(a.per_criterion.size(), b.per_criterion.size());
  for (std::size_t i = 0; i < a.per_criterion.size(); ++i) {
    EXPECT_EQ(a.per_criterion[i].pda, b.per_criterion[i].pda);
    EXPECT_EQ(a.per_criterion[i].agr, b.per_criterion[i].agr);
    EXPECT_EQ(a.per_criterion[i].sum, b.per_criterion[i].sum);
    EXPECT_EQ(a.mc_se[i].pda, b.mc_se[i].pda);
  }
  EXPECT_EQ(a.singular_resamples, b.singular_resamples);
}

TEST(ValidateDesign, Bounds) {
  EXPECT_EQ(code_of([] { validate_design(design(kCorrelated, 40, 4, 10, 1)); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { validate_design(design(kCorrelated, 0, 25, 10, 1)); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { validate_design(design(kCorrelated, 40, 25, 0, 1)); }),
            ErrorCode::kInvalidArgument);
  SimDesign bad_criterion = design(kCorrelated, 40, 25, 10, 1);
  bad_criterion.criteria = {3};
  EXPECT_EQ(code_of([&] { validate_design(bad_criterion); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { validate_design(design(kCorrelated, 13, 77, 1, 1)); }), std::nullopt);
}

TEST(RunCell, PopulationRowIsAnalytic) {
  const CellResult cell = run_cell(design(kCorrelated, 40, 25, 3, 1));
  ASSERT_EQ(cell.per_criterion.size(), 3u);
  EXPECT_NEAR(cell.per_criterion[0].pop, 0.600, 5e-4);
  EXPECT_NEAR(cell.per_criterion[1].pop, 0.627, 5e-4);
  EXPECT_NEAR(cell.per_criterion[2].pop, 0.301, 5e-4);
  for (const auto& e : cell.per_criterion) {
    EXPECT_EQ(e.bias_pda, e.pop - e.pda);
    EXPECT_EQ(e.bias_agr, e.pop - e.agr);
    EXPECT_EQ(e.bias_sum, e.pop - e.sum);
  }
}

TEST(RunCell, OneSubsampleMakesPdaEqualAgr) {
  const SimDesign d = design(kNullCriterion, 1, 1000, 1, 0);
  const GramFactor factor = gram_factor(d.sigma);
  for (std::uint64_t s = 0; s < 25; ++s) {
    const ReplicationDraw draw = run_replication(d, factor, SeedSpec{s * 7919, s});
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(draw.pda[c], draw.agr[c]);
  }
}

TEST(RunCell, SingleReplicationHasNoStandardError) {
  const CellResult cell = run_cell(design(kCorrelated, 20, 50, 1, 4));
  EXPECT_FALSE(cell.mc_se_available());
  for (const auto& se : cell.mc_se) EXPECT_EQ(se.pda, 0.0);
}

TEST(RunCell, NullInflationAtTwentyFive) {
  SimDesign d = design(kNullCriterion, 40, 25, 500, 2026);
  d.criteria = {2};
  const CellResult cell = run_cell(d);
  const EstimateRecord& e = cell.per_criterion.front();
  EXPECT_GE(e.pda, 0.24);
  EXPECT_LE(e.pda, 0.29);
  EXPECT_GE(e.agr, 0.03);
  EXPECT_LE(e.agr, 0.06);
  EXPECT_LT(e.bias_pda, 0.0);
}

TEST(RunCell, NullMeanMatchesBetaOracle) {
  // With k = 2 null predictors, R^2 ~ Beta(1, (n - 3) / 2).
  for (std::size_t sss : {25u, 50u}) {
    SimDesign d = design(kNullCriterion, 1000 / sss, sss, 800, 99 + sss);
    d.criteria = {2};
    const CellResult cell = run_cell(d);
    const double oracle = testing::expected_sqrt_beta1((static_cast<double>(sss) - 3.0) / 2.0);
    EXPECT_NEAR(cell.per_criterion.front().pda, oracle, 3.0 * cell.mc_se.front().pda)
        << "sss = " << sss;
  }
}

TEST(RunCell, BetaOracleQuadrature) {
  // Closed form Gamma(1.5) Gamma(b + 1) / Gamma(b + 1.5) for comparison.
  for (double b : {11.0, 23.5, 37.0}) {
    const double closed =
        std::exp(std::lgamma(1.5) + std::lgamma(b + 1.0) - std::lgamma(b + 1.5));
    EXPECT_NEAR(testing::expected_sqrt_beta1(b), closed, 1e-9);
  }
}

TEST(RunCell, PdaMoreBiasedThanAgrAtLowValidity) {
  const CorrelationMatrix sigma = two_predictor_matrix(0.6, {0.1, 0.1});
  for (CellShape shape : {CellShape{40, 25}, CellShape{20, 50}}) {
    SimDesign d = design(sigma, shape.nss, shape.sss, 500, 314);
    d.criteria = {2};
    const CellResult cell = run_cell(d);
    const EstimateRecord& e = cell.per_criterion.front();
    const auto& se = cell.mc_se.front();
    EXPECT_GT(std::abs(e.bias_pda) - std::abs(e.bias_agr),
              2.0 * std::hypot(se.pda, se.agr));
  }
}

TEST(RunCell, BiasDecaysWithSubsampleSize) {
  SimDesign small = design(kCorrelated, 40, 25, 500, 8);
  SimDesign large = design(kCorrelated, 13, 77, 500, 8);
  small.criteria = large.criteria = {2};
  EXPECT_GT(std::abs(run_cell(small).per_criterion[0].bias_pda),
            std::abs(run_cell(large).per_criterion[0].bias_pda));
}

TEST(RunCell, ThreadCountDoesNotChangeResults) {
  const SimDesign d = design(kCorrelated, 20, 50, 64, 55);
  const CellResult one = run_cell(d, RunOptions{1, 3});
  const CellResult four = run_cell(d, RunOptions{4, 3});
  const CellResult again = run_cell(d, RunOptions{7, 3});
  expect_same(one, four);
  expect_same(one, again);
}

TEST(RunCell, CellOrdinalSelectsDisjointStreams) {
  const SimDesign d = design(kCorrelated, 20, 50, 8, 55);
  EXPECT_NE(run_cell(d, RunOptions{1, 0}).per_criterion[2].pda,
            run_cell(d, RunOptions{1, 1}).per_criterion[2].pda);
}

TEST(RunCell, SingularSubsamplesAreRedrawn) {
  // Predictors so close to collinear that small sub-samples often fall
  // under the inversion tolerance while the population matrix does not.
  const double r = 1.0 - 1e-10;
  const CorrelationMatrix sigma{{1.0, r, 0.2}, {r, 1.0, 0.2}, {0.2, 0.2, 1.0}};
  const CellResult cell = run_cell(design(sigma, 1, 5, 40, 12));
  EXPECT_GT(cell.singular_resamples, 0u);
  expect_same(cell, run_cell(design(sigma, 1, 5, 40, 12), RunOptions{3, 0}));
}

TEST(BiasTables, OrderedBySubsampleSize) {
  const SimDesign designs[] = {design(kCorrelated, 13, 77, 5, 1), design(kCorrelated, 40, 25, 5, 1),
                               design(kCorrelated, 20, 50, 5, 1)};
  const BiasTableSet set = reproduce_bias_tables(designs);
  ASSERT_EQ(set.blocks.size(), 3u);
  EXPECT_EQ(set.blocks[0].design.sss, 25u);
  EXPECT_EQ(set.blocks[1].design.sss, 50u);
  EXPECT_EQ(set.blocks[2].design.sss, 77u);
  // Each block keeps the substreams of its input position.
  expect_same(set.blocks[0], run_cell(designs[1], RunOptions{1, 1}));
}

TEST(BiasTables, Errors) {
  EXPECT_EQ(code_of([] { reproduce_bias_tables({}); }), ErrorCode::kEmptyInput);
  const SimDesign mixed[] = {design(kCorrelated, 40, 25, 2, 1), design(kNullCriterion, 40, 25, 2, 1)};
  EXPECT_EQ(code_of([&] { reproduce_bias_tables(mixed); }), ErrorCode::kInvalidArgument);
}

TEST(ValiditySweep, PopulationValidities) {
  const ValidityPair pairs[] = {{0, 0}, {.1, .1}, {.1, .2}, {.2, .3}, {.4, .2}};
  const CellShape shapes[] = {{40, 25}};
  const ValiditySweep sweep = validity_sweep(pairs, 0.6, shapes, 2, 1);
  const double expected[] = {.000, .112, .202, .301, .403};
  ASSERT_EQ(sweep.validities.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(sweep.validities[i], expected[i], 5e-4);
}

TEST(ValiditySweep, SingleCellIsRunCell) {
  const ValidityPair pairs[] = {{0, 0}};
  const CellShape shapes[] = {{40, 25}};
  const ValiditySweep sweep = validity_sweep(pairs, 0.6, shapes, 20, 77);
  SimDesign d = design(two_predictor_matrix(0.6, {0, 0}), 40, 25, 20, 77);
  d.criteria = {kSweepCriterion};
  expect_same(sweep.cells.front(), run_cell(d));
  const EstimateRecord& e = sweep.cells.front().per_criterion.front();
  EXPECT_DOUBLE_EQ(sweep.row_means[0].pda, std::abs(e.bias_pda));
  EXPECT_DOUBLE_EQ(sweep.row_diffs[0], std::abs(e.bias_pda) - std::abs(e.bias_agr));
  EXPECT_DOUBLE_EQ(sweep.col_means[0],
                   (std::abs(e.bias_pda) + std::abs(e.bias_agr) + std::abs(e.bias_sum)) / 3.0);
}

TEST(ValiditySweep, MarginsAreMeansOfMagnitudes) {
  const ValidityPair pairs[] = {{0, 0}, {.2, .3}};
  const CellShape shapes[] = {{40, 25}, {20, 50}};
  const ValiditySweep sweep = validity_sweep(pairs, 0.6, shapes, 30, 5);
  double total = 0.0;
  for (std::size_t s = 0; s < 2; ++s) {
    double col = 0.0;
    for (std::size_t v = 0; v < 2; ++v) {
      const EstimateRecord& e = sweep.cell(v, s).per_criterion.front();
      col += std::abs(e.bias_pda) + std::abs(e.bias_agr) + std::abs(e.bias_sum);
    }
    EXPECT_NEAR(sweep.col_means[s], col / 6.0, 1e-15);
    total += col / 6.0;
  }
  EXPECT_NEAR(sweep.grand_mean, total / 2.0, 1e-15);
}

TEST(ValiditySweep, InconsistentPairIsRejected) {
  const ValidityPair pairs[] = {{0.9, -0.9}};
  const CellShape shapes[] = {{40, 25}};
  EXPECT_EQ(code_of([&] { validity_sweep(pairs, 0.6, shapes, 2, 1); }),
            ErrorCode::kNotPositiveSemidefinite);
}

}  // namespace
}  // namespace valsim
