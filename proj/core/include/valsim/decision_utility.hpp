#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "valsim/rng.hpp"

namespace valsim {

/// Joint proportions of test decision (pass/fail) by criterion outcome
/// (qualified/unqualified).
class FourfoldTable {
 public:
  /// Cells must be nonnegative and sum to 1 within 1e-9.
  FourfoldTable(double tp, double fp, double fn, double tn);

  double tp() const noexcept { return tp_; }
  double fp() const noexcept { return fp_; }
  double fn() const noexcept { return fn_; }
  double tn() const noexcept { return tn_; }

  double quota() const noexcept { return tp_ + fp_; }
  double base_rate() const noexcept { return tp_ + fn_; }
  double negative_base_rate() const noexcept { return fp_ + tn_; }

 private:
  double tp_, fp_, fn_, tn_;
};

struct UtilityReport {
  double prc = 0.0;       ///< total proportion correct, tp + tn
  double gain = 0.0;      ///< prc - max(b+, b-)
  double hit_rate = 0.0;  ///< tp / b+
};

/// P(X > h, Y > k) for a standard bivariate normal with correlation rho,
/// accurate to about 1e-15 (Drezner-Wesolowsky / Genz Gauss-Legendre scheme).
double binorm_upper(double h, double k, double rho);

/// Latent bivariate-normal test/criterion model dichotomized at the test
/// threshold Q^{-1}(quota) and the criterion threshold Q^{-1}(base_rate).
/// Throws DegenerateRate when either rate is 0 or 1.
FourfoldTable fourfold_from(double validity, double base_rate, double quota);

/// Throws ZeroBaseRate when b+ is 0.
UtilityReport utility(const FourfoldTable& table);

struct GridCell {
  double validity = 0.0;
  double base_rate = 0.0;
  double quota = 0.0;
  FourfoldTable table{0.25, 0.25, 0.25, 0.25};
  UtilityReport report;
  /// 100 * prc, 100 * gain and 100 * hit_rate rounded half away from zero.
  int percent_correct = 0;
  int gain_loss = 0;
  int hit_rate = 0;
};

/// One entry per (base_rate, quota, validity), base rate outermost and
/// validity innermost.
struct UtilityGrid {
  std::vector<double> validities;
  std::vector<double> base_rates;
  std::vector<double> quotas;
  std::vector<GridCell> cells;

  const GridCell& at(std::size_t base_rate, std::size_t quota, std::size_t validity) const {
    return cells[(base_rate * quotas.size() + quota) * validities.size() + validity];
  }
};

UtilityGrid table5b(std::span<const double> validities, std::span<const double> base_rates,
                    std::span<const double> quotas);

/// Published integer percentages for one grid cell.
struct ReferenceCell {
  double validity = 0.0;
  double base_rate = 0.0;
  double quota = 0.0;
  int percent_correct = 0;
  int gain_loss = 0;
  int hit_rate = 0;
};

struct GridDiscrepancy {
  ReferenceCell reference;
  /// Which column disagrees: "%C", "G/L" or "HR".
  std::string column;
  int published = 0;
  double computed = 0.0;
};

/// Lists every published value farther than `tolerance` points from the
/// computed percentage after rounding to an integer.
std::vector<GridDiscrepancy> compare_grid(std::span<const ReferenceCell> reference,
                                          double tolerance = 1.0);

struct OrthantEstimate {
  double probability = 0.0;
  double standard_error = 0.0;
  std::size_t draws = 0;
};

/// Monte Carlo check of binorm_upper: the fraction of bivariate normal draws
/// with correlation rho landing in {X > h, Y > k}.
OrthantEstimate mc_orthant_oracle(double h, double k, double rho, std::size_t draws,
                                  const SeedSpec& seed);

}  // namespace valsim
