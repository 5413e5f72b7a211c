#include "valsim/decision_utility.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "valsim/error.hpp"
#include "valsim/mvn_sampler.hpp"
#include "valsim/normal.hpp"

namespace valsim {

FourfoldTable::FourfoldTable(double tp, double fp, double fn, double tn)
    : tp_(tp), fp_(fp), fn_(fn), tn_(tn) {
  for (double c : {tp, fp, fn, tn}) {
    if (!(c >= 0.0 && c <= 1.0)) {
      raise(ErrorCode::kInvalidArgument, "fourfold cells must lie in [0, 1]");
    }
  }
  if (std::abs(tp + fp + fn + tn - 1.0) > 1e-9) {
    raise(ErrorCode::kInvalidArgument, "fourfold cells must sum to 1");
  }
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] (positive half), 6, 12 and 20 points.
constexpr std::array<double, 3> kW6 = {0.1713244923791705, 0.3607615730481384,
                                       0.4679139345726904};
constexpr std::array<double, 3> kX6 = {0.9324695142031522, 0.6612093864662647,
                                       0.2386191860831970};
constexpr std::array<double, 6> kW12 = {0.04717533638651177, 0.1069393259953183,
                                        0.1600783285433464,  0.2031674267230659,
                                        0.2334925365383547,  0.2491470458134029};
constexpr std::array<double, 6> kX12 = {0.9815606342467191, 0.9041172563704750,
                                        0.7699026741943050, 0.5873179542866171,
                                        0.3678314989981802, 0.1252334085114692};
constexpr std::array<double, 10> kW20 = {
    0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
    0.1019301198172404,  0.1181945319615184,  0.1316886384491766,  0.1420961093183821,
    0.1491729864726037,  0.1527533871307259};
constexpr std::array<double, 10> kX20 = {
    0.9931285991850949, 0.9639719272779138, 0.9122344282513259, 0.8391169718222188,
    0.7463319064601508, 0.6360536807265150, 0.5108670019508271, 0.3737060887154196,
    0.2277858511416451, 0.07652652113349733};

struct Rule {
  std::span<const double> w;
  std::span<const double> x;
};

Rule rule_for(double abs_r) {
  if (abs_r < 0.3) return {kW6, kX6};
  if (abs_r < 0.75) return {kW12, kX12};
  return {kW20, kX20};
}

}  // namespace

namespace {

int percent(double proportion) { return static_cast<int>(std::lround(100.0 * proportion)); }

}  // namespace

double binorm_upper(double h, double k, double rho) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (h == kInf || k == kInf) return 0.0;
  if (h == -kInf) return k == -kInf ? 1.0 : normal_upper(k);
  if (k == -kInf) return normal_upper(h);
  if (rho == 0.0) return normal_upper(h) * normal_upper(k);

  constexpr double two_pi = 2.0 * std::numbers::pi;
  double hk = h * k;
  double bvn = 0.0;
  const Rule rule = rule_for(std::abs(rho));

  if (std::abs(rho) < 0.925) {
    // Integrate the density along the correlation parameter from 0 to rho.
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(rho) / 2.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      for (double node : {1.0 - rule.x[i], 1.0 + rule.x[i]}) {
        const double sn = std::sin(asr * node);
        bvn += rule.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    bvn = bvn * asr / two_pi + normal_upper(h) * normal_upper(k);
  } else {
    // Near |rho| = 1: expand around the degenerate distribution.
    if (rho < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (std::abs(rho) < 1.0) {
      const double as = (1.0 - rho) * (1.0 + rho);
      double a = std::sqrt(as);
      const double bs = (h - k) * (h - k);
      const double c = (4.0 - hk) / 8.0;
      const double d = (12.0 - hk) / 80.0;
      double asr = -(bs / as + hk) / 2.0;
      if (asr > -100.0) {
        bvn = a * std::exp(asr) *
              (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
      }
      if (hk > -100.0) {
        const double b = std::sqrt(bs);
        const double sp = std::sqrt(two_pi) * normal_cdf(-b / a);
        bvn -= std::exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
      }
      a /= 2.0;
      double sum = 0.0;
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        for (double node : {1.0 - rule.x[i], 1.0 + rule.x[i]}) {
          const double xs = (a * node) * (a * node);
          asr = -(bs / xs + hk) / 2.0;
          if (asr <= -100.0) continue;
          const double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
          const double rs = std::sqrt(1.0 - xs);
          const double ep = std::exp(-(hk / 2.0) * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
          sum += rule.w[i] * std::exp(asr) * (sp - ep);
        }
      }
      bvn = (a * sum - bvn) / two_pi;
    }
    if (rho > 0.0) {
      bvn += normal_upper(std::max(h, k));
    } else if (h >= k) {
      bvn = -bvn;
    } else {
      const double band = h < 0.0 ? normal_cdf(k) - normal_cdf(h)
                                  : normal_upper(h) - normal_upper(k);
      bvn = band - bvn;
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

FourfoldTable fourfold_from(double validity, double base_rate, double quota) {
  if (!(validity >= -1.0 && validity <= 1.0)) {
    raise(ErrorCode::kInvalidArgument, "validity must lie in [-1, 1]");
  }
  if (!(base_rate > 0.0 && base_rate < 1.0)) {
    raise(ErrorCode::kDegenerateRate, "base rate must lie strictly between 0 and 1");
  }
  if (!(quota > 0.0 && quota < 1.0)) {
    raise(ErrorCode::kDegenerateRate, "quota must lie strictly between 0 and 1");
  }
  double tp;
  if (validity == 0.0) {
    tp = quota * base_rate;
  } else {
    const double test_cut = normal_upper_quantile(quota);
    const double criterion_cut = normal_upper_quantile(base_rate);
    tp = binorm_upper(test_cut, criterion_cut, validity);
  }
  // The remaining cells follow from the margins; rounding can leave -1e-17.
  tp = std::clamp(tp, 0.0, std::min(quota, base_rate));
  const double fp = std::max(0.0, quota - tp);
  const double fn = std::max(0.0, base_rate - tp);
  const double tn = std::max(0.0, 1.0 - quota - base_rate + tp);
  return FourfoldTable(tp, fp, fn, tn);
}

UtilityReport utility(const FourfoldTable& table) {
  const double b_pos = table.base_rate();
  if (!(b_pos > 0.0)) {
    raise(ErrorCode::kZeroBaseRate, "hit rate is undefined when no candidate is qualified");
  }
  UtilityReport report;
  report.prc = table.tp() + table.tn();
  report.gain = report.prc - std::max(b_pos, table.negative_base_rate());
  report.hit_rate = table.tp() / b_pos;
  return report;
}

UtilityGrid table5b(std::span<const double> validities, std::span<const double> base_rates,
                    std::span<const double> quotas) {
  if (validities.empty() || base_rates.empty() || quotas.empty()) {
    raise(ErrorCode::kEmptyInput, "utility grid needs validities, base rates and quotas");
  }
  UtilityGrid grid;
  grid.validities.assign(validities.begin(), validities.end());
  grid.base_rates.assign(base_rates.begin(), base_rates.end());
  grid.quotas.assign(quotas.begin(), quotas.end());
  for (double b : base_rates) {
    for (double q : quotas) {
      for (double r : validities) {
        GridCell cell{r, b, q, fourfold_from(r, b, q), {}, 0, 0, 0};
        cell.report = utility(cell.table);
        cell.percent_correct = percent(cell.report.prc);
        cell.gain_loss = percent(cell.report.gain);
        cell.hit_rate = percent(cell.report.hit_rate);
        grid.cells.push_back(cell);
      }
    }
  }
  return grid;
}

std::vector<GridDiscrepancy> compare_grid(std::span<const ReferenceCell> reference,
                                          double tolerance) {
  std::vector<GridDiscrepancy> out;
  for (const auto& ref : reference) {
    const UtilityReport u = utility(fourfold_from(ref.validity, ref.base_rate, ref.quota));
    const std::array<std::pair<const char*, std::pair<int, double>>, 3> columns{{
        {"%C", {ref.percent_correct, 100.0 * u.prc}},
        {"G/L", {ref.gain_loss, 100.0 * u.gain}},
        {"HR", {ref.hit_rate, 100.0 * u.hit_rate}},
    }};
    for (const auto& [name, values] : columns) {
      if (std::abs(values.first - percent(values.second / 100.0)) > tolerance) {
        out.push_back({ref, name, values.first, values.second});
      }
    }
  }
  return out;
}

OrthantEstimate mc_orthant_oracle(double h, double k, double rho, std::size_t draws,
                                  const SeedSpec& seed) {
  if (draws < 1) raise(ErrorCode::kInvalidArgument, "at least one draw is required");
  const GramFactor factor = gram_factor(CorrelationMatrix{{1.0, rho}, {rho, 1.0}});
  constexpr std::size_t kChunk = 1u << 20;
  std::size_t hits = 0;
  std::size_t done = 0;
  for (std::uint64_t chunk = 0; done < draws; ++chunk) {
    const std::size_t n = std::min(kChunk, draws - done);
    const ScoreMatrix y = mvn_sample(factor, n, seed.child(chunk));
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      if (y(i, 0) > h && y(i, 1) > k) ++hits;
    }
    done += n;
  }
  OrthantEstimate est;
  est.draws = draws;
  est.probability = static_cast<double>(hits) / static_cast<double>(draws);
  est.standard_error =
      std::sqrt(est.probability * (1.0 - est.probability) / static_cast<double>(draws));
  return est;
}

}  // namespace valsim
