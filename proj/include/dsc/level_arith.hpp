#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsc {

using Level = int32_t;
inline constexpr Level kNoLevel = -1;

// All threshold comparisons against beta powers share one one-sided 1e-9
// relative tolerance. Counts are integers and thresholds are products of
// table powers, so at beta = sqrt(2) the mathematically-exact ties
// (e.g. 8 vs beta^6) land on the correct side instead of depending on the
// rounding of the last multiply.
inline constexpr double kRelTol = 1e-9;

inline bool ge_tol(double a, double b) {
  return a >= b - kRelTol * std::fmax(1.0, std::fabs(b));
}

inline bool lt_tol(double a, double b) { return !ge_tol(a, b); }

// Run-wide parameters. beta = 1 + eps is evaluated once and stored; every
// beta^j comparison in the library goes through the table below.
struct Params {
  double eps = 0.2;
  double beta = 1.2;
  int64_t n_cap = 0;    // max simultaneous active elements
  double c_ratio = 1.0; // costs lie in [1/c_ratio, 1]

  Params(double eps_in, int64_t n_cap_in, double c_ratio_in)
      : eps(eps_in), beta(1.0 + eps_in), n_cap(n_cap_in), c_ratio(c_ratio_in) {
    // The sqrt(2)-tuned workloads need eps = 0.4142...; anything at or below
    // 0.42 keeps all structural constants of the scheme valid.
    if (!(eps > 0.0) || !(eps <= 0.42))
      throw std::invalid_argument("eps must lie in (0, 0.42], got " +
                                  std::to_string(eps_in));
    if (n_cap_in <= 0) throw std::invalid_argument("n_cap must be positive");
    if (!(c_ratio_in >= 1.0))
      throw std::invalid_argument("cost ratio must be >= 1");
  }
};

// Precomputed powers of beta over j in [-range, +range] with
// range = ceil(log_beta(n_cap * C)) + 4. Built once per engine by repeated
// multiplication from beta^0 = 1 so comparisons are mutually consistent
// between modules; out-of-range access is a level-arithmetic bug.
class BetaTable {
 public:
  explicit BetaTable(const Params& p) : beta_(p.beta), n_cap_(p.n_cap) {
    const double top = std::log(static_cast<double>(p.n_cap) * p.c_ratio) /
                       std::log(p.beta);
    range_ = static_cast<Level>(std::ceil(top)) + 4;
    pow_.resize(2 * range_ + 1);
    pow_[range_] = 1.0;
    for (Level j = 1; j <= range_; ++j)
      pow_[range_ + j] = pow_[range_ + j - 1] * beta_;
    for (Level j = 1; j <= range_; ++j)
      pow_[range_ - j] = pow_[range_ - j + 1] / beta_;
  }

  double beta() const { return beta_; }
  Level range() const { return range_; }

  double pow(Level j) const {
    if (j < -range_ || j > range_)
      throw std::logic_error("beta_pow: level " + std::to_string(j) +
                             " outside table range " + std::to_string(range_));
    return pow_[range_ + j];
  }

  // The unique l with pow(l) <= count/cost < pow(l+1), ties resolved with
  // ge_tol. Table search, never a floating logarithm, so it can't disagree
  // with pow() at range boundaries.
  Level level_of_ratio(int64_t count, double cost) const {
    if (count <= 0) throw std::invalid_argument("empty pair has no level");
    if (!(cost > 0.0)) throw std::invalid_argument("cost must be positive");
    const double ratio = static_cast<double>(count) / cost;
    Level lo = -range_, hi = range_;
    if (!ge_tol(ratio, pow_[0]) || ge_tol(ratio, pow_[2 * range_]))
      throw std::logic_error("level_of_ratio: ratio outside table range");
    while (lo + 1 < hi) {
      const Level mid = lo + (hi - lo) / 2;
      if (ge_tol(ratio, pow_[range_ + mid]))
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  }

  // Relevant-level window for a set of the given cost:
  //   j_min = floor(log_beta(1/cost)) - 1,  j_max = ceil(log_beta(n_cap/cost)) - 1.
  // A set is never j-PD above j_max, and j-PD below j_min implies j_min-PD.
  std::pair<Level, Level> relevant_window(double cost) const {
    const Level j_min = level_of_ratio(1, cost) - 1;
    // smallest l with pow(l) >= n_cap/cost, minus 1
    const Level l = level_of_ratio(n_cap_, cost);
    const double ratio = static_cast<double>(n_cap_) / cost;
    const Level j_max = ge_tol(pow(l), ratio) ? l - 1 : l;  // ceil semantics
    return {j_min, j_max};
  }

 private:
  double beta_;
  int64_t n_cap_;
  Level range_;
  std::vector<double> pow_;
};

}  // namespace dsc
