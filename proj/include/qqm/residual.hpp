#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "qqm/grid.hpp"

namespace qqm {

struct ResidualReport {
  double linf = 0.0;
  /// Root mean square over the evaluated points.
  double l2 = 0.0;
  /// Fraction of candidate points excluded from the evaluation.
  double masked_fraction = 0.0;
  std::optional<RealField> field;
};

/// Accumulates residual magnitudes in a fixed order.
class ResidualAccumulator {
 public:
  void add(double r) {
    linf_ = std::max(linf_, r);
    sum_sq_ += r * r;
    ++count_;
  }
  void skip() { ++skipped_; }

  ResidualReport report(double scale = 1.0) const {
    ResidualReport rep;
    rep.linf = linf_ / scale;
    rep.l2 = count_ ? std::sqrt(sum_sq_ / static_cast<double>(count_)) / scale : 0.0;
    const std::size_t total = count_ + skipped_;
    rep.masked_fraction = total ? static_cast<double>(skipped_) / static_cast<double>(total) : 0.0;
    return rep;
  }

 private:
  double linf_ = 0.0;
  double sum_sq_ = 0.0;
  std::size_t count_ = 0;
  std::size_t skipped_ = 0;
};

}  // namespace qqm
