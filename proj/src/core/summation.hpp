#pragma once

namespace plateau {

// Compensated accumulator. Chunked reductions sum per-chunk Kahan
// totals in chunk order, so results do not depend on the worker count.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  void merge(const KahanSum& other) {
    add(other.sum_);
    add(-other.comp_);
  }
  double value() const { return sum_ - comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace plateau
