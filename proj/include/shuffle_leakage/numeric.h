// Copyright 2026 The Shuffle Leakage Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHUFFLE_LEAKAGE_NUMERIC_H_
#define SHUFFLE_LEAKAGE_NUMERIC_H_

#include <cmath>
#include <cstdint>
#include <span>

namespace shuffle_leakage {

// Neumaier-compensated accumulator. Results depend only on the order in
// which values are added.
class CompensatedSum {
 public:
  void Add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  double Total() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline double SumCompensated(std::span<const double> values) {
  CompensatedSum sum;
  for (double v : values) sum.Add(v);
  return sum.Total();
}

// x * log(x) with the 0 * log 0 = 0 convention.
inline double XLogX(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// log C(n, k) via log-gamma.
inline double LogBinomialCoefficient(int64_t n, int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// Binomial(n, p) mass at k. Handles the degenerate p in {0, 1} exactly.
inline double BinomialPmf(int64_t n, int64_t k, double p) {
  if (k < 0 || k > n) return 0.0;
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  return std::exp(LogBinomialCoefficient(n, k) +
                  static_cast<double>(k) * std::log(p) +
                  static_cast<double>(n - k) * std::log1p(-p));
}

}  // namespace shuffle_leakage

#endif  // SHUFFLE_LEAKAGE_NUMERIC_H_
