// Copyright 2026 The pqs Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace pqs {

/// Fixed-width 1-D histogram over [lo, hi). Out-of-range values land in
/// underflow/overflow and are excluded from mass().
class Histogram {
 public:
  Histogram() = default;
  Histogram(double lo, double hi, std::size_t bins);
  /// Bins of the given width covering [lo, hi); width must divide the range.
  static Histogram with_width(double lo, double hi, double width);

  void add(double value);
  /// Bin-wise sum; both histograms must share the same binning.
  void merge(const Histogram& other);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::size_t bins() const { return counts_.size(); }
  double width() const { return (hi_ - lo_) / static_cast<double>(counts_.size()); }
  double center(std::size_t i) const { return lo_ + (static_cast<double>(i) + 0.5) * width(); }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t underflow() const { return underflow_; }
  std::uint64_t overflow() const { return overflow_; }
  std::uint64_t in_range() const;
  std::uint64_t total() const { return in_range() + underflow_ + overflow_; }
  /// Counts normalized to unit sum over in-range bins.
  std::vector<double> mass() const;

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<std::uint64_t> counts_;
  std::uint64_t underflow_ = 0;
  std::uint64_t overflow_ = 0;
};

/// Streaming mean/variance (Welford), mergeable with Chan's pairwise update.
struct RunningStats {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const RunningStats& other);
  /// Unbiased sample variance; zero for n < 2.
  double variance() const;
  double stddev() const;
  /// stddev / sqrt(n).
  double stderr_of_mean() const;
};

}  // namespace pqs
