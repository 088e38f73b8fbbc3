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

#include "pqs/histogram.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pqs {

Histogram::Histogram(double lo, double hi, std::size_t bins) : lo_(lo), hi_(hi), counts_(bins, 0) {
  if (!(hi > lo) || bins == 0) throw std::invalid_argument("Histogram: need hi > lo and bins > 0");
}

Histogram Histogram::with_width(double lo, double hi, double width) {
  const double n = (hi - lo) / width;
  const auto bins = static_cast<std::size_t>(std::llround(n));
  if (!(width > 0.0) || std::abs(n - static_cast<double>(bins)) > 1e-9 * n) {
    throw std::invalid_argument("Histogram: width must divide [lo, hi)");
  }
  return Histogram(lo, hi, bins);
}

void Histogram::add(double value) {
  if (value < lo_) {
    ++underflow_;
    return;
  }
  auto i = static_cast<std::size_t>((value - lo_) / width());
  if (i >= counts_.size()) {
    ++overflow_;
    return;
  }
  ++counts_[i];
}

void Histogram::merge(const Histogram& other) {
  if (other.counts_.size() != counts_.size() || other.lo_ != lo_ || other.hi_ != hi_) {
    throw std::invalid_argument("Histogram::merge: binning mismatch");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  underflow_ += other.underflow_;
  overflow_ += other.overflow_;
}

std::uint64_t Histogram::in_range() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::vector<double> Histogram::mass() const {
  std::vector<double> out(counts_.size(), 0.0);
  const std::uint64_t n = in_range();
  if (n == 0) return out;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    out[i] = static_cast<double>(counts_[i]) / static_cast<double>(n);
  }
  return out;
}

void RunningStats::add(double x) {
  ++n;
  const double delta = x - mean;
  mean += delta / static_cast<double>(n);
  m2 += delta * (x - mean);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n == 0) return;
  if (n == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n);
  const double nb = static_cast<double>(other.n);
  const double total = na + nb;
  const double delta = other.mean - mean;
  mean += delta * nb / total;
  m2 += other.m2 + delta * delta * na * nb / total;
  n += other.n;
}

double RunningStats::variance() const { return n < 2 ? 0.0 : m2 / static_cast<double>(n - 1); }

double RunningStats::stddev() const { return std::sqrt(variance()); }

double RunningStats::stderr_of_mean() const {
  return n == 0 ? 0.0 : stddev() / std::sqrt(static_cast<double>(n));
}

}  // namespace pqs
