#include "behavsteg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "behavsteg/error.hpp"

namespace behavsteg {
namespace {

constexpr double kSumTolerance = 1e-9;
constexpr int kMaxOrder = 20;  // 20! still fits in 64 bits

void require_comparable(const Histogram& p, const Histogram& q) {
  if (p.size() != q.size()) {
    throw ValidationError("histograms have " + std::to_string(p.size()) +
                          " and " + std::to_string(q.size()) + " bins");
  }
  if (!p.is_normalized() || !q.is_normalized()) {
    throw ValidationError("distance requires normalized histograms");
  }
}

// Lehmer rank of the permutation `perm` (values 0..m-1).
std::uint64_t lehmer_rank(std::span<const int> perm) {
  std::uint64_t rank = 0;
  const std::size_t m = perm.size();
  for (std::size_t i = 0; i < m; ++i) {
    std::uint64_t smaller = 0;
    for (std::size_t j = i + 1; j < m; ++j) {
      if (perm[j] < perm[i]) ++smaller;
    }
    rank = rank * (m - i) + smaller;
  }
  return rank;
}

}  // namespace

std::size_t min_series_length(PeParams params) {
  return static_cast<std::size_t>(params.order - 1) *
             static_cast<std::size_t>(params.delay) +
         1;
}

double permutation_entropy(std::span<const double> series, PeParams params) {
  if (params.order < 2 || params.order > kMaxOrder) {
    throw ValidationError("permutation entropy order must be in [2, 20]");
  }
  if (params.delay < 1) {
    throw ValidationError("permutation entropy delay must be >= 1");
  }
  for (double v : series) {
    if (!std::isfinite(v)) throw ValidationError("series contains non-finite values");
  }
  const std::size_t needed = min_series_length(params);
  if (series.size() < needed) {
    throw InsufficientDataError("series of length " +
                                std::to_string(series.size()) + " needs at least " +
                                std::to_string(needed) + " values");
  }

  const auto m = static_cast<std::size_t>(params.order);
  const auto tau = static_cast<std::size_t>(params.delay);
  const std::size_t patterns = series.size() - (m - 1) * tau;

  std::unordered_map<std::uint64_t, std::size_t> counts;
  std::vector<int> order(m);
  for (std::size_t start = 0; start < patterns; ++start) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return series[start + static_cast<std::size_t>(a) * tau] <
             series[start + static_cast<std::size_t>(b) * tau];
    });
    ++counts[lehmer_rank(order)];
  }

  double h = 0.0;
  const auto total = static_cast<double>(patterns);
  for (const auto& [pattern, count] : counts) {
    const double p = static_cast<double>(count) / total;
    h -= p * std::log(p);
  }
  const double max_h = std::lgamma(static_cast<double>(m) + 1.0);
  return std::clamp(h / max_h, 0.0, 1.0);
}

Histogram::Histogram(std::vector<double> bins) : bins_(std::move(bins)) {
  for (double b : bins_) {
    if (!std::isfinite(b) || b < 0.0) {
      throw ValidationError("histogram bins must be finite and >= 0");
    }
  }
}

Histogram Histogram::probabilities(std::vector<double> probs) {
  Histogram h(std::move(probs));
  if (std::abs(h.total() - 1.0) > kSumTolerance) {
    throw ValidationError("probabilities sum to " + std::to_string(h.total()));
  }
  h.normalized_ = true;
  return h;
}

Histogram Histogram::of(const HourlyDistribution& dist) {
  return probabilities({dist.probs().begin(), dist.probs().end()});
}

Histogram Histogram::binned(std::span<const double> values, double lo,
                            double hi, std::size_t bin_count) {
  if (bin_count == 0 || !(hi > lo)) {
    throw ValidationError("binning needs at least one bin and hi > lo");
  }
  std::vector<double> bins(bin_count, 0.0);
  const double width = (hi - lo) / static_cast<double>(bin_count);
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("cannot bin a non-finite value");
    auto idx = static_cast<std::ptrdiff_t>(std::floor((v - lo) / width));
    idx = std::clamp<std::ptrdiff_t>(idx, 0,
                                     static_cast<std::ptrdiff_t>(bin_count) - 1);
    bins[static_cast<std::size_t>(idx)] += 1.0;
  }
  return Histogram(std::move(bins));
}

double Histogram::total() const noexcept {
  return std::accumulate(bins_.begin(), bins_.end(), 0.0);
}

Histogram Histogram::normalized() const {
  if (normalized_) return *this;
  const double sum = total();
  if (sum <= 0.0) throw InsufficientDataError("histogram has no mass");
  Histogram out;
  out.bins_.reserve(bins_.size());
  for (double b : bins_) out.bins_.push_back(b / sum);
  out.normalized_ = true;
  return out;
}

double total_variation(const Histogram& p, const Histogram& q) {
  require_comparable(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sum += std::abs(p.bins()[i] - q.bins()[i]);
  }
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

double kl_divergence(const Histogram& p, const Histogram& q) {
  require_comparable(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.bins()[i];
    const double qi = q.bins()[i];
    if (pi == 0.0) continue;
    if (qi == 0.0) {
      throw ValidationError("KL divergence undefined: q[" + std::to_string(i) +
                            "] = 0 where p > 0");
    }
    sum += pi * std::log(pi / qi);
  }
  return std::max(sum, 0.0);
}

double js_divergence(const Histogram& p, const Histogram& q) {
  require_comparable(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.bins()[i];
    const double qi = q.bins()[i];
    const double mi = 0.5 * (pi + qi);
    if (pi > 0.0) sum += 0.5 * pi * std::log(pi / mi);
    if (qi > 0.0) sum += 0.5 * qi * std::log(qi / mi);
  }
  return std::clamp(sum, 0.0, std::log(2.0));
}

double distance(HistogramDistance kind, const Histogram& p,
                const Histogram& q) {
  switch (kind) {
    case HistogramDistance::kTotalVariation:
      return total_variation(p, q);
    case HistogramDistance::kJensenShannon:
      return js_divergence(p, q);
    case HistogramDistance::kKullbackLeibler:
      return kl_divergence(p, q);
  }
  return total_variation(p, q);
}

std::string_view to_string(HistogramDistance kind) noexcept {
  switch (kind) {
    case HistogramDistance::kTotalVariation:
      return "tv";
    case HistogramDistance::kJensenShannon:
      return "js";
    case HistogramDistance::kKullbackLeibler:
      return "kl";
  }
  return "tv";
}

std::optional<HistogramDistance> parse_histogram_distance(
    std::string_view name) noexcept {
  if (name == "tv") return HistogramDistance::kTotalVariation;
  if (name == "js") return HistogramDistance::kJensenShannon;
  if (name == "kl") return HistogramDistance::kKullbackLeibler;
  return std::nullopt;
}

HourlyDistribution hourly_histogram(const ActivityLog& log,
                                    std::optional<std::string_view> user) {
  std::array<double, kSlotCount> counts{};
  double total = 0.0;
  for (const auto& ev : log.events()) {
    if (!is_post(ev.kind)) continue;
    if (user && ev.user_id != *user) continue;
    counts[static_cast<std::size_t>(hour_of_day(ev.timestamp))] += 1.0;
    total += 1.0;
  }
  if (total == 0.0) {
    throw InsufficientDataError("no post events to build an hourly histogram");
  }
  return HourlyDistribution::from_weights(counts);
}

HourlyDistribution hourly_histogram(std::span<const Timestamp> timestamps) {
  if (timestamps.empty()) {
    throw InsufficientDataError("no timestamps to build an hourly histogram");
  }
  std::array<double, kSlotCount> counts{};
  for (Timestamp t : timestamps) {
    counts[static_cast<std::size_t>(hour_of_day(t))] += 1.0;
  }
  return HourlyDistribution::from_weights(counts);
}

}  // namespace behavsteg
