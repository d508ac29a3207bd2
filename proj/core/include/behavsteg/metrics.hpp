#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "behavsteg/activity.hpp"
#include "behavsteg/timing_codec.hpp"

namespace behavsteg {

/// Ordinal-pattern parameters: embedding order m and delay tau.
struct PeParams {
  int order = 3;
  int delay = 1;
};

/// Shortest series for which `params` yields at least one pattern.
std::size_t min_series_length(PeParams params);

/// Normalized Bandt-Pompe permutation entropy in [0, 1]. Ties inside a
/// pattern rank the earlier index lower. Throws ValidationError on bad
/// parameters or non-finite values, InsufficientDataError on a short series.
double permutation_entropy(std::span<const double> series,
                           PeParams params = {});

/// Temporal relevance H() of a sequence; normalized permutation entropy.
inline double temporal_relevance(std::span<const double> series,
                                 PeParams params = {}) {
  return permutation_entropy(series, params);
}

class Histogram {
 public:
  Histogram() = default;
  /// Raw non-negative bin masses. Throws ValidationError otherwise.
  explicit Histogram(std::vector<double> bins);

  /// Probabilities; throws ValidationError unless they sum to 1 within 1e-9.
  static Histogram probabilities(std::vector<double> probs);
  static Histogram of(const HourlyDistribution& dist);

  /// Equal-width bins over [lo, hi]; values outside are clamped to the edge
  /// bins. Counts are not normalized.
  static Histogram binned(std::span<const double> values, double lo, double hi,
                          std::size_t bin_count);

  /// Throws InsufficientDataError when the total mass is zero.
  Histogram normalized() const;

  const std::vector<double>& bins() const noexcept { return bins_; }
  std::size_t size() const noexcept { return bins_.size(); }
  bool is_normalized() const noexcept { return normalized_; }
  double total() const noexcept;

 private:
  std::vector<double> bins_;
  bool normalized_ = false;
};

/// 1/2 sum |p_i - q_i|, in [0, 1].
double total_variation(const Histogram& p, const Histogram& q);

/// Jensen-Shannon divergence, natural log, in [0, ln 2].
double js_divergence(const Histogram& p, const Histogram& q);

/// KL(p || q), natural log. Throws ValidationError when q_i = 0 < p_i.
double kl_divergence(const Histogram& p, const Histogram& q);

enum class HistogramDistance { kTotalVariation, kJensenShannon, kKullbackLeibler };

double distance(HistogramDistance kind, const Histogram& p, const Histogram& q);
std::string_view to_string(HistogramDistance kind) noexcept;
std::optional<HistogramDistance> parse_histogram_distance(
    std::string_view name) noexcept;

/// Normalized hour-of-day counts of post_original and retweet events,
/// optionally restricted to one actor. Throws InsufficientDataError when
/// no such event exists.
HourlyDistribution hourly_histogram(
    const ActivityLog& log, std::optional<std::string_view> user = std::nullopt);

/// Hour-of-day distribution of arbitrary timestamps.
HourlyDistribution hourly_histogram(std::span<const Timestamp> timestamps);

}  // namespace behavsteg
