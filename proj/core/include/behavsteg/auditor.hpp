#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "behavsteg/activity.hpp"
#include "behavsteg/metrics.hpp"
#include "behavsteg/timing_codec.hpp"

namespace behavsteg {

/// The six content/behavior security constraints, in audit order.
enum class Constraint : std::size_t {
  kInstantContent = 0,   // sentiment histogram vs population
  kTemporalContent,      // PE of sentiment series vs population mean
  kInstantVertex,        // posting-hour shape and activity volume
  kInstantEdge,          // interaction concentration/degree/reciprocity
  kTemporalVertex,       // PE of inter-post intervals
  kTemporalEdge,         // PE of per-window out-degree
};

inline constexpr std::size_t kConstraintCount = 6;

std::string_view to_string(Constraint c) noexcept;
std::optional<Constraint> parse_constraint(std::string_view name) noexcept;
constexpr std::size_t index(Constraint c) noexcept {
  return static_cast<std::size_t>(c);
}

/// I(v_t): what a single user does within one window.
struct VertexFeatures {
  std::size_t post_count = 0;
  double original_ratio = 0.0;
  HourlyDistribution hourly = HourlyDistribution::uniform();
  double mean_content_len = 0.0;
  /// False when the user has no events in the window (zero-activity flag).
  bool active = false;
};

/// J(E_t): how a single user's outgoing interactions are spread.
struct EdgeFeatures {
  /// Normalized Herfindahl index over targets: 1 for a single target,
  /// 0 for an even split or no interactions.
  double neighbor_concentration = 0.0;
  std::size_t out_degree = 0;
  /// Fraction of targets that interact back within the window.
  double reciprocity = 0.0;
};

VertexFeatures vertex_features(const ActivityLog& log, std::string_view user,
                               TimeWindow window);

EdgeFeatures edge_features(const ActivityLog& log, std::string_view user,
                           TimeWindow window,
                           EdgeKinds edge_kinds = all_targeted_kinds());

struct AuditConfig {
  PeParams pe;
  Timestamp window_len = kSecondsPerDay;
  HistogramDistance content_distance = HistogramDistance::kTotalVariation;
  HistogramDistance hourly_distance = HistogramDistance::kTotalVariation;
  std::size_t sentiment_bins = 20;
  EdgeKinds edge_kinds = all_targeted_kinds();
  /// Analysis range; defaults to the log's range widened to window bounds.
  std::optional<TimeWindow> range;
};

/// Throws ValidationError on out-of-range settings.
void validate(const AuditConfig& config);

/// The window-aligned range the audit runs over.
TimeWindow analysis_range(const ActivityLog& log, const AuditConfig& config);

/// Everything the auditor observes about one user over the analysis range.
/// Per-window features are averaged across windows; optional members are
/// empty when the user does not produce enough data for them.
struct UserProfile {
  std::string user;
  std::size_t window_count = 0;
  std::size_t post_count = 0;
  std::optional<Histogram> content;
  std::optional<HourlyDistribution> hourly;
  double post_rate = 0.0;
  double original_ratio = 0.0;
  double mean_content_len = 0.0;
  double concentration = 0.0;
  double out_degree = 0.0;
  double reciprocity = 0.0;
  std::optional<double> sentiment_pe;
  std::optional<double> interval_pe;
  std::optional<double> out_degree_pe;
};

UserProfile profile_user(const ActivityLog& log, std::string_view user,
                         const AuditConfig& config);

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

/// Population reference: mean feature values with their spread across users.
struct Baseline {
  std::size_t user_count = 0;
  std::optional<Histogram> content;
  std::optional<HourlyDistribution> hourly;
  Moments content_distance;
  Moments sentiment_pe;
  Moments post_rate;
  Moments original_ratio;
  Moments mean_content_len;
  Moments hourly_distance;
  Moments concentration;
  Moments out_degree;
  Moments reciprocity;
  Moments interval_pe;
  Moments out_degree_pe;
};

/// Throws ValidationError with fewer than two users.
Baseline build_baseline(const ActivityLog& log,
                        std::span<const std::string> users,
                        const AuditConfig& config);
Baseline build_baseline(std::span<const UserProfile> profiles,
                        const AuditConfig& config);

using ConstraintScores = std::array<std::optional<double>, kConstraintCount>;

/// Non-negative score per constraint; nullopt marks indeterminate.
ConstraintScores constraint_scores(const UserProfile& profile,
                                   const Baseline& baseline,
                                   const AuditConfig& config);

struct Thresholds {
  std::array<double, kConstraintCount> epsilon{};

  double operator[](Constraint c) const noexcept { return epsilon[index(c)]; }
};

/// Throws ValidationError on a negative or non-finite threshold.
void validate(const Thresholds& thresholds);

/// epsilon_k = nearest-rank `percentile` of the population's constraint-k
/// scores. Throws ValidationError unless 50 < percentile <= 100.
Thresholds calibrate_thresholds(const ActivityLog& log,
                                std::span<const std::string> users,
                                const Baseline& baseline,
                                const AuditConfig& config,
                                double percentile = 95.0);
Thresholds calibrate_thresholds(std::span<const UserProfile> profiles,
                                const Baseline& baseline,
                                const AuditConfig& config,
                                double percentile = 95.0);

enum class Verdict { kPass, kFail, kIndeterminate };
std::string_view to_string(Verdict v) noexcept;

struct ConstraintResult {
  Constraint constraint = Constraint::kInstantContent;
  std::optional<double> score;
  double threshold = 0.0;
  Verdict verdict = Verdict::kIndeterminate;

  bool pass() const noexcept { return verdict == Verdict::kPass; }
};

struct AuditReport {
  std::string user;
  std::array<ConstraintResult, kConstraintCount> constraints{};
  /// Conjunction of the six verdicts; indeterminate counts as failure.
  bool overall_pass = false;

  const ConstraintResult& operator[](Constraint c) const noexcept {
    return constraints[index(c)];
  }
  bool any_fail() const noexcept;
  bool any_indeterminate() const noexcept;
};

/// Applies thresholds to precomputed scores.
AuditReport evaluate(std::string user, const ConstraintScores& scores,
                     const Thresholds& thresholds);

/// Throws ValidationError when `user` has no events in `log`.
AuditReport audit(const ActivityLog& log, std::string_view user,
                  const Baseline& baseline, const Thresholds& thresholds,
                  const AuditConfig& config);

}  // namespace behavsteg
