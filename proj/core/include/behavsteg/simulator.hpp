#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "behavsteg/activity.hpp"
#include "behavsteg/auditor.hpp"
#include "behavsteg/timing_codec.hpp"

namespace behavsteg {

/// 2020-01-01T00:00:00Z.
inline constexpr Timestamp kDefaultSimulationStart = 1577836800;

/// Synthetic stand-in for the population's posting-hour profile: a smooth
/// day curve with a late-morning and a stronger evening peak. Matches the
/// bundled `population_hourly.tsv` fixture.
HourlyDistribution default_population_hourly();

enum class SentimentModel {
  /// x[t+1] = rho * x[t] + sigma * noise, clipped to [-1, 1], x[0] = 0.
  kAr1,
  /// AR(1) on the increments: v[t+1] = rho * v[t] + sigma * noise,
  /// x[t+1] = clip((1 - reversion) * x[t] + v[t+1]). Produces smoother
  /// mood trajectories than kAr1.
  kMomentum,
};

std::string_view to_string(SentimentModel m) noexcept;
std::optional<SentimentModel> parse_sentiment_model(std::string_view name) noexcept;

struct NormalUserParams {
  double posts_per_day = 3.0;
  HourlyDistribution hourly = default_population_hourly();
  /// Dirichlet concentration for the per-user perturbation of `hourly`.
  double hourly_concentration = 200.0;
  SentimentModel sentiment_model = SentimentModel::kAr1;
  double sentiment_rho = 0.8;
  double sentiment_sigma = 0.2;
  double sentiment_reversion = 0.05;
  std::size_t neighbor_count = 10;
  /// Share of posts that are retweets of a neighbor.
  double targeted_ratio = 0.35;
  std::size_t days = 30;
  /// When set, generation stops after exactly this many posts, running past
  /// `days` if needed.
  std::optional<std::size_t> post_limit;
  /// Rounded down to UTC midnight.
  Timestamp start = kDefaultSimulationStart;
  std::uint64_t seed = 0;
};

void validate(const NormalUserParams& params);

enum class StegoMode { kTimingChannel, kRandomContent };

struct StegoUserParams {
  StegoMode mode = StegoMode::kRandomContent;
  Bits payload;
  std::optional<Codebook> codebook;
  NormalUserParams base;
};

void validate(const StegoUserParams& params);

/// `population` supplies retweet targets; `user_id` itself is skipped.
ActivityLog gen_normal_user(const NormalUserParams& params,
                            std::string_view user_id,
                            std::span<const std::string> population);

/// Timing mode posts once per codeword at the scheduled times; throws
/// CapacityError (with the bits that fit) when the schedule runs past
/// base.days. Random-content mode keeps normal timing with iid uniform
/// sentiment.
ActivityLog gen_stego_user(const StegoUserParams& params,
                           std::string_view user_id,
                           std::span<const std::string> population);

enum class UserLabel { kNormal, kStegoTiming, kStegoContent };

std::string_view to_string(UserLabel label) noexcept;
std::optional<UserLabel> parse_user_label(std::string_view name) noexcept;

using Labels = std::map<std::string, UserLabel>;

struct PopulationSpec {
  std::size_t normal_users = 100;
  std::size_t stego_timing_users = 0;
  std::size_t stego_content_users = 0;
  NormalUserParams base;
  /// Timing users carry `payload` when set, otherwise `payload_bits` random
  /// bits drawn from the user's stream.
  std::optional<Bits> payload;
  std::size_t payload_bits = 128;
  Codebook codebook = reference_codebook();
  std::uint64_t seed = 0;
  /// Worker threads for generation; 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

struct Population {
  ActivityLog log;
  Labels labels;
  /// Ids in generation order: normal users first, then timing, then content.
  std::vector<std::string> users;
  /// Payload embedded by each timing-channel user.
  std::map<std::string, Bits> payloads;

  std::vector<std::string> users_with(UserLabel label) const;
};

/// Per-user seed derived from (master seed, user index); serial and
/// parallel generation agree.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

Population simulate_population(const PopulationSpec& spec);

struct ScoredUser {
  std::string user;
  /// Nullopt for indeterminate users; ranked as most suspicious.
  std::optional<double> score;
  bool positive = false;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct DetectionReport {
  std::vector<ScoredUser> users;
  std::vector<RocPoint> roc_points;
  double auc = 0.0;
};

/// ROC by descending score (positives = stego), tied scores advance as one
/// step; AUC by the trapezoid rule. Throws ValidationError when either
/// class is empty.
DetectionReport detection_report(std::vector<ScoredUser> users);

struct EveConfig {
  AuditConfig audit;
  Constraint constraint = Constraint::kTemporalContent;
};

/// Eve's experiment: baseline from the users labeled normal, then every
/// labeled user scored by the chosen constraint. Throws ValidationError
/// with fewer than two users in either class.
DetectionReport run_eve(const ActivityLog& log, const Labels& labels,
                        const EveConfig& config);

}  // namespace behavsteg
