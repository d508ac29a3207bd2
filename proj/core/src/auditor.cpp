#include "behavsteg/auditor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "behavsteg/error.hpp"

namespace behavsteg {
namespace {

constexpr std::array<std::string_view, kConstraintCount> kConstraintNames{
    "instantaneous_content",       "temporal_content",
    "instantaneous_vertex_behavior", "instantaneous_edge_behavior",
    "temporal_vertex_behavior",    "temporal_edge_behavior",
};

// Deviations are divided by max(stddev, kDispersionFloor); an exact match
// always scores 0.
constexpr double kDispersionFloor = 1e-9;

// Welford running mean/variance. Adding identical values keeps the mean
// bit-exact and the variance exactly zero.
class RunningMoments {
 public:
  void add(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  Moments moments() const noexcept {
    Moments m;
    m.count = count_;
    m.mean = mean_;
    m.stddev = count_ > 1
                   ? std::sqrt(std::max(m2_, 0.0) / static_cast<double>(count_))
                   : 0.0;
    return m;
  }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

class RunningVector {
 public:
  void add(std::span<const double> v) {
    if (bins_.empty()) bins_.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) bins_[i].add(v[i]);
    ++count_;
  }
  std::size_t count() const noexcept { return count_; }
  std::vector<double> mean() const {
    std::vector<double> out;
    out.reserve(bins_.size());
    for (const auto& b : bins_) out.push_back(b.moments().mean);
    return out;
  }

 private:
  std::vector<RunningMoments> bins_;
  std::size_t count_ = 0;
};

Timestamp ceil_to(Timestamp t, Timestamp step) {
  const Timestamp floor = t >= 0 ? (t / step) * step
                                 : -((-t + step - 1) / step) * step;
  return floor == t ? t : floor + step;
}

Timestamp floor_to(Timestamp t, Timestamp step) {
  const Timestamp c = ceil_to(t, step);
  return c == t ? t : c - step;
}

VertexFeatures window_vertex(std::span<const ActivityEvent> events,
                             std::string_view user) {
  VertexFeatures f;
  std::array<double, kSlotCount> hours{};
  std::size_t originals = 0;
  double len_sum = 0.0;
  std::size_t len_count = 0;
  for (const auto& ev : events) {
    if (ev.user_id != user) continue;
    f.active = true;
    if (ev.content_len) {
      len_sum += static_cast<double>(*ev.content_len);
      ++len_count;
    }
    if (!is_post(ev.kind)) continue;
    ++f.post_count;
    if (ev.kind == EventKind::kPostOriginal) ++originals;
    hours[static_cast<std::size_t>(hour_of_day(ev.timestamp))] += 1.0;
  }
  if (f.post_count > 0) {
    f.original_ratio =
        static_cast<double>(originals) / static_cast<double>(f.post_count);
    f.hourly = HourlyDistribution::from_weights(hours);
  }
  if (len_count > 0) f.mean_content_len = len_sum / static_cast<double>(len_count);
  return f;
}

EdgeFeatures window_edge(std::span<const ActivityEvent> events,
                         std::string_view user, EdgeKinds kinds) {
  std::map<std::string_view, std::size_t> targets;
  std::set<std::string_view> inbound;
  std::size_t total = 0;
  for (const auto& ev : events) {
    if (!ev.target_user || !kinds.test(static_cast<std::size_t>(ev.kind))) {
      continue;
    }
    if (ev.user_id == user) {
      ++targets[*ev.target_user];
      ++total;
    } else if (*ev.target_user == user) {
      inbound.insert(ev.user_id);
    }
  }
  EdgeFeatures f;
  const std::size_t k = targets.size();
  f.out_degree = k;
  if (k == 0) return f;
  if (k == 1) {
    f.neighbor_concentration = 1.0;
  } else {
    double herfindahl = 0.0;
    for (const auto& [target, count] : targets) {
      const double share = static_cast<double>(count) / static_cast<double>(total);
      herfindahl += share * share;
    }
    const double inv_k = 1.0 / static_cast<double>(k);
    f.neighbor_concentration =
        std::clamp((herfindahl - inv_k) / (1.0 - inv_k), 0.0, 1.0);
  }
  std::size_t mutual = 0;
  for (const auto& [target, count] : targets) {
    if (inbound.count(target) != 0) ++mutual;
  }
  f.reciprocity = static_cast<double>(mutual) / static_cast<double>(k);
  return f;
}

std::optional<double> try_pe(const std::vector<double>& series, PeParams pe) {
  if (series.size() < min_series_length(pe)) return std::nullopt;
  return permutation_entropy(series, pe);
}

double hist_distance(HistogramDistance kind, const Histogram& p,
                     const Histogram& q) {
  try {
    return distance(kind, p, q);
  } catch (const ValidationError&) {
    // KL with q_i = 0 < p_i diverges.
    return std::numeric_limits<double>::infinity();
  }
}

double normalized_deviation(double value, const Moments& m) {
  const double dev = std::abs(value - m.mean);
  if (dev == 0.0) return 0.0;
  return dev / std::max(m.stddev, kDispersionFloor);
}

// One-sided: only distances larger than the population's typical distance
// count as deviation.
double normalized_excess(double value, const Moments& m) {
  const double dev = value - m.mean;
  if (dev <= 0.0) return 0.0;
  return dev / std::max(m.stddev, kDispersionFloor);
}

std::optional<double> abs_diff(const std::optional<double>& value,
                               const Moments& m) {
  if (!value || m.count == 0) return std::nullopt;
  return std::abs(*value - m.mean);
}

double nearest_rank(std::vector<double> values, double percentile) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(percentile * n / 100.0 - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

std::vector<UserProfile> profile_all(const ActivityLog& log,
                                     std::span<const std::string> users,
                                     const AuditConfig& config) {
  std::vector<UserProfile> profiles;
  profiles.reserve(users.size());
  for (const auto& user : users) {
    profiles.push_back(profile_user(log, user, config));
  }
  return profiles;
}

}  // namespace

std::string_view to_string(Constraint c) noexcept {
  return kConstraintNames[index(c)];
}

std::optional<Constraint> parse_constraint(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kConstraintNames.size(); ++i) {
    if (kConstraintNames[i] == name || std::to_string(i + 1) == name) {
      return static_cast<Constraint>(i);
    }
  }
  return std::nullopt;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kIndeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

VertexFeatures vertex_features(const ActivityLog& log, std::string_view user,
                               TimeWindow window) {
  window = TimeWindow::make(window.begin, window.end);
  return window_vertex(log.slice(window), user);
}

EdgeFeatures edge_features(const ActivityLog& log, std::string_view user,
                           TimeWindow window, EdgeKinds edge_kinds) {
  window = TimeWindow::make(window.begin, window.end);
  return window_edge(log.slice(window), user, edge_kinds);
}

void validate(const AuditConfig& config) {
  if (config.pe.order < 2) throw ValidationError("pe order must be >= 2");
  if (config.pe.delay < 1) throw ValidationError("pe delay must be >= 1");
  if (config.window_len <= 0) throw ValidationError("window length must be > 0");
  if (config.sentiment_bins == 0) {
    throw ValidationError("sentiment bin count must be > 0");
  }
  if (config.range) TimeWindow::make(config.range->begin, config.range->end);
}

TimeWindow analysis_range(const ActivityLog& log, const AuditConfig& config) {
  validate(config);
  if (config.range) return *config.range;
  const auto span = log.time_range();
  if (!span) throw InsufficientDataError("cannot audit an empty log");
  return TimeWindow{floor_to(span->begin, config.window_len),
                    ceil_to(span->end, config.window_len)};
}

UserProfile profile_user(const ActivityLog& log, std::string_view user,
                         const AuditConfig& config) {
  const TimeWindow range = analysis_range(log, config);
  UserProfile p;
  p.user = std::string(user);

  RunningMoments post_rate, original_ratio, content_len, concentration,
      out_degree, reciprocity;
  std::vector<double> degree_series;
  for (Timestamp begin = range.begin; begin < range.end;
       begin += config.window_len) {
    const TimeWindow w{begin, std::min(begin + config.window_len, range.end)};
    const auto events = log.slice(w);
    const auto v = window_vertex(events, user);
    const auto e = window_edge(events, user, config.edge_kinds);
    ++p.window_count;
    post_rate.add(static_cast<double>(v.post_count));
    if (v.post_count > 0) original_ratio.add(v.original_ratio);
    if (v.active) content_len.add(v.mean_content_len);
    out_degree.add(static_cast<double>(e.out_degree));
    if (e.out_degree > 0) {
      concentration.add(e.neighbor_concentration);
      reciprocity.add(e.reciprocity);
    }
    degree_series.push_back(static_cast<double>(e.out_degree));
  }
  p.post_rate = post_rate.moments().mean;
  p.original_ratio = original_ratio.moments().mean;
  p.mean_content_len = content_len.moments().mean;
  p.out_degree = out_degree.moments().mean;
  p.concentration = concentration.moments().mean;
  p.reciprocity = reciprocity.moments().mean;

  std::vector<double> sentiments;
  std::vector<double> intervals;
  std::array<double, kSlotCount> hours{};
  std::optional<Timestamp> last_post;
  for (const auto& ev : log.slice(range)) {
    if (ev.user_id != user) continue;
    if (ev.sentiment) sentiments.push_back(*ev.sentiment);
    if (!is_post(ev.kind)) continue;
    ++p.post_count;
    hours[static_cast<std::size_t>(hour_of_day(ev.timestamp))] += 1.0;
    if (last_post) intervals.push_back(static_cast<double>(ev.timestamp - *last_post));
    last_post = ev.timestamp;
  }
  if (!sentiments.empty()) {
    p.content = Histogram::binned(sentiments, -1.0, 1.0, config.sentiment_bins)
                    .normalized();
  }
  if (p.post_count > 0) p.hourly = HourlyDistribution::from_weights(hours);
  p.sentiment_pe = try_pe(sentiments, config.pe);
  p.interval_pe = try_pe(intervals, config.pe);
  p.out_degree_pe = try_pe(degree_series, config.pe);
  return p;
}

Baseline build_baseline(const ActivityLog& log,
                        std::span<const std::string> users,
                        const AuditConfig& config) {
  if (users.size() < 2) {
    throw ValidationError("baseline needs at least two users, got " +
                          std::to_string(users.size()));
  }
  const auto profiles = profile_all(log, users, config);
  return build_baseline(profiles, config);
}

Baseline build_baseline(std::span<const UserProfile> profiles,
                        const AuditConfig& config) {
  validate(config);
  if (profiles.size() < 2) {
    throw ValidationError("baseline needs at least two users, got " +
                          std::to_string(profiles.size()));
  }
  Baseline b;
  b.user_count = profiles.size();

  RunningVector content, hourly;
  RunningMoments sentiment_pe, post_rate, original_ratio, content_len,
      concentration, out_degree, reciprocity, interval_pe, out_degree_pe;
  for (const auto& p : profiles) {
    if (p.content) content.add(p.content->bins());
    if (p.hourly) hourly.add(p.hourly->probs());
    if (p.sentiment_pe) sentiment_pe.add(*p.sentiment_pe);
    if (p.interval_pe) interval_pe.add(*p.interval_pe);
    if (p.out_degree_pe) out_degree_pe.add(*p.out_degree_pe);
    post_rate.add(p.post_rate);
    if (p.post_count > 0) original_ratio.add(p.original_ratio);
    content_len.add(p.mean_content_len);
    concentration.add(p.concentration);
    out_degree.add(p.out_degree);
    reciprocity.add(p.reciprocity);
  }
  if (content.count() > 0) {
    b.content = Histogram::probabilities(content.mean());
  }
  if (hourly.count() > 0) {
    b.hourly = HourlyDistribution::from_weights(hourly.mean());
  }
  b.sentiment_pe = sentiment_pe.moments();
  b.post_rate = post_rate.moments();
  b.original_ratio = original_ratio.moments();
  b.mean_content_len = content_len.moments();
  b.concentration = concentration.moments();
  b.out_degree = out_degree.moments();
  b.reciprocity = reciprocity.moments();
  b.interval_pe = interval_pe.moments();
  b.out_degree_pe = out_degree_pe.moments();

  RunningMoments content_distance, hourly_distance;
  for (const auto& p : profiles) {
    if (p.content && b.content) {
      content_distance.add(
          hist_distance(config.content_distance, *p.content, *b.content));
    }
    if (p.hourly && b.hourly) {
      hourly_distance.add(hist_distance(config.hourly_distance,
                                        Histogram::of(*p.hourly),
                                        Histogram::of(*b.hourly)));
    }
  }
  b.content_distance = content_distance.moments();
  b.hourly_distance = hourly_distance.moments();
  return b;
}

ConstraintScores constraint_scores(const UserProfile& profile,
                                   const Baseline& baseline,
                                   const AuditConfig& config) {
  ConstraintScores s;

  if (profile.content && baseline.content) {
    s[index(Constraint::kInstantContent)] =
        hist_distance(config.content_distance, *profile.content, *baseline.content);
  }

  s[index(Constraint::kTemporalContent)] =
      abs_diff(profile.sentiment_pe, baseline.sentiment_pe);

  if (profile.hourly && baseline.hourly) {
    const double hourly_d =
        hist_distance(config.hourly_distance, Histogram::of(*profile.hourly),
                      Histogram::of(*baseline.hourly));
    s[index(Constraint::kInstantVertex)] = std::max({
        normalized_excess(hourly_d, baseline.hourly_distance),
        normalized_deviation(profile.post_rate, baseline.post_rate),
        normalized_deviation(profile.original_ratio, baseline.original_ratio),
        normalized_deviation(profile.mean_content_len, baseline.mean_content_len),
    });
  }

  s[index(Constraint::kInstantEdge)] = std::max({
      normalized_deviation(profile.concentration, baseline.concentration),
      normalized_deviation(profile.out_degree, baseline.out_degree),
      normalized_deviation(profile.reciprocity, baseline.reciprocity),
  });

  s[index(Constraint::kTemporalVertex)] =
      abs_diff(profile.interval_pe, baseline.interval_pe);
  s[index(Constraint::kTemporalEdge)] =
      abs_diff(profile.out_degree_pe, baseline.out_degree_pe);
  return s;
}

void validate(const Thresholds& thresholds) {
  for (double eps : thresholds.epsilon) {
    if (!std::isfinite(eps) || eps < 0.0) {
      throw ValidationError("thresholds must be finite and >= 0");
    }
  }
}

Thresholds calibrate_thresholds(const ActivityLog& log,
                                std::span<const std::string> users,
                                const Baseline& baseline,
                                const AuditConfig& config, double percentile) {
  const auto profiles = profile_all(log, users, config);
  return calibrate_thresholds(profiles, baseline, config, percentile);
}

Thresholds calibrate_thresholds(std::span<const UserProfile> profiles,
                                const Baseline& baseline,
                                const AuditConfig& config, double percentile) {
  if (!(percentile > 50.0 && percentile <= 100.0)) {
    throw ValidationError("percentile must lie in (50, 100]");
  }
  std::array<std::vector<double>, kConstraintCount> per_constraint;
  for (const auto& p : profiles) {
    const auto scores = constraint_scores(p, baseline, config);
    for (std::size_t k = 0; k < kConstraintCount; ++k) {
      if (scores[k] && std::isfinite(*scores[k])) {
        per_constraint[k].push_back(*scores[k]);
      }
    }
  }
  Thresholds t;
  for (std::size_t k = 0; k < kConstraintCount; ++k) {
    if (!per_constraint[k].empty()) {
      t.epsilon[k] = nearest_rank(std::move(per_constraint[k]), percentile);
    }
  }
  return t;
}

bool AuditReport::any_fail() const noexcept {
  return std::any_of(constraints.begin(), constraints.end(),
                     [](const auto& c) { return c.verdict == Verdict::kFail; });
}

bool AuditReport::any_indeterminate() const noexcept {
  return std::any_of(
      constraints.begin(), constraints.end(),
      [](const auto& c) { return c.verdict == Verdict::kIndeterminate; });
}

AuditReport evaluate(std::string user, const ConstraintScores& scores,
                     const Thresholds& thresholds) {
  validate(thresholds);
  AuditReport report;
  report.user = std::move(user);
  report.overall_pass = true;
  for (std::size_t k = 0; k < kConstraintCount; ++k) {
    auto& r = report.constraints[k];
    r.constraint = static_cast<Constraint>(k);
    r.score = scores[k];
    r.threshold = thresholds.epsilon[k];
    if (!r.score) {
      r.verdict = Verdict::kIndeterminate;
    } else if (*r.score <= r.threshold) {
      r.verdict = Verdict::kPass;
    } else {
      r.verdict = Verdict::kFail;
    }
    report.overall_pass = report.overall_pass && r.pass();
  }
  return report;
}

AuditReport audit(const ActivityLog& log, std::string_view user,
                  const Baseline& baseline, const Thresholds& thresholds,
                  const AuditConfig& config) {
  const bool present =
      std::any_of(log.events().begin(), log.events().end(),
                  [user](const ActivityEvent& ev) { return ev.user_id == user; });
  if (!present) {
    throw ValidationError("user '" + std::string(user) + "' not in log");
  }
  const auto profile = profile_user(log, user, config);
  return evaluate(std::string(user), constraint_scores(profile, baseline, config),
                  thresholds);
}

}  // namespace behavsteg
