#include "behavsteg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <thread>

#include "behavsteg/error.hpp"

namespace behavsteg {
namespace {

// Keep in sync with data/population_hourly.tsv.
constexpr std::array<double, kSlotCount> kPopulationHourWeights{
    30, 18, 10, 6,  4,  5,  10, 22, 38, 48, 46, 42,
    44, 42, 38, 36, 38, 44, 52, 60, 66, 68, 60, 45,
};

constexpr std::int64_t kMinContentLen = 10;
constexpr std::int64_t kMaxContentLen = 280;

std::vector<std::string> pick_neighbors(std::mt19937_64& rng,
                                        std::span<const std::string> population,
                                        std::string_view self,
                                        std::size_t count) {
  std::vector<std::string> candidates;
  candidates.reserve(population.size());
  for (const auto& id : population) {
    if (id != self) candidates.push_back(id);
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  if (candidates.size() > count) candidates.resize(count);
  return candidates;
}

HourlyDistribution perturbed_hourly(const NormalUserParams& p,
                                    std::mt19937_64& rng) {
  if (std::isinf(p.hourly_concentration)) return p.hourly;
  std::array<double, kSlotCount> draws{};
  double sum = 0.0;
  for (std::size_t h = 0; h < kSlotCount; ++h) {
    if (p.hourly[h] <= 0.0) continue;
    std::gamma_distribution<double> gamma(p.hourly_concentration * p.hourly[h],
                                          1.0);
    draws[h] = gamma(rng);
    sum += draws[h];
  }
  if (!(sum > 0.0)) return p.hourly;
  return HourlyDistribution::from_weights(draws);
}

std::vector<Timestamp> normal_post_times(const NormalUserParams& p,
                                         const HourlyDistribution& hourly,
                                         std::mt19937_64& rng) {
  std::poisson_distribution<std::size_t> per_day(p.posts_per_day);
  std::discrete_distribution<int> hour(hourly.probs().begin(),
                                       hourly.probs().end());
  std::uniform_int_distribution<Timestamp> second(0, kSecondsPerHour - 1);

  const Timestamp base = day_start(p.start);
  std::vector<Timestamp> times;
  for (std::size_t day = 0;; ++day) {
    if (p.post_limit ? times.size() >= *p.post_limit : day >= p.days) break;
    std::size_t n = per_day(rng);
    if (p.post_limit) n = std::min(n, *p.post_limit - times.size());
    const auto first = times.size();
    for (std::size_t i = 0; i < n; ++i) {
      times.push_back(base + static_cast<Timestamp>(day) * kSecondsPerDay +
                      hour(rng) * kSecondsPerHour + second(rng));
    }
    std::sort(times.begin() + static_cast<std::ptrdiff_t>(first), times.end());
  }
  return times;
}

class SentimentStream {
 public:
  SentimentStream(const NormalUserParams& p, bool iid_uniform)
      : p_(p), iid_uniform_(iid_uniform) {}

  double next(std::mt19937_64& rng) {
    if (iid_uniform_) return uniform_(rng);
    const double noise = p_.sentiment_sigma > 0.0 ? normal_(rng) : 0.0;
    if (p_.sentiment_model == SentimentModel::kAr1) {
      x_ = std::clamp(p_.sentiment_rho * x_ + p_.sentiment_sigma * noise, -1.0,
                      1.0);
    } else {
      v_ = p_.sentiment_rho * v_ + p_.sentiment_sigma * noise;
      x_ = std::clamp((1.0 - p_.sentiment_reversion) * x_ + v_, -1.0, 1.0);
    }
    return x_;
  }

 private:
  const NormalUserParams& p_;
  bool iid_uniform_;
  double x_ = 0.0;
  double v_ = 0.0;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{-1.0, 1.0};
};

ActivityLog events_at(const NormalUserParams& p, std::string_view user_id,
                      std::span<const Timestamp> times,
                      const std::vector<std::string>& neighbors,
                      bool iid_sentiment, std::mt19937_64& rng) {
  std::bernoulli_distribution targeted(p.targeted_ratio);
  std::uniform_int_distribution<std::size_t> neighbor(
      0, neighbors.empty() ? 0 : neighbors.size() - 1);
  std::uniform_int_distribution<std::int64_t> content_len(kMinContentLen,
                                                          kMaxContentLen);
  SentimentStream sentiment(p, iid_sentiment);

  std::vector<ActivityEvent> events;
  events.reserve(times.size());
  for (Timestamp t : times) {
    ActivityEvent ev;
    ev.user_id = std::string(user_id);
    ev.timestamp = t;
    if (targeted(rng) && !neighbors.empty()) {
      ev.kind = EventKind::kRetweet;
      ev.target_user = neighbors[neighbor(rng)];
    }
    ev.sentiment = sentiment.next(rng);
    ev.content_len = content_len(rng);
    events.push_back(std::move(ev));
  }
  return ActivityLog(std::move(events));
}

ActivityLog generate(const NormalUserParams& p, std::string_view user_id,
                     std::span<const std::string> population,
                     bool iid_sentiment) {
  std::mt19937_64 rng(p.seed);
  const auto neighbors = pick_neighbors(rng, population, user_id, p.neighbor_count);
  const auto hourly = perturbed_hourly(p, rng);
  const auto times = normal_post_times(p, hourly, rng);
  return events_at(p, user_id, times, neighbors, iid_sentiment, rng);
}

std::string user_name(std::size_t index, std::size_t total) {
  std::string digits = std::to_string(index);
  const std::size_t width = std::max<std::size_t>(3, std::to_string(total - 1).size());
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return "u" + digits;
}

}  // namespace

HourlyDistribution default_population_hourly() {
  return HourlyDistribution::from_weights(kPopulationHourWeights);
}

std::string_view to_string(SentimentModel m) noexcept {
  return m == SentimentModel::kAr1 ? "ar1" : "momentum";
}

std::optional<SentimentModel> parse_sentiment_model(
    std::string_view name) noexcept {
  if (name == "ar1") return SentimentModel::kAr1;
  if (name == "momentum") return SentimentModel::kMomentum;
  return std::nullopt;
}

void validate(const NormalUserParams& p) {
  if (!(p.posts_per_day > 0.0) || !std::isfinite(p.posts_per_day)) {
    throw ValidationError("posts_per_day must be a positive real");
  }
  if (!(p.hourly_concentration > 0.0)) {
    throw ValidationError("hourly_concentration must be > 0");
  }
  if (!(p.sentiment_rho >= 0.0 && p.sentiment_rho < 1.0)) {
    throw ValidationError("sentiment_rho must lie in [0, 1)");
  }
  if (!(p.sentiment_sigma >= 0.0) || !std::isfinite(p.sentiment_sigma)) {
    throw ValidationError("sentiment_sigma must be >= 0");
  }
  if (!(p.sentiment_reversion >= 0.0 && p.sentiment_reversion <= 1.0)) {
    throw ValidationError("sentiment_reversion must lie in [0, 1]");
  }
  if (p.neighbor_count < 1) throw ValidationError("neighbor_count must be >= 1");
  if (!(p.targeted_ratio >= 0.0 && p.targeted_ratio <= 1.0)) {
    throw ValidationError("targeted_ratio must lie in [0, 1]");
  }
  if (p.days < 1) throw ValidationError("days must be >= 1");
  if (p.start < 0) throw ValidationError("start must be >= 0");
}

void validate(const StegoUserParams& p) {
  validate(p.base);
  if (p.mode == StegoMode::kTimingChannel) {
    if (p.payload.empty()) {
      throw ValidationError("timing-channel mode needs a nonempty payload");
    }
    if (!p.codebook || p.codebook->size() == 0) {
      throw ValidationError("timing-channel mode needs a codebook");
    }
  }
}

ActivityLog gen_normal_user(const NormalUserParams& params,
                            std::string_view user_id,
                            std::span<const std::string> population) {
  validate(params);
  return generate(params, user_id, population, false);
}

ActivityLog gen_stego_user(const StegoUserParams& params,
                           std::string_view user_id,
                           std::span<const std::string> population) {
  validate(params);
  const auto& p = params.base;
  if (params.mode == StegoMode::kRandomContent) {
    return generate(p, user_id, population, true);
  }

  std::mt19937_64 rng(p.seed);
  const auto neighbors = pick_neighbors(rng, population, user_id, p.neighbor_count);
  const auto encoded = encode(params.payload, *params.codebook);
  const Timestamp start = day_start(p.start);
  const auto times = schedule_timestamps(encoded.slots, start, rng());
  const Timestamp horizon = start + static_cast<Timestamp>(p.days) * kSecondsPerDay;
  if (!times.empty() && times.back() >= horizon) {
    std::size_t fit = 0;
    for (std::size_t i = 0; i < times.size() && times[i] < horizon; ++i) {
      fit += params.codebook->code(encoded.slots[i]).size();
    }
    fit = std::min(fit, params.payload.size());
    throw CapacityError("payload of " + std::to_string(params.payload.size()) +
                            " bits does not fit in " + std::to_string(p.days) +
                            " days; at most " + std::to_string(fit) +
                            " bits can be scheduled",
                        fit);
  }
  return events_at(p, user_id, times, neighbors, false, rng);
}

std::string_view to_string(UserLabel label) noexcept {
  switch (label) {
    case UserLabel::kNormal:
      return "normal";
    case UserLabel::kStegoTiming:
      return "stego_timing";
    case UserLabel::kStegoContent:
      return "stego_content";
  }
  return "normal";
}

std::optional<UserLabel> parse_user_label(std::string_view name) noexcept {
  if (name == "normal") return UserLabel::kNormal;
  if (name == "stego_timing") return UserLabel::kStegoTiming;
  if (name == "stego_content") return UserLabel::kStegoContent;
  return std::nullopt;
}

std::vector<std::string> Population::users_with(UserLabel label) const {
  std::vector<std::string> out;
  for (const auto& id : users) {
    if (labels.at(id) == label) out.push_back(id);
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::seed_seq seq{static_cast<std::uint32_t>(master),
                    static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

Population simulate_population(const PopulationSpec& spec) {
  validate(spec.base);
  const std::size_t total =
      spec.normal_users + spec.stego_timing_users + spec.stego_content_users;
  if (total == 0) throw ValidationError("population is empty");
  if (spec.stego_timing_users > 0 && spec.payload && spec.payload->empty()) {
    throw ValidationError("timing-channel users need a nonempty payload");
  }

  Population pop;
  for (std::size_t i = 0; i < total; ++i) {
    pop.users.push_back(user_name(i, total));
    UserLabel label = UserLabel::kNormal;
    if (i >= spec.normal_users) label = UserLabel::kStegoTiming;
    if (i >= spec.normal_users + spec.stego_timing_users) {
      label = UserLabel::kStegoContent;
    }
    pop.labels[pop.users.back()] = label;
  }
  for (std::size_t i = spec.normal_users;
       i < spec.normal_users + spec.stego_timing_users; ++i) {
    Bits payload;
    if (spec.payload) {
      payload = *spec.payload;
    } else {
      std::mt19937_64 rng(derive_seed(derive_seed(spec.seed, i), 1));
      std::bernoulli_distribution bit(0.5);
      for (std::size_t b = 0; b < spec.payload_bits; ++b) payload.push_back(bit(rng));
    }
    pop.payloads[pop.users[i]] = std::move(payload);
  }

  std::vector<ActivityLog> logs(total);
  auto generate_user = [&](std::size_t i) {
    NormalUserParams base = spec.base;
    base.seed = derive_seed(spec.seed, i);
    const auto& id = pop.users[i];
    switch (pop.labels.at(id)) {
      case UserLabel::kNormal:
        logs[i] = gen_normal_user(base, id, pop.users);
        break;
      case UserLabel::kStegoTiming:
        logs[i] = gen_stego_user(
            {StegoMode::kTimingChannel, pop.payloads.at(id), spec.codebook, base},
            id, pop.users);
        break;
      case UserLabel::kStegoContent:
        logs[i] = gen_stego_user({StegoMode::kRandomContent, {}, {}, base}, id,
                                 pop.users);
        break;
    }
  };

  const std::size_t requested =
      spec.threads > 0 ? spec.threads
                       : std::max(1U, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(requested, total);
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) generate_user(i);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < total; i += workers) generate_user(i);
      }));
    }
    for (auto& job : jobs) job.get();
  }
  pop.log = merge_logs(logs);
  return pop;
}

DetectionReport detection_report(std::vector<ScoredUser> users) {
  const auto positives = static_cast<std::size_t>(
      std::count_if(users.begin(), users.end(),
                    [](const ScoredUser& u) { return u.positive; }));
  const std::size_t negatives = users.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw ValidationError("detection needs both stego and normal users");
  }

  // Indeterminate (nullopt) ranks above every score.
  auto above = [](const ScoredUser& a, const ScoredUser& b) {
    if (!a.score || !b.score) return !a.score && b.score;
    return *a.score > *b.score;
  };
  std::stable_sort(users.begin(), users.end(), above);

  DetectionReport report;
  report.roc_points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < users.size();) {
    std::size_t j = i;
    while (j < users.size() && !above(users[i], users[j]) &&
           !above(users[j], users[i])) {
      users[j].positive ? ++tp : ++fp;
      ++j;
    }
    report.roc_points.push_back(
        {static_cast<double>(fp) / static_cast<double>(negatives),
         static_cast<double>(tp) / static_cast<double>(positives)});
    i = j;
  }
  for (std::size_t k = 1; k < report.roc_points.size(); ++k) {
    const auto& a = report.roc_points[k - 1];
    const auto& b = report.roc_points[k];
    report.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  report.users = std::move(users);
  return report;
}

DetectionReport run_eve(const ActivityLog& log, const Labels& labels,
                        const EveConfig& config) {
  std::vector<std::string> normal;
  std::size_t stego = 0;
  for (const auto& [id, label] : labels) {
    if (label == UserLabel::kNormal) {
      normal.push_back(id);
    } else {
      ++stego;
    }
  }
  if (normal.size() < 2 || stego < 2) {
    throw ValidationError("run_eve needs at least two users per class");
  }

  std::vector<UserProfile> profiles;
  profiles.reserve(labels.size());
  for (const auto& [id, label] : labels) {
    profiles.push_back(profile_user(log, id, config.audit));
  }
  std::vector<UserProfile> reference;
  for (const auto& p : profiles) {
    if (labels.at(p.user) == UserLabel::kNormal) reference.push_back(p);
  }
  const Baseline baseline = build_baseline(reference, config.audit);

  std::vector<ScoredUser> scored;
  scored.reserve(profiles.size());
  for (const auto& p : profiles) {
    const auto scores = constraint_scores(p, baseline, config.audit);
    scored.push_back({p.user, scores[index(config.constraint)],
                      labels.at(p.user) != UserLabel::kNormal});
  }
  return detection_report(std::move(scored));
}

}  // namespace behavsteg
