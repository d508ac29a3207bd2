#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include <behavsteg/error.hpp>
#include <behavsteg/json_io.hpp>
#include <behavsteg/metrics.hpp>
#include <behavsteg/simulator.hpp>

#include "generators.hpp"
#include "oracles.hpp"

namespace behavsteg {
namespace {

const std::vector<std::string> kIds{"a", "b", "c", "d"};

std::vector<double> sentiments_of(const ActivityLog& log) {
  std::vector<double> out;
  for (const auto& ev : log.events()) out.push_back(*ev.sentiment);
  return out;
}

TEST(GenNormalUser, ActiveUserScale) {
  double total = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    NormalUserParams p;
    p.seed = s;
    total += static_cast<double>(gen_normal_user(p, "a", kIds).size());
  }
  EXPECT_NEAR(total / 50.0, 90.0, 4.5);
}

TEST(GenNormalUser, EventsAreValidAndInRange) {
  NormalUserParams p;
  p.seed = 3;
  const auto log = gen_normal_user(p, "a", kIds);
  const Timestamp begin = day_start(p.start);
  for (const auto& ev : log.events()) {
    EXPECT_EQ(ev.user_id, "a");
    EXPECT_GE(ev.timestamp, begin);
    EXPECT_LT(ev.timestamp, begin + 30 * kSecondsPerDay);
    ASSERT_TRUE(ev.sentiment);
    EXPECT_GE(*ev.sentiment, -1.0);
    EXPECT_LE(*ev.sentiment, 1.0);
    ASSERT_TRUE(ev.content_len);
    if (ev.target_user) EXPECT_NE(*ev.target_user, "a");
  }
}

TEST(GenNormalUser, ZeroSigmaGivesFlatSentiment) {
  NormalUserParams p;
  p.sentiment_sigma = 0.0;
  p.seed = 5;
  for (double s : sentiments_of(gen_normal_user(p, "a", kIds))) EXPECT_EQ(s, 0.0);
}

TEST(GenNormalUser, PostLimitIsExact) {
  NormalUserParams p;
  p.post_limit = 100;
  p.seed = 7;
  EXPECT_EQ(gen_normal_user(p, "a", kIds).size(), 100U);
}

TEST(GenNormalUser, Ar1SentimentIsMoreOrderedThanShuffled) {
  NormalUserParams p;
  p.post_limit = 1000;
  p.seed = 11;
  auto x = sentiments_of(gen_normal_user(p, "a", kIds));
  const double pe = permutation_entropy(x);
  std::mt19937_64 rng(1);
  std::shuffle(x.begin(), x.end(), rng);
  EXPECT_LT(pe, permutation_entropy(x));
}

TEST(GenNormalUser, MomentumModelIsSmoother) {
  NormalUserParams p;
  p.post_limit = 1000;
  p.seed = 13;
  const double ar1 = permutation_entropy(sentiments_of(gen_normal_user(p, "a", kIds)));
  p.sentiment_model = SentimentModel::kMomentum;
  p.sentiment_sigma = 0.05;
  const double mom = permutation_entropy(sentiments_of(gen_normal_user(p, "a", kIds)));
  EXPECT_LT(mom, ar1);
  EXPECT_EQ(parse_sentiment_model(to_string(SentimentModel::kMomentum)),
            SentimentModel::kMomentum);
}

TEST(GenNormalUser, Validation) {
  NormalUserParams p;
  p.sentiment_rho = 1.0;
  EXPECT_THROW(gen_normal_user(p, "a", kIds), ValidationError);
  p = {};
  p.posts_per_day = 0.0;
  EXPECT_THROW(gen_normal_user(p, "a", kIds), ValidationError);
  p = {};
  p.targeted_ratio = 1.5;
  EXPECT_THROW(gen_normal_user(p, "a", kIds), ValidationError);
}

TEST(GenStegoUser, RandomContentIsNearIid) {
  StegoUserParams p;
  p.mode = StegoMode::kRandomContent;
  p.base.post_limit = 100;
  p.base.seed = 17;
  const auto log = gen_stego_user(p, "a", kIds);
  ASSERT_EQ(log.size(), 100U);
  EXPECT_GE(permutation_entropy(sentiments_of(log)), 0.9);
}

TEST(GenStegoUser, TimingModeNeedsPayload) {
  StegoUserParams p;
  p.mode = StegoMode::kTimingChannel;
  p.codebook = reference_codebook();
  EXPECT_THROW(gen_stego_user(p, "a", kIds), ValidationError);
}

TEST(GenStegoUser, TimingModeReportsCapacity) {
  StegoUserParams p;
  p.mode = StegoMode::kTimingChannel;
  p.codebook = reference_codebook();
  p.base.days = 3;
  std::mt19937_64 rng(19);
  p.payload = testing::random_bits(rng, 200);
  try {
    gen_stego_user(p, "a", kIds);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    ASSERT_TRUE(e.max_bits());
    EXPECT_GT(*e.max_bits(), 0U);
    EXPECT_LT(*e.max_bits(), 200U);
  }
}

TEST(GenStegoUser, TimingModeFollowsInducedDistribution) {
  StegoUserParams p;
  p.mode = StegoMode::kTimingChannel;
  p.codebook = reference_codebook();
  p.base.days = 4000;
  p.base.seed = 23;
  std::mt19937_64 rng(23);
  while (encode(p.payload, *p.codebook).slots.size() < 5000) {
    const auto chunk = testing::random_bits(rng, 500);
    p.payload.insert(p.payload.end(), chunk.begin(), chunk.end());
  }
  const auto log = gen_stego_user(p, "a", kIds);
  EXPECT_GE(log.size(), 5000U);
  const auto& f = hourly_histogram(log).probs();
  const auto& q = induced_distribution(*p.codebook).probs();
  const double x2 = oracle::pearson_chi_square(std::vector<double>(f.begin(), f.end()),
                                               std::vector<double>(q.begin(), q.end()),
                                               static_cast<double>(log.size()));
  EXPECT_LT(x2, oracle::kChiSquare23Crit001);

  std::vector<Timestamp> times;
  for (const auto& ev : log.events()) times.push_back(ev.timestamp);
  EXPECT_EQ(receive(times, *p.codebook, p.payload.size()), p.payload);
}

TEST(SimulatePopulation, LabelsAndIds) {
  PopulationSpec spec;
  spec.normal_users = 50;
  spec.stego_timing_users = 2;
  spec.stego_content_users = 3;
  spec.seed = 29;
  const auto pop = simulate_population(spec);
  EXPECT_EQ(pop.users.size(), 55U);
  EXPECT_EQ(pop.users.front(), "u000");
  EXPECT_EQ(pop.users_with(UserLabel::kNormal).size(), 50U);
  EXPECT_EQ(pop.users_with(UserLabel::kStegoTiming).size(), 2U);
  EXPECT_EQ(pop.users_with(UserLabel::kStegoContent).size(), 3U);
  EXPECT_EQ(pop.payloads.size(), 2U);
  EXPECT_EQ(pop.log.users(), pop.users);
}

TEST(SimulatePopulation, StatsMatchConstruction) {
  PopulationSpec spec;
  spec.normal_users = 50;
  spec.seed = 31;
  const auto stats = summarize(simulate_population(spec).log);
  EXPECT_EQ(stats.user_count, 50U);
  EXPECT_NEAR(stats.retweet_rate, 0.35, 0.02);
}

TEST(SimulatePopulation, TimingUsersDecodeFromTheirPosts) {
  PopulationSpec spec;
  spec.normal_users = 20;
  spec.stego_timing_users = 3;
  spec.seed = 37;
  const auto pop = simulate_population(spec);
  for (const auto& [user, payload] : pop.payloads) {
    std::vector<Timestamp> times;
    for (const auto& ev : pop.log.events_of(user)) times.push_back(ev.timestamp);
    EXPECT_EQ(receive(times, spec.codebook, payload.size()), payload) << user;
  }
}

TEST(SimulatePopulation, FixedPayloadIsShared) {
  PopulationSpec spec;
  spec.normal_users = 3;
  spec.stego_timing_users = 2;
  spec.payload = parse_bits("0100110011101");
  spec.seed = 41;
  const auto pop = simulate_population(spec);
  for (const auto& [user, payload] : pop.payloads) EXPECT_EQ(payload, *spec.payload);
  spec.payload = Bits{};
  EXPECT_THROW(simulate_population(spec), ValidationError);
}

TEST(SimulatePopulation, SeedsAreReproducibleAcrossThreadCounts) {
  PopulationSpec spec;
  spec.normal_users = 30;
  spec.stego_timing_users = 2;
  spec.stego_content_users = 2;
  spec.seed = 43;
  spec.threads = 1;
  const auto serial = simulate_population(spec);
  spec.threads = 4;
  const auto parallel = simulate_population(spec);
  EXPECT_EQ(serial.log, parallel.log);
  EXPECT_EQ(serial.labels, parallel.labels);
  EXPECT_EQ(serial.payloads, parallel.payloads);
  spec.seed = 44;
  EXPECT_NE(simulate_population(spec).log, serial.log);
}

TEST(SimulatePopulation, LogRoundTripsThroughJsonl) {
  PopulationSpec spec;
  spec.normal_users = 10;
  spec.stego_timing_users = 1;
  spec.stego_content_users = 1;
  spec.seed = 47;
  const auto pop = simulate_population(spec);
  std::stringstream io;
  write_activity_log(io, pop.log, LogFormat::kJsonl);
  EXPECT_EQ(parse_activity_log(io, LogFormat::kJsonl), pop.log);

  std::istringstream labels(labels_to_json(pop.labels));
  EXPECT_EQ(parse_labels_json(labels), pop.labels);
}

TEST(Labels, ParseErrors) {
  std::istringstream bad_label(R"({"a": "spy"})");
  EXPECT_THROW(parse_labels_json(bad_label), ParseError);
  std::istringstream bad_json("{");
  EXPECT_THROW(parse_labels_json(bad_json), ParseError);
}

TEST(DetectionReport, PerfectSeparation) {
  const auto r = detection_report({{"a", 0.9, true}, {"b", 0.8, true},
                                   {"c", 0.1, false}, {"d", 0.2, false}});
  EXPECT_DOUBLE_EQ(r.auc, 1.0);
  EXPECT_EQ(r.roc_points.front().fpr, 0.0);
  EXPECT_EQ(r.roc_points.back().tpr, 1.0);
}

TEST(DetectionReport, AllTiedIsChance) {
  const auto r = detection_report({{"a", 0.5, true}, {"b", 0.5, false},
                                   {"c", 0.5, false}, {"d", 0.5, true}});
  EXPECT_DOUBLE_EQ(r.auc, 0.5);
  EXPECT_EQ(r.roc_points.size(), 2U);
}

TEST(DetectionReport, IndeterminateRanksFirst) {
  const auto r = detection_report({{"a", std::nullopt, true}, {"b", 5.0, false},
                                   {"c", 0.1, false}});
  EXPECT_DOUBLE_EQ(r.auc, 1.0);
  EXPECT_EQ(r.users.front().user, "a");
}

TEST(DetectionReport, NeedsBothClasses) {
  EXPECT_THROW(detection_report({{"a", 1.0, true}}), ValidationError);
  EXPECT_THROW(detection_report({{"a", 1.0, false}, {"b", 1.0, false}}),
               ValidationError);
}

TEST(DetectionReport, MatchesPairwiseOracleAndIsRankInvariant) {
  std::mt19937_64 rng(53);
  std::uniform_int_distribution<int> coarse(0, 9);  // forces ties
  std::bernoulli_distribution label(0.4);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<ScoredUser> users;
    std::vector<double> pos;
    std::vector<double> neg;
    for (int i = 0; i < 40; ++i) {
      const double s = coarse(rng) * 0.1;
      const bool positive = i < 2 || (i >= 4 && label(rng));
      users.push_back({"u" + std::to_string(i), s, positive});
      (positive ? pos : neg).push_back(s);
    }
    const auto r = detection_report(users);
    EXPECT_NEAR(r.auc, oracle::pairwise_auc(pos, neg), 1e-12);
    for (std::size_t k = 1; k < r.roc_points.size(); ++k) {
      EXPECT_GE(r.roc_points[k].fpr, r.roc_points[k - 1].fpr);
      EXPECT_GE(r.roc_points[k].tpr, r.roc_points[k - 1].tpr);
    }
    for (auto& u : users) u.score = std::exp(5.0 * *u.score) - 3.0;
    EXPECT_NEAR(detection_report(users).auc, r.auc, 1e-12);
  }
}

TEST(RunEve, SeparatesRandomContentUsersOnLongSeries) {
  PopulationSpec spec;
  spec.normal_users = 30;
  spec.stego_content_users = 30;
  spec.base.post_limit = 1000;
  spec.seed = 59;
  const auto pop = simulate_population(spec);
  const auto r = run_eve(pop.log, pop.labels, {});
  EXPECT_GE(r.auc, 0.95);
  EXPECT_NE(to_json(r).find("roc_points"), std::string::npos);
}

TEST(RunEve, NeedsTwoUsersPerClass) {
  PopulationSpec spec;
  spec.normal_users = 3;
  spec.stego_content_users = 1;
  spec.seed = 61;
  const auto pop = simulate_population(spec);
  EXPECT_THROW(run_eve(pop.log, pop.labels, {}), ValidationError);
}

}  // namespace
}  // namespace behavsteg
