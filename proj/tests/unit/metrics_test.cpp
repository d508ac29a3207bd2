#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <behavsteg/error.hpp>
#include <behavsteg/metrics.hpp>

#include "oracles.hpp"

namespace behavsteg {
namespace {

std::vector<double> iid_uniform(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

TEST(PermutationEntropy, MonotoneIsZero) {
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  EXPECT_EQ(permutation_entropy(x), 0.0);
  EXPECT_EQ(temporal_relevance(x), 0.0);
}

TEST(PermutationEntropy, ConstantIsZero) {
  const std::vector<double> x(50, 0.25);
  EXPECT_EQ(permutation_entropy(x), 0.0);
  EXPECT_EQ(permutation_entropy(x, {5, 2}), 0.0);
}

TEST(PermutationEntropy, AlternatingOrderTwo) {
  std::vector<double> x;
  for (int i = 0; i < 20; ++i) x.push_back(i % 2 == 0 ? 1.0 : 2.0);
  // 19 windows: 10 rising, 9 falling.
  const double p = 10.0 / 19.0;
  const double q = 9.0 / 19.0;
  const double expected = -(p * std::log(p) + q * std::log(q)) / std::log(2.0);
  EXPECT_NEAR(permutation_entropy(x, {2, 1}), expected, 1e-12);
  EXPECT_NEAR(temporal_relevance(x, {2, 1}), expected, 1e-12);
  EXPECT_GT(expected, 0.99);
  x.push_back(1.0);  // even number of windows splits exactly in half
  EXPECT_NEAR(permutation_entropy(x, {2, 1}), 1.0, 1e-12);
}

TEST(PermutationEntropy, IidUniformApproachesOne) {
  std::mt19937_64 rng(1);
  const auto x = iid_uniform(rng, 10000);
  EXPECT_GE(permutation_entropy(x), 0.99);
  EXPECT_LE(permutation_entropy(x), 1.0);
}

TEST(PermutationEntropy, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> small(0, 4);  // plenty of ties
  std::uniform_real_distribution<double> cont(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> len(30, 200);
  for (int m = 2; m <= 5; ++m) {
    for (int tau = 1; tau <= 3; ++tau) {
      for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> x(len(rng));
        for (auto& v : x) v = rep % 2 == 0 ? small(rng) : cont(rng);
        EXPECT_NEAR(permutation_entropy(x, {m, tau}), oracle::permutation_entropy(x, m, tau),
                    1e-12)
            << "m=" << m << " tau=" << tau;
      }
    }
  }
}

TEST(PermutationEntropy, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto x = iid_uniform(rng, 200);
    const double pe = permutation_entropy(x);
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> c;
    for (double v : x) {
      a.push_back(std::exp(3.0 * v));
      b.push_back(-7.0 + 0.5 * v);
      c.push_back(v * v * v + v);
    }
    EXPECT_EQ(permutation_entropy(a), pe);
    EXPECT_EQ(permutation_entropy(b), pe);
    EXPECT_EQ(permutation_entropy(c), pe);
  }
}

TEST(PermutationEntropy, ErrorCases) {
  const std::vector<double> short_series{1, 2};
  EXPECT_THROW(permutation_entropy(short_series), InsufficientDataError);
  EXPECT_EQ(min_series_length({3, 1}), 3U);
  EXPECT_EQ(min_series_length({4, 2}), 7U);
  const std::vector<double> x{1, 2, 3, 4, 5};
  EXPECT_THROW(permutation_entropy(x, {1, 1}), ValidationError);
  EXPECT_THROW(permutation_entropy(x, {3, 0}), ValidationError);
  EXPECT_THROW(permutation_entropy(x, {21, 1}), ValidationError);
  const std::vector<double> bad{1, NAN, 3, 4};
  EXPECT_THROW(permutation_entropy(bad), ValidationError);
}

TEST(Histogram, Construction) {
  EXPECT_THROW(Histogram({1.0, -1.0}), ValidationError);
  EXPECT_THROW(Histogram::probabilities({0.5, 0.4}), ValidationError);
  EXPECT_THROW(Histogram({0.0, 0.0}).normalized(), InsufficientDataError);
  const auto h = Histogram({1.0, 3.0}).normalized();
  EXPECT_TRUE(h.is_normalized());
  EXPECT_DOUBLE_EQ(h.bins()[1], 0.75);
  const std::vector<double> v{-2.0, -1.0, 0.0, 0.99, 1.0, 5.0};
  const auto b = Histogram::binned(v, -1.0, 1.0, 4);
  EXPECT_EQ(b.bins(), (std::vector<double>{2, 0, 1, 3}));
}

TEST(Distances, TotalVariationExamples) {
  const auto p = Histogram::probabilities({0.5, 0.5});
  EXPECT_EQ(total_variation(p, p), 0.0);
  EXPECT_DOUBLE_EQ(total_variation(Histogram::probabilities({1, 0}),
                                   Histogram::probabilities({0, 1})),
                   1.0);
  EXPECT_DOUBLE_EQ(total_variation(p, Histogram::probabilities({0.75, 0.25})), 0.25);
  EXPECT_THROW(total_variation(p, Histogram::probabilities({1, 0, 0})),
               ValidationError);
}

TEST(Distances, JsAndKlExamples) {
  const auto p = Histogram::probabilities({0.5, 0.5});
  EXPECT_EQ(js_divergence(p, p), 0.0);
  EXPECT_EQ(kl_divergence(p, p), 0.0);
  EXPECT_NEAR(js_divergence(Histogram::probabilities({1, 0}),
                            Histogram::probabilities({0, 1})),
              std::numbers::ln2, 1e-15);
  EXPECT_NEAR(kl_divergence(p, Histogram::probabilities({0.25, 0.75})),
              0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(kl_divergence(p, Histogram::probabilities({0.25, 0.75})), 0.1438, 1e-4);
  EXPECT_THROW(kl_divergence(p, Histogram::probabilities({1, 0})), ValidationError);
  EXPECT_EQ(kl_divergence(Histogram::probabilities({1, 0}), p), std::log(2.0));
}

TEST(Distances, RawCountsAreRejected) {
  EXPECT_THROW(total_variation(Histogram({2, 2}), Histogram({3, 1})), ValidationError);
  EXPECT_DOUBLE_EQ(total_variation(Histogram({2, 2}).normalized(), Histogram({3, 1}).normalized()),
                   0.25);
}

TEST(Distances, MetricProperties) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_hist = [&] {
    std::vector<double> b(10);
    for (auto& v : b) v = u(rng);
    return Histogram(b).normalized();
  };
  for (int i = 0; i < 200; ++i) {
    const auto p = random_hist();
    const auto q = random_hist();
    const auto r = random_hist();
    EXPECT_DOUBLE_EQ(total_variation(p, q), total_variation(q, p));
    EXPECT_NEAR(js_divergence(p, q), js_divergence(q, p), 1e-15);
    EXPECT_LE(total_variation(p, r), total_variation(p, q) + total_variation(q, r) + 1e-15);
    EXPECT_GT(total_variation(p, q), 0.0);
    EXPECT_GT(js_divergence(p, q), 0.0);
    EXPECT_GT(kl_divergence(p, q), 0.0);
    EXPECT_LE(js_divergence(p, q), std::numbers::ln2);
    EXPECT_EQ(total_variation(p, p), 0.0);
    EXPECT_NEAR(js_divergence(p, p), 0.0, 1e-15);
    EXPECT_NEAR(kl_divergence(p, p), 0.0, 1e-15);
  }
}

TEST(Distances, ParseNames) {
  EXPECT_EQ(parse_histogram_distance("tv"), HistogramDistance::kTotalVariation);
  EXPECT_EQ(parse_histogram_distance("js"), HistogramDistance::kJensenShannon);
  EXPECT_EQ(parse_histogram_distance("kl"), HistogramDistance::kKullbackLeibler);
  EXPECT_FALSE(parse_histogram_distance("l2"));
  EXPECT_EQ(parse_histogram_distance(to_string(HistogramDistance::kJensenShannon)),
            HistogramDistance::kJensenShannon);
}

TEST(HourlyHistogram, Examples) {
  constexpr Timestamp day = 1577836800;
  ActivityEvent ev;
  ev.user_id = "a";
  ev.timestamp = day + 13 * 3600 + 1800;
  const auto one = hourly_histogram(ActivityLog({ev}));
  EXPECT_EQ(one[13], 1.0);
  EXPECT_EQ(one[12], 0.0);

  std::vector<Timestamp> hours;
  for (int h = 0; h < 24; ++h) hours.push_back(day + h * 3600 + 59);
  EXPECT_EQ(hourly_histogram(hours), HourlyDistribution::uniform());
}

TEST(HourlyHistogram, CountsPostsOnlyAndFiltersUser) {
  constexpr Timestamp day = 1577836800;
  ActivityEvent a;
  a.user_id = "a";
  a.timestamp = day + 2 * 3600;
  ActivityEvent follow;
  follow.user_id = "a";
  follow.timestamp = day + 5 * 3600;
  follow.kind = EventKind::kFollow;
  follow.target_user = "b";
  ActivityEvent b;
  b.user_id = "b";
  b.timestamp = day + 7 * 3600;
  const ActivityLog log({a, follow, b});
  EXPECT_EQ(hourly_histogram(log, "a")[2], 1.0);
  EXPECT_DOUBLE_EQ(hourly_histogram(log)[7], 0.5);
  EXPECT_THROW(hourly_histogram(log, "zed"), InsufficientDataError);
  EXPECT_THROW(hourly_histogram(ActivityLog()), InsufficientDataError);
}

}  // namespace
}  // namespace behavsteg
