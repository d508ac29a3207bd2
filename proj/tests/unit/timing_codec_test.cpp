#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include <behavsteg/error.hpp>
#include <behavsteg/metrics.hpp>
#include <behavsteg/timing_codec.hpp>

#include "generators.hpp"
#include "oracles.hpp"

namespace behavsteg {
namespace {

constexpr Timestamp kDay = 1577836800;  // 2020-01-01T00:00:00Z

HourlyDistribution dist_of(std::initializer_list<std::pair<int, double>> entries) {
  std::array<double, kSlotCount> p{};
  for (auto [slot, v] : entries) p[static_cast<std::size_t>(slot)] = v;
  return HourlyDistribution(p);
}

std::multiset<std::size_t> length_profile(const Codebook& cb) {
  std::multiset<std::size_t> out;
  for (const auto& [slot, code] : cb.codes()) out.insert(code.size());
  return out;
}

Codebook codebook_from_text(const std::string& text) {
  std::istringstream in(text);
  return read_codebook(in);
}

TEST(Bits, ParseAndFormat) {
  EXPECT_EQ(format_bits(parse_bits("0110 1\n")), "01101");
  EXPECT_TRUE(parse_bits("").empty());
  EXPECT_THROW(parse_bits("012"), ValidationError);
  const std::uint8_t bytes[] = {0xA5, 0x01};
  EXPECT_EQ(format_bits(bits_from_bytes(bytes)), "1010010100000001");
}

TEST(HourlyDistribution, Validates) {
  std::array<double, kSlotCount> p{};
  EXPECT_THROW(HourlyDistribution{p}, ValidationError);
  p[0] = 1.5;
  p[1] = -0.5;
  EXPECT_THROW(HourlyDistribution{p}, ValidationError);
  EXPECT_NEAR(HourlyDistribution::uniform().entropy_bits(), std::log2(24.0), 1e-12);
  const std::vector<double> w(24, 2.0);
  EXPECT_EQ(HourlyDistribution::from_weights(w), HourlyDistribution::uniform());
}

TEST(BuildCodebook, TwoEqualSlots) {
  const auto cb = build_codebook(dist_of({{3, 0.5}, {7, 0.5}}));
  ASSERT_EQ(cb.size(), 2U);
  EXPECT_EQ(format_bits(cb.code(3)), "0");
  EXPECT_EQ(format_bits(cb.code(7)), "1");
}

TEST(BuildCodebook, UniformHasTableLengthProfile) {
  const auto cb = build_codebook(HourlyDistribution::uniform());
  std::multiset<std::size_t> expected;
  for (int i = 0; i < 8; ++i) expected.insert(4);
  for (int i = 0; i < 16; ++i) expected.insert(5);
  EXPECT_EQ(length_profile(cb), expected);
  EXPECT_EQ(length_profile(cb), length_profile(reference_codebook()));
  EXPECT_DOUBLE_EQ(cb.kraft_sum(), 1.0);
  EXPECT_TRUE(cb.is_complete());
}

TEST(BuildCodebook, ThreeSlots) {
  const auto cb = build_codebook(dist_of({{0, 0.5}, {1, 0.25}, {2, 0.25}}));
  ASSERT_EQ(cb.size(), 3U);
  EXPECT_EQ(cb.code(0).size(), 1U);
  EXPECT_EQ(cb.code(1).size(), 2U);
  EXPECT_EQ(cb.code(2).size(), 2U);
  EXPECT_FALSE(cb.contains(3));
}

TEST(BuildCodebook, NeedsTwoPositiveSlots) {
  EXPECT_THROW(build_codebook(dist_of({{4, 1.0}})), CapacityError);
}

TEST(BuildCodebook, IsDeterministic) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto d = testing::random_distribution(rng);
    EXPECT_EQ(build_codebook(d), build_codebook(d));
  }
}

TEST(BuildCodebook, MatchesOracleExpectedLengthAndEntropyBounds) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 300; ++i) {
    const auto d = testing::random_distribution(rng);
    const auto cb = build_codebook(d);
    const std::vector<double> p(d.probs().begin(), d.probs().end());
    const auto lengths = oracle::huffman_lengths(p);
    double oracle_len = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
      oracle_len += p[s] * static_cast<double>(lengths[s]);
    }
    const double len = cb.expected_length(d);
    EXPECT_NEAR(len, oracle_len, 1e-12);
    const double h = oracle::shannon_bits(p);
    EXPECT_LE(h, len + 1e-12);
    EXPECT_LT(len, h + 1.0);
    EXPECT_TRUE(cb.is_complete());
  }
}

TEST(ReferenceCodebook, ExactCodes) {
  const auto cb = reference_codebook();
  EXPECT_EQ(cb.size(), 24U);
  EXPECT_EQ(format_bits(cb.code(13)), "0100");
  EXPECT_EQ(format_bits(cb.code(0)), "11001");
  EXPECT_EQ(format_bits(cb.code(1)), "11011");
  EXPECT_EQ(format_bits(cb.code(19)), "0000");
  EXPECT_EQ(format_bits(cb.code(23)), "11010");
  EXPECT_DOUBLE_EQ(cb.kraft_sum(), 8 * 0.0625 + 16 * 0.03125);
  EXPECT_TRUE(cb.is_complete());
  EXPECT_EQ(cb.max_length(), 5U);
}

TEST(ReferenceCodebook, FixtureFileMatchesBuiltIn) {
  EXPECT_EQ(read_codebook_file(BEHAVSTEG_DATA_DIR "/reference_codes.tsv"),
            reference_codebook());
}

TEST(ReferenceCodebook, InducedDistribution) {
  const auto d = induced_distribution(reference_codebook());
  EXPECT_DOUBLE_EQ(d[13], 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(d[0], 1.0 / 32.0);
}

TEST(Codebook, RejectsPrefixViolationsAndBadSlots) {
  EXPECT_THROW(Codebook({{0, parse_bits("0")}, {1, parse_bits("01")}}),
               ValidationError);
  EXPECT_THROW(Codebook({{24, parse_bits("0")}, {1, parse_bits("1")}}),
               ValidationError);
  EXPECT_THROW(Codebook({{0, Bits{}}, {1, parse_bits("1")}}), ValidationError);
  EXPECT_THROW(Codebook({{0, parse_bits("1")}, {1, parse_bits("1")}}),
               ValidationError);
}

TEST(Codebook, TextRoundTrip) {
  std::ostringstream out;
  write_codebook(out, reference_codebook());
  EXPECT_EQ(codebook_from_text(out.str()), reference_codebook());
  EXPECT_THROW(codebook_from_text("0\t0\n0\t1\n"), ParseError);
  EXPECT_THROW(codebook_from_text("0 0x\n"), Error);
  EXPECT_THROW(codebook_from_text("0\t0\n1\t01\n"), ValidationError);
}

TEST(Codebook, IncompleteAndInducedDistribution) {
  const Codebook partial({{0, parse_bits("0")}, {1, parse_bits("10")}});
  EXPECT_FALSE(partial.is_complete());
  EXPECT_THROW(induced_distribution(partial), ValidationError);
  EXPECT_THROW(encode(parse_bits("11"), partial), ValidationError);
  EXPECT_THROW(partial.code(5), DecodeError);
}

TEST(Encode, ReferenceCodebookExamples) {
  const auto cb = reference_codebook();
  EXPECT_EQ(encode(parse_bits("0100"), cb), (EncodedSlots{{13}, 0}));
  EXPECT_EQ(encode(parse_bits("11001 11011"), cb), (EncodedSlots{{0, 1}, 0}));
  EXPECT_EQ(encode(Bits{}, cb), (EncodedSlots{{}, 0}));
}

TEST(Encode, PadsTrailingPartialCodeword) {
  const auto cb = reference_codebook();
  // "1" completes to "1000" (slot 14) with three zero bits.
  EXPECT_EQ(encode(parse_bits("1"), cb), (EncodedSlots{{14}, 3}));
  // "00" completes to "0000" (slot 19).
  EXPECT_EQ(encode(parse_bits("00"), cb), (EncodedSlots{{19}, 2}));
}

TEST(Decode, Examples) {
  const auto cb = reference_codebook();
  const std::vector<HourSlot> s13{13};
  const std::vector<HourSlot> s19{19};
  EXPECT_EQ(format_bits(decode(s13, cb, 4)), "0100");
  EXPECT_EQ(format_bits(decode(s19, cb, 2)), "00");
  EXPECT_TRUE(decode(std::vector<HourSlot>{}, cb, 0).empty());
  const Codebook small({{0, parse_bits("0")}, {1, parse_bits("1")}});
  EXPECT_THROW(decode(std::vector<HourSlot>{5}, small, 1), DecodeError);
  EXPECT_THROW(decode(s13, cb, 5), DecodeError);
}

TEST(Codec, RandomRoundTrips) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> len(0, 300);
  const auto table = reference_codebook();
  for (int i = 0; i < 1000; ++i) {
    const auto cb = i % 2 == 0 ? table : build_codebook(testing::random_distribution(rng));
    const auto bits = testing::random_bits(rng, len(rng));
    const auto enc = encode(bits, cb);
    std::size_t carried = 0;
    for (auto s : enc.slots) carried += cb.code(s).size();
    EXPECT_EQ(carried, bits.size() + enc.pad_bits);
    EXPECT_LT(enc.pad_bits, cb.max_length());
    EXPECT_EQ(decode(enc.slots, cb, bits.size()), bits);
  }
}

TEST(Schedule, SingleSlotLandsInItsHour) {
  const std::vector<HourSlot> slots{13};
  const auto ts = schedule_timestamps(slots, kDay, 42);
  ASSERT_EQ(ts.size(), 1U);
  EXPECT_GE(ts[0], kDay + 13 * 3600);
  EXPECT_LT(ts[0], kDay + 14 * 3600);
}

TEST(Schedule, RepeatedSlotMovesToNextDay) {
  const std::vector<HourSlot> slots{13, 13};
  const auto ts = schedule_timestamps(slots, kDay, 42);
  ASSERT_EQ(ts.size(), 2U);
  EXPECT_EQ(day_start(ts[1]), kDay + kSecondsPerDay);
  EXPECT_EQ(hour_of_day(ts[1]), 13);
}

TEST(Schedule, StartMidHourSkipsThatHour) {
  const std::vector<HourSlot> slots{13};
  const auto ts = schedule_timestamps(slots, kDay + 13 * 3600 + 5, 1);
  EXPECT_EQ(day_start(ts[0]), kDay + kSecondsPerDay);
}

TEST(Schedule, LongScheduleIsStrictlyIncreasingAndRecoverable) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<HourSlot> slot(0, 23);
  std::vector<HourSlot> slots(5000);
  for (auto& s : slots) s = slot(rng);
  const auto ts = schedule_timestamps(slots, kDay, 5);
  ASSERT_EQ(ts.size(), slots.size());
  EXPECT_TRUE(std::adjacent_find(ts.begin(), ts.end(), std::greater_equal<>()) ==
              ts.end());
  EXPECT_EQ(recover_slots(ts), slots);
}

TEST(Schedule, SeedControlsOffsets) {
  const std::vector<HourSlot> slots{1, 2, 3, 4};
  EXPECT_EQ(schedule_timestamps(slots, kDay, 3), schedule_timestamps(slots, kDay, 3));
  EXPECT_NE(schedule_timestamps(slots, kDay, 3), schedule_timestamps(slots, kDay, 4));
}

TEST(RecoverSlots, Examples) {
  const std::vector<Timestamp> t{kDay + 13 * 3600 + 37 * 60 + 2};
  EXPECT_EQ(recover_slots(t), std::vector<HourSlot>{13});
  const std::vector<HourSlot> slots{0, 23, 5};
  EXPECT_EQ(recover_slots(schedule_timestamps(slots, kDay, 0)), slots);
  const std::vector<Timestamp> flat{10, 10};
  EXPECT_THROW(recover_slots(flat), ValidationError);
}

TEST(RecoverSlots, RandomSchedules) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<HourSlot> slot(0, 23);
  std::uniform_int_distribution<std::size_t> len(1, 60);
  std::uniform_int_distribution<Timestamp> start(0, 2'000'000'000);
  for (int i = 0; i < 1000; ++i) {
    std::vector<HourSlot> slots(len(rng));
    for (auto& s : slots) s = slot(rng);
    EXPECT_EQ(recover_slots(schedule_timestamps(slots, start(rng), rng())), slots);
  }
}

TEST(PostingSchedule, EndToEndAndFileFormat) {
  const auto cb = reference_codebook();
  std::mt19937_64 rng(17);
  const auto payload = testing::random_bits(rng, 77);
  const auto sched = make_schedule(payload, cb, kDay, 99);
  EXPECT_EQ(sched.payload_bit_count, 77U);
  EXPECT_EQ(receive(sched.timestamps, cb, 77), payload);

  std::stringstream io;
  write_schedule(io, sched);
  EXPECT_EQ(read_schedule(io), sched);

  std::istringstream no_header("1577883600\t13\n");
  EXPECT_THROW(read_schedule(no_header), ParseError);
  std::istringstream wrong_hour("# payload_bits=4 pad_bits=0\n1577883600\t12\n");
  EXPECT_THROW(read_schedule(wrong_hour), Error);
}

TEST(PostingSchedule, InducedSlotFrequenciesFitChiSquare) {
  const auto cb = reference_codebook();
  std::mt19937_64 rng(2020);
  Bits payload;
  while (true) {
    const auto chunk = testing::random_bits(rng, 1000);
    payload.insert(payload.end(), chunk.begin(), chunk.end());
    if (encode(payload, cb).slots.size() >= 5000) break;
  }
  auto enc = encode(payload, cb);
  enc.slots.resize(5000);
  const auto ts = schedule_timestamps(enc.slots, kDay, 1);
  const auto& f = hourly_histogram(ts).probs();
  const auto& p = induced_distribution(cb).probs();
  const double x2 = oracle::pearson_chi_square(std::vector<double>(f.begin(), f.end()),
                                               std::vector<double>(p.begin(), p.end()), 5000.0);
  EXPECT_LT(x2, oracle::kChiSquare23Crit001);
}

}  // namespace
}  // namespace behavsteg
