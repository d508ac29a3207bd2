#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "behavsteg/activity.hpp"

namespace behavsteg {

inline constexpr std::size_t kSlotCount = 24;

/// Hour-of-day slot index, 0..23. Slot i covers [i:00, i+1:00) UTC.
using HourSlot = int;

/// Secret payload and codewords as bit sequences.
using Bits = std::vector<bool>;

/// Parses an ASCII string of '0'/'1'. Whitespace is ignored; any other
/// character throws ValidationError.
Bits parse_bits(std::string_view text);
std::string format_bits(const Bits& bits);

/// MSB-first expansion of raw bytes.
Bits bits_from_bytes(std::span<const std::uint8_t> bytes);

/// Posting probability for each of the 24 hour slots.
class HourlyDistribution {
 public:
  /// Throws ValidationError unless every entry is finite, non-negative and
  /// the entries sum to 1 within 1e-9.
  explicit HourlyDistribution(const std::array<double, kSlotCount>& probs);

  /// Normalizes non-negative weights with a positive sum.
  static HourlyDistribution from_weights(std::span<const double> weights);
  static HourlyDistribution uniform();

  const std::array<double, kSlotCount>& probs() const noexcept {
    return probs_;
  }
  double operator[](std::size_t slot) const noexcept { return probs_[slot]; }

  /// Shannon entropy in bits.
  double entropy_bits() const noexcept;

  friend bool operator==(const HourlyDistribution&,
                         const HourlyDistribution&) = default;

 private:
  std::array<double, kSlotCount> probs_{};
};

/// Prefix-free map from hour slot to codeword.
class Codebook {
 public:
  /// Throws ValidationError on a slot outside 0..23, an empty codeword, or a
  /// codeword that is a prefix of another.
  explicit Codebook(std::map<HourSlot, Bits> codes);

  const std::map<HourSlot, Bits>& codes() const noexcept { return codes_; }
  std::size_t size() const noexcept { return codes_.size(); }
  bool contains(HourSlot slot) const { return codes_.count(slot) != 0; }

  /// Throws DecodeError when `slot` has no codeword.
  const Bits& code(HourSlot slot) const;

  std::size_t max_length() const noexcept;
  double kraft_sum() const noexcept;

  /// Exact integer test of Kraft sum == 1.
  bool is_complete() const noexcept;

  /// Expected codeword length under `dist`.
  double expected_length(const HourlyDistribution& dist) const noexcept;

  friend bool operator==(const Codebook&, const Codebook&) = default;

 private:
  std::map<HourSlot, Bits> codes_;
};

/// Deterministic Huffman code over the positive-probability slots. Ties in
/// the merge queue break by creation order (leaves 0..23 first); the node
/// popped first becomes the 0 branch. Throws CapacityError when fewer than
/// two slots have positive probability.
Codebook build_codebook(const HourlyDistribution& dist);

/// The reference posting-hour code table (8 four-bit and 16 five-bit codes).
Codebook reference_codebook();

/// Slot distribution induced by feeding iid uniform bits: 2^-len per slot.
/// Throws ValidationError for an incomplete codebook.
HourlyDistribution induced_distribution(const Codebook& codebook);

/// Text format: one `slot<TAB>bitstring` line per entry. Blank lines and
/// lines starting with '#' are skipped.
Codebook read_codebook(std::istream& in);
Codebook read_codebook_file(const std::string& path);
void write_codebook(std::ostream& out, const Codebook& codebook);

struct EncodedSlots {
  std::vector<HourSlot> slots;
  std::size_t pad_bits = 0;

  friend bool operator==(const EncodedSlots&, const EncodedSlots&) = default;
};

/// Greedy prefix walk over `bits`. A trailing partial codeword is completed
/// with zero bits, counted in pad_bits. Throws ValidationError when the
/// codebook is incomplete (some bit path would never reach a codeword).
EncodedSlots encode(const Bits& bits, const Codebook& codebook);

/// Concatenates the codewords of `slots` and truncates to
/// `payload_bit_count`. Throws DecodeError on an unknown slot or when the
/// codewords carry fewer than `payload_bit_count` bits.
Bits decode(std::span<const HourSlot> slots, const Codebook& codebook,
            std::size_t payload_bit_count);

/// timestamps[i] lies in the earliest UTC occurrence of hour slots[i] whose
/// start is strictly after timestamps[i-1] (or `start`), offset by a seeded
/// uniform draw in [0, 3600).
std::vector<Timestamp> schedule_timestamps(std::span<const HourSlot> slots,
                                           Timestamp start,
                                           std::uint64_t seed);

/// UTC hour of each timestamp. Throws ValidationError unless the input is
/// strictly increasing.
std::vector<HourSlot> recover_slots(std::span<const Timestamp> timestamps);

/// Sender-side result: the slots, their posting times, and the framing
/// metadata the receiver needs out of band.
struct PostingSchedule {
  std::vector<HourSlot> slots;
  std::vector<Timestamp> timestamps;
  std::size_t pad_bits = 0;
  std::size_t payload_bit_count = 0;

  friend bool operator==(const PostingSchedule&,
                         const PostingSchedule&) = default;
};

PostingSchedule make_schedule(const Bits& payload, const Codebook& codebook,
                              Timestamp start, std::uint64_t seed);

/// Receiver side: recover slots from posting times and decode.
Bits receive(std::span<const Timestamp> timestamps, const Codebook& codebook,
             std::size_t payload_bit_count);

/// Schedule file: `# payload_bits=N pad_bits=P` header, then one
/// `timestamp<TAB>slot` line per post.
void write_schedule(std::ostream& out, const PostingSchedule& schedule);
PostingSchedule read_schedule(std::istream& in);

}  // namespace behavsteg
