#include "behavsteg/timing_codec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include "behavsteg/error.hpp"

namespace behavsteg {
namespace {

constexpr double kSumTolerance = 1e-9;

constexpr std::array<std::string_view, kSlotCount> kReferenceCodes{
    "11001", "11011", "11000", "10110", "10011", "01010",  // 0-6
    "01011", "10010", "10100", "10101", "10111", "11100",  // 6-12
    "11111", "0100",  "1000",  "0111",  "0110",  "0011",   // 12-18
    "0010",  "0000",  "0001",  "11110", "11101", "11010",  // 18-24
};

bool is_prefix(const Bits& a, const Bits& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// Binary trie over the codewords; leaves carry their slot.
class CodeTrie {
 public:
  explicit CodeTrie(const Codebook& codebook) {
    nodes_.emplace_back();
    for (const auto& [slot, code] : codebook.codes()) {
      std::size_t at = 0;
      for (bool bit : code) {
        auto& next = nodes_[at].child[bit ? 1 : 0];
        if (next < 0) {
          next = static_cast<int>(nodes_.size());
          nodes_.emplace_back();
        }
        at = static_cast<std::size_t>(nodes_[at].child[bit ? 1 : 0]);
      }
      nodes_[at].slot = slot;
    }
  }

  static constexpr std::size_t root() { return 0; }

  int child(std::size_t node, bool bit) const {
    return nodes_[node].child[bit ? 1 : 0];
  }
  HourSlot slot(std::size_t node) const { return nodes_[node].slot; }

 private:
  struct Node {
    int child[2] = {-1, -1};
    HourSlot slot = -1;
  };
  std::vector<Node> nodes_;
};

// Huffman nodes live in an arena; a node's index is its creation order.
struct HuffmanNode {
  double prob = 0.0;
  HourSlot slot = -1;
  int zero = -1;
  int one = -1;
};

void assign_codes(const std::vector<HuffmanNode>& nodes, int at, Bits& prefix,
                  std::map<HourSlot, Bits>& out) {
  const auto& node = nodes[static_cast<std::size_t>(at)];
  if (node.zero < 0) {
    out[node.slot] = prefix;
    return;
  }
  prefix.push_back(false);
  assign_codes(nodes, node.zero, prefix, out);
  prefix.back() = true;
  assign_codes(nodes, node.one, prefix, out);
  prefix.pop_back();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

HourlyDistribution::HourlyDistribution(
    const std::array<double, kSlotCount>& probs)
    : probs_(probs) {
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ValidationError("hourly probability must be finite and >= 0");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw ValidationError("hourly probabilities sum to " +
                          std::to_string(sum) + ", expected 1");
  }
}

HourlyDistribution HourlyDistribution::from_weights(
    std::span<const double> weights) {
  if (weights.size() != kSlotCount) {
    throw ValidationError("expected 24 hourly weights, got " +
                          std::to_string(weights.size()));
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("hourly weight must be finite and >= 0");
    }
    sum += w;
  }
  if (sum <= 0.0) throw ValidationError("hourly weights sum to zero");
  std::array<double, kSlotCount> probs{};
  for (std::size_t i = 0; i < kSlotCount; ++i) probs[i] = weights[i] / sum;
  return HourlyDistribution(probs);
}

HourlyDistribution HourlyDistribution::uniform() {
  std::array<double, kSlotCount> probs{};
  probs.fill(1.0 / static_cast<double>(kSlotCount));
  return HourlyDistribution(probs);
}

double HourlyDistribution::entropy_bits() const noexcept {
  double h = 0.0;
  for (double p : probs_) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

Codebook::Codebook(std::map<HourSlot, Bits> codes) : codes_(std::move(codes)) {
  for (const auto& [slot, code] : codes_) {
    if (slot < 0 || slot >= static_cast<HourSlot>(kSlotCount)) {
      throw ValidationError("codebook slot " + std::to_string(slot) +
                            " outside 0..23");
    }
    if (code.empty()) {
      throw ValidationError("empty codeword for slot " + std::to_string(slot));
    }
    if (code.size() > 63) {
      throw ValidationError("codeword for slot " + std::to_string(slot) +
                            " longer than 63 bits");
    }
  }
  for (auto a = codes_.begin(); a != codes_.end(); ++a) {
    for (auto b = std::next(a); b != codes_.end(); ++b) {
      if (is_prefix(a->second, b->second) || is_prefix(b->second, a->second)) {
        throw ValidationError("codebook is not prefix-free: slot " +
                              std::to_string(a->first) + " (" +
                              format_bits(a->second) + ") and slot " +
                              std::to_string(b->first) + " (" +
                              format_bits(b->second) + ")");
      }
    }
  }
}

const Bits& Codebook::code(HourSlot slot) const {
  const auto it = codes_.find(slot);
  if (it == codes_.end()) {
    throw DecodeError("slot " + std::to_string(slot) +
                      " has no codeword in the codebook");
  }
  return it->second;
}

std::size_t Codebook::max_length() const noexcept {
  std::size_t longest = 0;
  for (const auto& [slot, code] : codes_) longest = std::max(longest, code.size());
  return longest;
}

double Codebook::kraft_sum() const noexcept {
  double sum = 0.0;
  for (const auto& [slot, code] : codes_) {
    sum += std::ldexp(1.0, -static_cast<int>(code.size()));
  }
  return sum;
}

bool Codebook::is_complete() const noexcept {
  if (codes_.empty()) return false;
  const std::size_t longest = max_length();
  // Sum of 2^(longest - len) must equal 2^longest. Prefix-freeness bounds
  // the sum by 2^longest <= 2^63.
  std::uint64_t sum = 0;
  for (const auto& [slot, code] : codes_) {
    sum += std::uint64_t{1} << (longest - code.size());
  }
  return sum == (std::uint64_t{1} << longest);
}

double Codebook::expected_length(
    const HourlyDistribution& dist) const noexcept {
  double len = 0.0;
  for (const auto& [slot, code] : codes_) {
    len += dist[static_cast<std::size_t>(slot)] *
           static_cast<double>(code.size());
  }
  return len;
}

Codebook build_codebook(const HourlyDistribution& dist) {
  std::vector<HuffmanNode> nodes;
  nodes.reserve(2 * kSlotCount);
  // Min-queue on (probability, creation index).
  auto later = [&nodes](int a, int b) {
    const double pa = nodes[static_cast<std::size_t>(a)].prob;
    const double pb = nodes[static_cast<std::size_t>(b)].prob;
    if (pa != pb) return pa > pb;
    return a > b;
  };
  std::priority_queue<int, std::vector<int>, decltype(later)> queue(later);
  for (std::size_t slot = 0; slot < kSlotCount; ++slot) {
    if (dist[slot] <= 0.0) continue;
    nodes.push_back({dist[slot], static_cast<HourSlot>(slot), -1, -1});
    queue.push(static_cast<int>(nodes.size() - 1));
  }
  if (queue.size() < 2) {
    throw CapacityError(
        "need at least two slots with positive probability to carry bits",
        0);
  }
  while (queue.size() > 1) {
    const int zero = queue.top();
    queue.pop();
    const int one = queue.top();
    queue.pop();
    nodes.push_back({nodes[static_cast<std::size_t>(zero)].prob +
                         nodes[static_cast<std::size_t>(one)].prob,
                     -1, zero, one});
    queue.push(static_cast<int>(nodes.size() - 1));
  }

  std::map<HourSlot, Bits> codes;
  Bits prefix;
  assign_codes(nodes, queue.top(), prefix, codes);
  return Codebook(std::move(codes));
}

Codebook reference_codebook() {
  std::map<HourSlot, Bits> codes;
  for (std::size_t slot = 0; slot < kSlotCount; ++slot) {
    codes[static_cast<HourSlot>(slot)] = parse_bits(kReferenceCodes[slot]);
  }
  return Codebook(std::move(codes));
}

HourlyDistribution induced_distribution(const Codebook& codebook) {
  if (!codebook.is_complete()) {
    throw ValidationError("induced distribution needs a complete codebook");
  }
  std::array<double, kSlotCount> probs{};
  for (const auto& [slot, code] : codebook.codes()) {
    probs[static_cast<std::size_t>(slot)] =
        std::ldexp(1.0, -static_cast<int>(code.size()));
  }
  return HourlyDistribution(probs);
}

Codebook read_codebook(std::istream& in) {
  std::map<HourSlot, Bits> codes;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find_first_of("\t ");
    if (tab == std::string::npos) {
      throw ParseError(line_no, "<entry>", "expected 'slot<TAB>bitstring'");
    }
    HourSlot slot = 0;
    try {
      std::size_t used = 0;
      slot = std::stoi(line.substr(0, tab), &used);
      if (used != tab) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ParseError(line_no, "slot", "not an integer");
    }
    Bits code;
    try {
      code = parse_bits(trim(line.substr(tab + 1)));
    } catch (const ValidationError& e) {
      throw ParseError(line_no, "bitstring", e.what());
    }
    if (!codes.emplace(slot, std::move(code)).second) {
      throw ParseError(line_no, "slot",
                       "duplicate slot " + std::to_string(slot));
    }
  }
  return Codebook(std::move(codes));
}

Codebook read_codebook_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open codebook file '" + path + "'");
  return read_codebook(in);
}

void write_codebook(std::ostream& out, const Codebook& codebook) {
  for (const auto& [slot, code] : codebook.codes()) {
    out << slot << '\t' << format_bits(code) << '\n';
  }
}

EncodedSlots encode(const Bits& bits, const Codebook& codebook) {
  if (!codebook.is_complete()) {
    throw ValidationError(
        "cannot encode with an incomplete codebook (Kraft sum < 1)");
  }
  const CodeTrie trie(codebook);
  EncodedSlots out;
  std::size_t node = CodeTrie::root();
  for (bool bit : bits) {
    node = static_cast<std::size_t>(trie.child(node, bit));
    if (const HourSlot slot = trie.slot(node); slot >= 0) {
      out.slots.push_back(slot);
      node = CodeTrie::root();
    }
  }
  while (node != CodeTrie::root()) {
    node = static_cast<std::size_t>(trie.child(node, false));
    ++out.pad_bits;
    if (const HourSlot slot = trie.slot(node); slot >= 0) {
      out.slots.push_back(slot);
      node = CodeTrie::root();
    }
  }
  return out;
}

Bits decode(std::span<const HourSlot> slots, const Codebook& codebook,
            std::size_t payload_bit_count) {
  Bits bits;
  for (HourSlot slot : slots) {
    const Bits& code = codebook.code(slot);
    bits.insert(bits.end(), code.begin(), code.end());
  }
  if (payload_bit_count > bits.size()) {
    throw DecodeError("schedule carries " + std::to_string(bits.size()) +
                      " bits but " + std::to_string(payload_bit_count) +
                      " were expected");
  }
  bits.resize(payload_bit_count);
  return bits;
}

std::vector<Timestamp> schedule_timestamps(std::span<const HourSlot> slots,
                                           Timestamp start,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Timestamp> offset(0, kSecondsPerHour - 1);
  std::vector<Timestamp> out;
  out.reserve(slots.size());
  Timestamp reference = start;
  for (HourSlot slot : slots) {
    if (slot < 0 || slot >= static_cast<HourSlot>(kSlotCount)) {
      throw ValidationError("slot " + std::to_string(slot) +
                            " outside 0..23");
    }
    Timestamp hour_start = day_start(reference) + slot * kSecondsPerHour;
    if (hour_start <= reference) hour_start += kSecondsPerDay;
    reference = hour_start + offset(rng);
    out.push_back(reference);
  }
  return out;
}

std::vector<HourSlot> recover_slots(std::span<const Timestamp> timestamps) {
  std::vector<HourSlot> slots;
  slots.reserve(timestamps.size());
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    if (i > 0 && timestamps[i] <= timestamps[i - 1]) {
      throw ValidationError("timestamps not strictly increasing at index " +
                            std::to_string(i));
    }
    slots.push_back(hour_of_day(timestamps[i]));
  }
  return slots;
}

PostingSchedule make_schedule(const Bits& payload, const Codebook& codebook,
                              Timestamp start, std::uint64_t seed) {
  auto encoded = encode(payload, codebook);
  PostingSchedule schedule;
  schedule.timestamps = schedule_timestamps(encoded.slots, start, seed);
  schedule.slots = std::move(encoded.slots);
  schedule.pad_bits = encoded.pad_bits;
  schedule.payload_bit_count = payload.size();
  return schedule;
}

Bits receive(std::span<const Timestamp> timestamps, const Codebook& codebook,
             std::size_t payload_bit_count) {
  const auto slots = recover_slots(timestamps);
  return decode(slots, codebook, payload_bit_count);
}

void write_schedule(std::ostream& out, const PostingSchedule& schedule) {
  out << "# payload_bits=" << schedule.payload_bit_count
      << " pad_bits=" << schedule.pad_bits << '\n';
  for (std::size_t i = 0; i < schedule.timestamps.size(); ++i) {
    out << schedule.timestamps[i] << '\t' << schedule.slots[i] << '\n';
  }
}

PostingSchedule read_schedule(std::istream& in) {
  PostingSchedule schedule;
  bool framing_seen = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream tokens(line.substr(1));
      std::string token;
      while (tokens >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        try {
          if (key == "payload_bits") {
            schedule.payload_bit_count = std::stoull(value);
            framing_seen = true;
          } else if (key == "pad_bits") {
            schedule.pad_bits = std::stoull(value);
          }
        } catch (const std::exception&) {
          throw ParseError(line_no, key, "not a non-negative integer");
        }
      }
      continue;
    }
    std::istringstream fields(line);
    Timestamp ts = 0;
    if (!(fields >> ts)) throw ParseError(line_no, "timestamp", "not an integer");
    HourSlot slot = hour_of_day(ts);
    HourSlot listed = 0;
    if (fields >> listed) {
      if (listed != slot) {
        throw ParseError(line_no, "slot",
                         "slot " + std::to_string(listed) +
                             " disagrees with timestamp hour " +
                             std::to_string(slot));
      }
    }
    schedule.timestamps.push_back(ts);
    schedule.slots.push_back(slot);
  }
  if (!framing_seen) {
    throw ParseError(line_no, "payload_bits",
                     "missing '# payload_bits=N' header");
  }
  return schedule;
}

}  // namespace behavsteg
