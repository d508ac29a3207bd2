#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace behavsteg::cli {

struct EncodeOptions {
  std::optional<std::string> bits;
  std::string bits_file;
  std::string message_file;
  std::string codebook;
  std::int64_t start = 0;
  std::uint64_t seed = 0;
  std::string out;
};

struct DecodeOptions {
  std::string schedule;
  std::string log;
  std::string user;
  std::string codebook;
  std::optional<std::size_t> count;
};

struct SimulateOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> normal_users;
  std::optional<std::size_t> stego_timing_users;
  std::optional<std::size_t> stego_content_users;
  std::optional<std::size_t> payload_bits;
  std::optional<std::size_t> threads;
  std::string out;
  std::string labels;
  std::string payloads;
};

struct AuditOptions {
  std::string log;
  std::string user;
  std::string labels;
  std::string config;
  std::optional<double> percentile;
  std::string out;
};

struct StatsOptions {
  std::string log;
  std::string out;
};

struct PeOptions {
  std::string input;
  std::size_t column = 1;
  int order = 3;
  int delay = 1;
};

struct EveOptions {
  std::string log;
  std::string labels;
  std::string config;
  std::string constraint = "temporal_content";
  std::string out;
};

// Each returns the process exit code; library errors propagate as
// exceptions.
int run_encode(const EncodeOptions& opt);
int run_decode(const DecodeOptions& opt);
int run_simulate(const SimulateOptions& opt);
int run_audit(const AuditOptions& opt);
int run_stats(const StatsOptions& opt);
int run_pe(const PeOptions& opt);
int run_eve(const EveOptions& opt);

}  // namespace behavsteg::cli
