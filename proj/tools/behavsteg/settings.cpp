#include "settings.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <string_view>

#include <behavsteg/error.hpp>

namespace behavsteg::cli {
namespace {

constexpr std::array<std::string_view, 29> kKnownKeys{
    // audit / eve
    "pe_order", "pe_delay", "window_len", "content_distance",
    "hourly_distance", "sentiment_bins", "edge_kinds", "range_begin",
    "range_end", "percentile",
    // simulate
    "seed", "normal_users", "stego_timing_users", "stego_content_users",
    "payload_bits", "codebook", "population_hourly", "posts_per_day", "days",
    "post_limit", "start", "hourly_concentration", "sentiment_model",
    "sentiment_rho", "sentiment_sigma", "sentiment_reversion",
    "neighbor_count", "targeted_ratio", "threads"};

std::size_t get_size(const KeyValueConfig& cfg, std::string_view key,
                     std::size_t fallback) {
  const auto v = cfg.get_uint(key);
  return v ? static_cast<std::size_t>(*v) : fallback;
}

HistogramDistance get_distance(const KeyValueConfig& cfg, std::string_view key,
                               HistogramDistance fallback) {
  const auto v = cfg.get(key);
  if (!v) return fallback;
  const auto d = parse_histogram_distance(*v);
  if (!d) {
    throw ConfigError("config key '" + std::string(key) +
                      "': expected tv, js or kl, got '" + *v + "'");
  }
  return *d;
}

EdgeKinds parse_edge_kinds(const std::string& text) {
  EdgeKinds kinds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) continue;
    const auto kind = parse_event_kind(item.substr(b, e - b + 1));
    if (!kind || !is_targeted(*kind)) {
      throw ConfigError("config key 'edge_kinds': '" + item +
                        "' is not a targeted event kind");
    }
    kinds.set(static_cast<std::size_t>(*kind));
  }
  if (kinds.none()) throw ConfigError("config key 'edge_kinds' is empty");
  return kinds;
}

HourlyDistribution read_hour_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open hourly weights file '" + path + "'");
  std::array<double, kSlotCount> weights{};
  std::array<bool, kSlotCount> seen{};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    int hour = -1;
    double weight = -1.0;
    if (!(row >> hour >> weight) || hour < 0 ||
        hour >= static_cast<int>(kSlotCount) || weight < 0.0) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected 'hour<TAB>weight'");
    }
    const auto h = static_cast<std::size_t>(hour);
    if (seen[h]) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": duplicate hour " + std::to_string(hour));
    }
    seen[h] = true;
    weights[h] = weight;
  }
  return HourlyDistribution::from_weights(weights);
}

}  // namespace

KeyValueConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  auto cfg = KeyValueConfig::from_file(path);
  const auto unknown = cfg.unknown_keys(kKnownKeys);
  if (!unknown.empty()) {
    throw ConfigError("unknown config key '" + unknown.front() + "' in " + path);
  }
  return cfg;
}

AuditConfig audit_config_from(const KeyValueConfig& cfg) {
  AuditConfig out;
  if (const auto v = cfg.get_int("pe_order")) out.pe.order = static_cast<int>(*v);
  if (const auto v = cfg.get_int("pe_delay")) out.pe.delay = static_cast<int>(*v);
  if (const auto v = cfg.get_int("window_len")) out.window_len = *v;
  out.content_distance =
      get_distance(cfg, "content_distance", out.content_distance);
  out.hourly_distance = get_distance(cfg, "hourly_distance", out.hourly_distance);
  out.sentiment_bins = get_size(cfg, "sentiment_bins", out.sentiment_bins);
  if (const auto v = cfg.get("edge_kinds")) out.edge_kinds = parse_edge_kinds(*v);

  const auto begin = cfg.get_int("range_begin");
  const auto end = cfg.get_int("range_end");
  if (begin.has_value() != end.has_value()) {
    throw ConfigError("range_begin and range_end must be given together");
  }
  if (begin) out.range = TimeWindow::make(*begin, *end);
  validate(out);
  return out;
}

PopulationSpec population_spec_from(const KeyValueConfig& cfg) {
  PopulationSpec spec;
  spec.normal_users = get_size(cfg, "normal_users", spec.normal_users);
  spec.stego_timing_users =
      get_size(cfg, "stego_timing_users", spec.stego_timing_users);
  spec.stego_content_users =
      get_size(cfg, "stego_content_users", spec.stego_content_users);
  spec.payload_bits = get_size(cfg, "payload_bits", spec.payload_bits);
  spec.threads = get_size(cfg, "threads", spec.threads);
  if (const auto v = cfg.get_uint("seed")) spec.seed = *v;
  if (const auto v = cfg.get("codebook")) spec.codebook = read_codebook_file(*v);

  auto& b = spec.base;
  if (const auto v = cfg.get("population_hourly")) b.hourly = read_hour_weights(*v);
  if (const auto v = cfg.get_double("posts_per_day")) b.posts_per_day = *v;
  b.days = get_size(cfg, "days", b.days);
  if (const auto v = cfg.get_uint("post_limit")) b.post_limit = *v;
  if (const auto v = cfg.get_int("start")) b.start = *v;
  if (const auto v = cfg.get_double("hourly_concentration")) {
    b.hourly_concentration = *v;
  }
  if (const auto v = cfg.get("sentiment_model")) {
    const auto m = parse_sentiment_model(*v);
    if (!m) {
      throw ConfigError("config key 'sentiment_model': expected ar1 or momentum");
    }
    b.sentiment_model = *m;
  }
  if (const auto v = cfg.get_double("sentiment_rho")) b.sentiment_rho = *v;
  if (const auto v = cfg.get_double("sentiment_sigma")) b.sentiment_sigma = *v;
  if (const auto v = cfg.get_double("sentiment_reversion")) {
    b.sentiment_reversion = *v;
  }
  b.neighbor_count = get_size(cfg, "neighbor_count", b.neighbor_count);
  if (const auto v = cfg.get_double("targeted_ratio")) b.targeted_ratio = *v;
  validate(b);
  return spec;
}

std::optional<double> percentile_from(const KeyValueConfig& cfg) {
  return cfg.get_double("percentile");
}

}  // namespace behavsteg::cli
