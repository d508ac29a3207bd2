#include "commands.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <vector>

#include <behavsteg/activity.hpp>
#include <behavsteg/auditor.hpp>
#include <behavsteg/error.hpp>
#include <behavsteg/json_io.hpp>
#include <behavsteg/metrics.hpp>
#include <behavsteg/simulator.hpp>
#include <behavsteg/timing_codec.hpp>

#include "settings.hpp"

namespace behavsteg::cli {
namespace {

std::ifstream open_input(const std::string& path,
                         std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write '" + out_path + "'");
  out << text;
  if (!out) throw Error("write to '" + out_path + "' failed");
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Codebook codebook_or_default(const std::string& path) {
  return path.empty() ? reference_codebook() : read_codebook_file(path);
}

Labels read_labels(const std::string& path) {
  auto in = open_input(path);
  return parse_labels_json(in);
}

}  // namespace

int run_encode(const EncodeOptions& opt) {
  Bits payload;
  if (opt.bits) {
    payload = parse_bits(*opt.bits);
  } else if (!opt.bits_file.empty()) {
    auto in = open_input(opt.bits_file);
    payload = parse_bits(std::string(std::istreambuf_iterator<char>(in), {}));
  } else {
    auto in = open_input(opt.message_file, std::ios::binary);
    const std::string raw(std::istreambuf_iterator<char>(in), {});
    std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
    payload = bits_from_bytes(bytes);
  }
  const auto codebook = codebook_or_default(opt.codebook);
  const auto schedule = make_schedule(payload, codebook, opt.start, opt.seed);
  std::ostringstream out;
  write_schedule(out, schedule);
  emit(out.str(), opt.out);
  return 0;
}

int run_decode(const DecodeOptions& opt) {
  const auto codebook = codebook_or_default(opt.codebook);
  Bits bits;
  if (!opt.schedule.empty()) {
    auto in = open_input(opt.schedule);
    const auto schedule = read_schedule(in);
    bits = decode(schedule.slots, codebook,
                  opt.count.value_or(schedule.payload_bit_count));
  } else {
    if (!opt.count) throw ValidationError("--count is required with --log");
    const auto log = read_activity_log_file(opt.log);
    std::vector<Timestamp> times;
    for (const auto& ev : log.events_of(opt.user)) {
      if (is_post(ev.kind)) times.push_back(ev.timestamp);
    }
    if (times.empty()) {
      throw ValidationError("user '" + opt.user + "' has no posts in the log");
    }
    bits = receive(times, codebook, *opt.count);
  }
  std::cout << format_bits(bits) << '\n';
  return 0;
}

int run_simulate(const SimulateOptions& opt) {
  const auto cfg = load_config(opt.config);
  auto spec = population_spec_from(cfg);
  if (!opt.seed && !cfg.contains("seed")) {
    throw ValidationError("simulate needs an explicit --seed (or seed key)");
  }
  if (opt.seed) spec.seed = *opt.seed;
  if (opt.normal_users) spec.normal_users = *opt.normal_users;
  if (opt.stego_timing_users) spec.stego_timing_users = *opt.stego_timing_users;
  if (opt.stego_content_users) spec.stego_content_users = *opt.stego_content_users;
  if (opt.payload_bits) spec.payload_bits = *opt.payload_bits;
  if (opt.threads) spec.threads = *opt.threads;

  const auto pop = simulate_population(spec);
  write_activity_log_file(opt.out, pop.log);
  emit(labels_to_json(pop.labels) + "\n", opt.labels);
  if (!opt.payloads.empty()) {
    std::ostringstream out;
    out << "{";
    bool first = true;
    for (const auto& [user, bits] : pop.payloads) {
      out << (first ? "\n  " : ",\n  ") << '"' << user << "\": \""
          << format_bits(bits) << '"';
      first = false;
    }
    out << (first ? "}\n" : "\n}\n");
    emit(out.str(), opt.payloads);
  }

  const auto stats = summarize(pop.log);
  std::cout << "{\"seed\": " << spec.seed << ", \"users\": " << pop.users.size()
            << ", \"normal\": " << pop.users_with(UserLabel::kNormal).size()
            << ", \"stego_timing\": "
            << pop.users_with(UserLabel::kStegoTiming).size()
            << ", \"stego_content\": "
            << pop.users_with(UserLabel::kStegoContent).size()
            << ", \"events\": " << stats.event_count << ", \"log\": \""
            << opt.out << "\"}\n";
  return 0;
}

int run_audit(const AuditOptions& opt) {
  const auto cfg = load_config(opt.config);
  const auto audit_cfg = audit_config_from(cfg);
  const double percentile =
      opt.percentile.value_or(percentile_from(cfg).value_or(95.0));
  const auto log = read_activity_log_file(opt.log);

  std::vector<std::string> reference;
  if (opt.labels.empty()) {
    reference = log.users();
  } else {
    for (const auto& [id, label] : read_labels(opt.labels)) {
      if (label == UserLabel::kNormal) reference.push_back(id);
    }
  }
  std::vector<UserProfile> profiles;
  profiles.reserve(reference.size());
  for (const auto& id : reference) {
    profiles.push_back(profile_user(log, id, audit_cfg));
  }
  const auto baseline = build_baseline(profiles, audit_cfg);
  const auto thresholds =
      calibrate_thresholds(profiles, baseline, audit_cfg, percentile);
  const auto report = audit(log, opt.user, baseline, thresholds, audit_cfg);

  emit(to_json(report) + "\n", opt.out);
  if (report.any_fail()) return 2;
  if (report.any_indeterminate()) return 3;
  return 0;
}

int run_stats(const StatsOptions& opt) {
  const auto log = read_activity_log_file(opt.log);
  emit(to_json(summarize(log)) + "\n", opt.out);
  return 0;
}

int run_pe(const PeOptions& opt) {
  if (opt.column == 0) throw ValidationError("--column is 1-based");
  auto in = open_input(opt.input);
  std::vector<double> series;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    for (char& c : line) {
      if (c == ',' || c == '\t' || c == '\r') c = ' ';
    }
    std::istringstream fields(line);
    std::string field;
    for (std::size_t k = 0; k < opt.column; ++k) {
      if (!(fields >> field)) {
        throw ParseError(line_no, "column " + std::to_string(opt.column),
                         "missing");
      }
    }
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end) {
      throw ParseError(line_no, "column " + std::to_string(opt.column),
                       "not a number: '" + field + "'");
    }
    series.push_back(value);
  }
  const double pe = permutation_entropy(series, {opt.order, opt.delay});
  std::cout << format_double(pe) << '\n';
  return 0;
}

int run_eve(const EveOptions& opt) {
  const auto cfg = load_config(opt.config);
  EveConfig eve;
  eve.audit = audit_config_from(cfg);
  const auto constraint = parse_constraint(opt.constraint);
  if (!constraint) {
    throw ValidationError("unknown constraint '" + opt.constraint + "'");
  }
  eve.constraint = *constraint;
  const auto log = read_activity_log_file(opt.log);
  const auto report = behavsteg::run_eve(log, read_labels(opt.labels), eve);
  emit(to_json(report) + "\n", opt.out);
  return 0;
}

}  // namespace behavsteg::cli
