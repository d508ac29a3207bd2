#include "behavsteg/activity.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "behavsteg/error.hpp"
#include "behavsteg/lexicon.hpp"
#include "csv.hpp"

namespace behavsteg {

ParseError::ParseError(std::size_t line, std::string field,
                       const std::string& detail)
    : Error("line " + std::to_string(line) + ": field '" + field +
            "': " + detail),
      line_(line),
      field_(std::move(field)) {}

namespace {

constexpr std::array<std::string_view, kEventKindCount> kKindNames{
    "post_original", "retweet", "comment", "follow", "like", "download"};

constexpr std::string_view kCsvHeader =
    "user_id,timestamp,kind,target_user,sentiment,content_len";

Timestamp floor_div(Timestamp a, Timestamp b) noexcept {
  Timestamp q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

// Rethrows a ValidationError with line context.
[[noreturn]] void rethrow_with_line(std::size_t line,
                                    const ValidationError& e) {
  throw ValidationError("line " + std::to_string(line) + ": " + e.what());
}

ActivityEvent event_from_json(const nlohmann::json& obj, std::size_t line,
                              const ParseOptions& options) {
  if (!obj.is_object()) throw ParseError(line, "<record>", "not an object");
  ActivityEvent ev;

  auto field = [&](const char* name) -> const nlohmann::json* {
    auto it = obj.find(name);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
  };

  const auto* user = field("user_id");
  if (!user) throw ParseError(line, "user_id", "missing");
  if (!user->is_string()) throw ParseError(line, "user_id", "not a string");
  ev.user_id = user->get<std::string>();

  const auto* ts = field("timestamp");
  if (!ts) throw ParseError(line, "timestamp", "missing");
  if (ts->is_number_unsigned()) {
    ev.timestamp = static_cast<Timestamp>(ts->get<std::uint64_t>());
  } else if (ts->is_number_integer()) {
    ev.timestamp = ts->get<std::int64_t>();
  } else {
    throw ParseError(line, "timestamp", "not an integer");
  }

  const auto* kind = field("kind");
  if (!kind) throw ParseError(line, "kind", "missing");
  if (!kind->is_string()) throw ParseError(line, "kind", "not a string");
  const auto parsed_kind = parse_event_kind(kind->get<std::string>());
  if (!parsed_kind) {
    throw ParseError(line, "kind",
                     "unknown event kind '" + kind->get<std::string>() + "'");
  }
  ev.kind = *parsed_kind;

  if (const auto* target = field("target_user")) {
    if (!target->is_string()) {
      throw ParseError(line, "target_user", "not a string");
    }
    ev.target_user = target->get<std::string>();
  }
  if (const auto* s = field("sentiment")) {
    if (!s->is_number()) throw ParseError(line, "sentiment", "not a number");
    ev.sentiment = s->get<double>();
  } else if (options.score_text) {
    if (const auto* text = field("text"); text && text->is_string()) {
      ev.sentiment = lexicon_sentiment(text->get<std::string>());
    }
  }
  if (const auto* len = field("content_len")) {
    if (!len->is_number_integer()) {
      throw ParseError(line, "content_len", "not an integer");
    }
    ev.content_len = len->get<std::int64_t>();
  }
  return ev;
}

nlohmann::ordered_json event_to_json(const ActivityEvent& ev) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  out["user_id"] = ev.user_id;
  out["timestamp"] = ev.timestamp;
  out["kind"] = std::string(to_string(ev.kind));
  if (ev.target_user) out["target_user"] = *ev.target_user;
  if (ev.sentiment) out["sentiment"] = *ev.sentiment;
  if (ev.content_len) out["content_len"] = *ev.content_len;
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, const char* name) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw ParseError(line, name,
                     "cannot parse '" + std::string(text) + "' as a number");
  }
  return value;
}

ActivityEvent event_from_csv(std::string_view record, std::size_t line) {
  std::vector<std::string> cols;
  try {
    cols = detail::split_csv_record(record);
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, "<record>", e.what());
  }
  if (cols.size() != 6) {
    throw ParseError(line, "<record>",
                     "expected 6 columns, got " + std::to_string(cols.size()));
  }
  ActivityEvent ev;
  if (cols[0].empty()) throw ParseError(line, "user_id", "missing");
  ev.user_id = cols[0];
  if (cols[1].empty()) throw ParseError(line, "timestamp", "missing");
  ev.timestamp = parse_number<Timestamp>(cols[1], line, "timestamp");
  const auto kind = parse_event_kind(cols[2]);
  if (!kind) {
    throw ParseError(line, "kind", "unknown event kind '" + cols[2] + "'");
  }
  ev.kind = *kind;
  if (!cols[3].empty()) ev.target_user = cols[3];
  if (!cols[4].empty()) {
    ev.sentiment = parse_number<double>(cols[4], line, "sentiment");
  }
  if (!cols[5].empty()) {
    ev.content_len = parse_number<std::int64_t>(cols[5], line, "content_len");
  }
  return ev;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

}  // namespace

int hour_of_day(Timestamp t) noexcept {
  return static_cast<int>((t - day_start(t)) / kSecondsPerHour);
}

Timestamp day_start(Timestamp t) noexcept {
  return floor_div(t, kSecondsPerDay) * kSecondsPerDay;
}

std::string_view to_string(EventKind kind) noexcept {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<EventKind> parse_event_kind(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

void validate(const ActivityEvent& event) {
  if (event.user_id.empty()) {
    throw ValidationError("field 'user_id': empty user id");
  }
  if (event.timestamp < 0) {
    throw ValidationError("field 'timestamp': negative timestamp " +
                          std::to_string(event.timestamp));
  }
  if (is_targeted(event.kind) && !event.target_user) {
    throw ValidationError("field 'target_user': required for kind '" +
                          std::string(to_string(event.kind)) + "'");
  }
  if (!is_targeted(event.kind) && event.target_user) {
    throw ValidationError(
        "field 'target_user': not allowed for kind 'post_original'");
  }
  if (event.target_user && event.target_user->empty()) {
    throw ValidationError("field 'target_user': empty user id");
  }
  if (event.sentiment) {
    const double s = *event.sentiment;
    if (!std::isfinite(s) || s < -1.0 || s > 1.0) {
      throw ValidationError("field 'sentiment': " + format_double(s) +
                            " outside [-1, 1]");
    }
  }
  if (event.content_len && *event.content_len < 0) {
    throw ValidationError("field 'content_len': negative length");
  }
}

TimeWindow TimeWindow::make(Timestamp begin, Timestamp end) {
  if (begin >= end) {
    throw InvalidWindowError("invalid window [" + std::to_string(begin) +
                             ", " + std::to_string(end) + ")");
  }
  return TimeWindow{begin, end};
}

ActivityLog::ActivityLog(std::vector<ActivityEvent> events)
    : events_(std::move(events)) {
  for (const auto& ev : events_) validate(ev);
  std::stable_sort(events_.begin(), events_.end(),
                   [](const ActivityEvent& a, const ActivityEvent& b) {
                     return a.timestamp < b.timestamp;
                   });
}

std::span<const ActivityEvent> ActivityLog::slice(
    TimeWindow window) const noexcept {
  auto by_time = [](const ActivityEvent& ev, Timestamp t) {
    return ev.timestamp < t;
  };
  const auto first =
      std::lower_bound(events_.begin(), events_.end(), window.begin, by_time);
  const auto last =
      std::lower_bound(first, events_.end(), window.end, by_time);
  return {first, last};
}

std::vector<std::string> ActivityLog::users() const {
  std::set<std::string> seen;
  for (const auto& ev : events_) seen.insert(ev.user_id);
  return {seen.begin(), seen.end()};
}

std::vector<ActivityEvent> ActivityLog::events_of(std::string_view user) const {
  std::vector<ActivityEvent> out;
  for (const auto& ev : events_) {
    if (ev.user_id == user) out.push_back(ev);
  }
  return out;
}

std::optional<TimeWindow> ActivityLog::time_range() const noexcept {
  if (events_.empty()) return std::nullopt;
  return TimeWindow{events_.front().timestamp, events_.back().timestamp + 1};
}

ActivityLog merge_logs(std::span<const ActivityLog> logs) {
  std::vector<ActivityEvent> all;
  std::size_t total = 0;
  for (const auto& log : logs) total += log.size();
  all.reserve(total);
  for (const auto& log : logs) {
    all.insert(all.end(), log.events().begin(), log.events().end());
  }
  return ActivityLog(std::move(all));
}

LogFormat log_format_for_path(std::string_view path) noexcept {
  constexpr std::string_view kCsv = ".csv";
  if (path.size() >= kCsv.size() &&
      path.substr(path.size() - kCsv.size()) == kCsv) {
    return LogFormat::kCsv;
  }
  return LogFormat::kJsonl;
}

ActivityLog parse_activity_log(std::istream& in, LogFormat format,
                               const ParseOptions& options) {
  std::vector<ActivityEvent> events;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (is_blank(line)) continue;

    ActivityEvent ev;
    if (format == LogFormat::kJsonl) {
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line_no, "<record>", e.what());
      }
      ev = event_from_json(obj, line_no, options);
    } else {
      if (!header_seen) {
        if (line != kCsvHeader) {
          throw ParseError(line_no, "<header>",
                           "expected '" + std::string(kCsvHeader) + "'");
        }
        header_seen = true;
        continue;
      }
      ev = event_from_csv(line, line_no);
    }
    try {
      validate(ev);
    } catch (const ValidationError& e) {
      rethrow_with_line(line_no, e);
    }
    events.push_back(std::move(ev));
  }
  return ActivityLog(std::move(events));
}

void write_activity_log(std::ostream& out, const ActivityLog& log,
                        LogFormat format) {
  if (format == LogFormat::kJsonl) {
    for (const auto& ev : log.events()) out << event_to_json(ev).dump() << '\n';
    return;
  }
  out << kCsvHeader << '\n';
  for (const auto& ev : log.events()) {
    out << detail::quote_csv_field(ev.user_id) << ',' << ev.timestamp << ','
        << to_string(ev.kind) << ','
        << (ev.target_user ? detail::quote_csv_field(*ev.target_user) : "")
        << ',' << (ev.sentiment ? format_double(*ev.sentiment) : "") << ','
        << (ev.content_len ? std::to_string(*ev.content_len) : "") << '\n';
  }
}

ActivityLog read_activity_log_file(const std::string& path,
                                   const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open log file '" + path + "'");
  return parse_activity_log(in, log_format_for_path(path), options);
}

void write_activity_log_file(const std::string& path, const ActivityLog& log) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write log file '" + path + "'");
  write_activity_log(out, log, log_format_for_path(path));
}

EdgeKinds all_targeted_kinds() noexcept {
  EdgeKinds kinds;
  for (std::size_t i = 0; i < kEventKindCount; ++i) {
    kinds.set(i, is_targeted(static_cast<EventKind>(i)));
  }
  return kinds;
}

std::size_t GraphSnapshot::edge_count(std::string_view source,
                                      std::string_view target) const {
  const auto it =
      edges.find(std::make_pair(std::string(source), std::string(target)));
  return it == edges.end() ? 0 : it->second;
}

GraphSnapshot snapshot(const ActivityLog& log, Timestamp t1, Timestamp t2,
                       EdgeKinds edge_kinds) {
  GraphSnapshot snap;
  snap.window = TimeWindow::make(t1, t2);
  for (const auto& ev : log.slice(snap.window)) {
    snap.vertices.insert(ev.user_id);
    if (!ev.target_user) continue;
    snap.vertices.insert(*ev.target_user);
    if (edge_kinds.test(static_cast<std::size_t>(ev.kind))) {
      ++snap.edges[{ev.user_id, *ev.target_user}];
    }
  }
  return snap;
}

SummaryStats summarize(const ActivityLog& log) {
  SummaryStats stats;
  for (std::size_t i = 0; i < kEventKindCount; ++i) {
    stats.per_kind_counts[static_cast<EventKind>(i)] = 0;
  }
  std::set<std::string_view> users;
  for (const auto& ev : log.events()) {
    users.insert(ev.user_id);
    ++stats.per_kind_counts[ev.kind];
  }
  stats.user_count = users.size();
  stats.event_count = log.size();
  const auto originals = stats.per_kind_counts[EventKind::kPostOriginal];
  const auto retweets = stats.per_kind_counts[EventKind::kRetweet];
  if (originals + retweets > 0) {
    stats.retweet_rate = static_cast<double>(retweets) /
                         static_cast<double>(originals + retweets);
  }
  if (stats.user_count > 0) {
    stats.mean_events_per_user = static_cast<double>(stats.event_count) /
                                 static_cast<double>(stats.user_count);
  }
  return stats;
}

}  // namespace behavsteg
