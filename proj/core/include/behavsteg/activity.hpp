#pragma once

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace behavsteg {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecondsPerHour = 3600;
inline constexpr Timestamp kSecondsPerDay = 24 * kSecondsPerHour;

/// UTC hour of day (0..23) of `t`.
int hour_of_day(Timestamp t) noexcept;

/// Start of the UTC day containing `t`.
Timestamp day_start(Timestamp t) noexcept;

enum class EventKind : std::uint8_t {
  kPostOriginal,
  kRetweet,
  kComment,
  kFollow,
  kLike,
  kDownload,
};

inline constexpr std::size_t kEventKindCount = 6;

std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view name) noexcept;

/// Every kind except post_original names a target user.
constexpr bool is_targeted(EventKind kind) noexcept {
  return kind != EventKind::kPostOriginal;
}

/// Kinds that publish content on the actor's own timeline.
constexpr bool is_post(EventKind kind) noexcept {
  return kind == EventKind::kPostOriginal || kind == EventKind::kRetweet;
}

struct ActivityEvent {
  std::string user_id;
  Timestamp timestamp = 0;
  EventKind kind = EventKind::kPostOriginal;
  std::optional<std::string> target_user;
  std::optional<double> sentiment;
  std::optional<std::int64_t> content_len;

  friend bool operator==(const ActivityEvent&, const ActivityEvent&) = default;
};

/// Throws ValidationError if `event` breaks an ActivityEvent invariant.
void validate(const ActivityEvent& event);

/// Half-open interval [begin, end) of epoch seconds.
struct TimeWindow {
  Timestamp begin = 0;
  Timestamp end = 0;

  /// Throws InvalidWindowError unless begin < end.
  static TimeWindow make(Timestamp begin, Timestamp end);

  constexpr bool contains(Timestamp t) const noexcept {
    return t >= begin && t < end;
  }
  constexpr Timestamp length() const noexcept { return end - begin; }

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// Immutable, timestamp-ordered sequence of events. Construction validates
/// every event and stable-sorts by timestamp.
class ActivityLog {
 public:
  ActivityLog() = default;
  explicit ActivityLog(std::vector<ActivityEvent> events);

  std::span<const ActivityEvent> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

  /// Events with timestamps inside `window`.
  std::span<const ActivityEvent> slice(TimeWindow window) const noexcept;

  /// Distinct acting users, sorted.
  std::vector<std::string> users() const;

  /// Events whose actor is `user`, in log order.
  std::vector<ActivityEvent> events_of(std::string_view user) const;

  /// [first timestamp, last timestamp + 1), or nullopt for an empty log.
  std::optional<TimeWindow> time_range() const noexcept;

  friend bool operator==(const ActivityLog&, const ActivityLog&) = default;

 private:
  std::vector<ActivityEvent> events_;
};

/// Concatenates logs and re-sorts. Order among equal timestamps follows
/// argument order.
ActivityLog merge_logs(std::span<const ActivityLog> logs);

enum class LogFormat { kJsonl, kCsv };

/// Picks the format from a file extension (".csv" or anything else = jsonl).
LogFormat log_format_for_path(std::string_view path) noexcept;

struct ParseOptions {
  /// When a JSONL record carries a "text" field but no sentiment, fill
  /// sentiment from the built-in lexicon scorer.
  bool score_text = false;
};

/// Throws ParseError (malformed record, with line and field) or
/// ValidationError (invariant violation, message names line and field).
ActivityLog parse_activity_log(std::istream& in, LogFormat format,
                               const ParseOptions& options = {});

void write_activity_log(std::ostream& out, const ActivityLog& log,
                        LogFormat format);

ActivityLog read_activity_log_file(const std::string& path,
                                   const ParseOptions& options = {});
void write_activity_log_file(const std::string& path, const ActivityLog& log);

using EdgeKinds = std::bitset<kEventKindCount>;

/// All targeted kinds (everything but post_original).
EdgeKinds all_targeted_kinds() noexcept;

/// Interaction graph G_t = {V_t, E_t} over one window.
struct GraphSnapshot {
  TimeWindow window;
  std::set<std::string> vertices;
  std::map<std::pair<std::string, std::string>, std::size_t> edges;

  std::size_t edge_count(std::string_view source,
                         std::string_view target) const;
};

/// Vertices are every actor or target seen in [t1, t2); edges count
/// targeted events whose kind is in `edge_kinds`.
GraphSnapshot snapshot(const ActivityLog& log, Timestamp t1, Timestamp t2,
                       EdgeKinds edge_kinds = all_targeted_kinds());

struct SummaryStats {
  std::size_t user_count = 0;
  std::size_t event_count = 0;
  double retweet_rate = 0.0;
  double mean_events_per_user = 0.0;
  std::map<EventKind, std::size_t> per_kind_counts;
};

/// user_count counts distinct acting users.
SummaryStats summarize(const ActivityLog& log);

}  // namespace behavsteg
