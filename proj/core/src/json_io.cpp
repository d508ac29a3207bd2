#include "behavsteg/json_io.hpp"

#include <cmath>
#include <istream>

#include <nlohmann/json.hpp>

#include "behavsteg/error.hpp"

namespace behavsteg {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json number_or_null(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

}  // namespace

std::string to_json(const SummaryStats& stats) {
  ordered_json j;
  j["user_count"] = stats.user_count;
  j["event_count"] = stats.event_count;
  j["retweet_rate"] = stats.retweet_rate;
  j["mean_events_per_user"] = stats.mean_events_per_user;
  ordered_json kinds = ordered_json::object();
  for (const auto& [kind, count] : stats.per_kind_counts) {
    kinds[std::string(to_string(kind))] = count;
  }
  j["per_kind_counts"] = std::move(kinds);
  return j.dump(2);
}

std::string to_json(const AuditReport& report) {
  ordered_json j;
  j["user"] = report.user;
  j["overall_pass"] = report.overall_pass;
  j["status"] = report.any_fail()            ? "fail"
                : report.any_indeterminate() ? "indeterminate"
                                             : "pass";
  ordered_json constraints = ordered_json::object();
  for (const auto& c : report.constraints) {
    ordered_json entry;
    entry["score"] = number_or_null(c.score);
    entry["threshold"] = c.threshold;
    entry["pass"] = c.pass();
    entry["verdict"] = std::string(to_string(c.verdict));
    constraints[std::string(to_string(c.constraint))] = std::move(entry);
  }
  j["constraints"] = std::move(constraints);
  return j.dump(2);
}

std::string to_json(const DetectionReport& report) {
  ordered_json j;
  j["auc"] = report.auc;
  ordered_json roc = ordered_json::array();
  for (const auto& p : report.roc_points) {
    roc.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}});
  }
  j["roc_points"] = std::move(roc);
  ordered_json users = ordered_json::array();
  for (const auto& u : report.users) {
    users.push_back(
        {{"user", u.user}, {"score", number_or_null(u.score)}, {"stego", u.positive}});
  }
  j["users"] = std::move(users);
  return j.dump(2);
}

std::string labels_to_json(const Labels& labels) {
  ordered_json j = ordered_json::object();
  for (const auto& [id, label] : labels) j[id] = std::string(to_string(label));
  return j.dump(2);
}

Labels parse_labels_json(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(1, "<labels>", e.what());
  }
  if (!j.is_object()) throw ParseError(1, "<labels>", "expected a JSON object");
  Labels labels;
  for (const auto& [id, value] : j.items()) {
    if (!value.is_string()) throw ParseError(1, id, "label is not a string");
    const auto label = parse_user_label(value.get<std::string>());
    if (!label) {
      throw ParseError(1, id, "unknown label '" + value.get<std::string>() + "'");
    }
    labels[id] = *label;
  }
  return labels;
}

}  // namespace behavsteg
