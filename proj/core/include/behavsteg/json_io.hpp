#pragma once

#include <iosfwd>
#include <string>

#include "behavsteg/activity.hpp"
#include "behavsteg/auditor.hpp"
#include "behavsteg/simulator.hpp"

namespace behavsteg {

std::string to_json(const SummaryStats& stats);

/// Scores that are indeterminate or non-finite serialize as null; the
/// "verdict" field disambiguates.
std::string to_json(const AuditReport& report);

std::string to_json(const DetectionReport& report);

/// {"user_id": "normal" | "stego_timing" | "stego_content", ...}
std::string labels_to_json(const Labels& labels);

/// Throws ParseError on malformed JSON or an unknown label.
Labels parse_labels_json(std::istream& in);

}  // namespace behavsteg
