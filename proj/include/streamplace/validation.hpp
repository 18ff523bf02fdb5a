#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace streamplace {

enum class IssueSeverity { Warning, Error };

struct ValidationIssue {
  IssueSeverity severity = IssueSeverity::Error;
  std::string code;     // stable machine-readable tag, e.g. "row-sum"
  std::string message;  // human-readable detail naming the offending entity
};

// Constraint violations are data, not exceptions: callers decide whether a
// non-empty report is fatal. Warnings do not make a report fail.
struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return error_count() == 0; }
  bool empty() const { return issues.empty(); }

  std::size_t error_count() const {
    std::size_t n = 0;
    for (const auto& issue : issues) {
      if (issue.severity == IssueSeverity::Error) ++n;
    }
    return n;
  }

  bool has(const std::string& code) const {
    for (const auto& issue : issues) {
      if (issue.code == code) return true;
    }
    return false;
  }

  void add_error(std::string code, std::string message) {
    issues.push_back({IssueSeverity::Error, std::move(code), std::move(message)});
  }

  void add_warning(std::string code, std::string message) {
    issues.push_back({IssueSeverity::Warning, std::move(code), std::move(message)});
  }

  void merge(const ValidationReport& other) {
    issues.insert(issues.end(), other.issues.begin(), other.issues.end());
  }

  std::string to_string() const {
    std::string out;
    for (const auto& issue : issues) {
      out += issue.severity == IssueSeverity::Error ? "error" : "warning";
      out += " [" + issue.code + "] " + issue.message + "\n";
    }
    return out;
  }
};

}  // namespace streamplace
