#pragma once

// Verification reports. The structured text form uses the spec-file grammar:
//
//   [report]
//   spec_hash = "..."
//   environment = "..."
//   [check.<id>]
//   anchor = "..."
//   violation = <%.17g>
//   tol = <%.17g>
//   pass = true|false
//   runtime = <seconds>
//   note = "..."
//
// The CSV summary holds id, anchor, violation, tol and pass, without runtimes.

#include <string>
#include <vector>

namespace hkreduce {

struct CheckRecord {
  std::string id;
  std::string anchor;
  double violation = 0.0;
  double tol = 0.0;
  bool pass = false;
  double runtime = 0.0;
  std::string note;

  bool operator==(const CheckRecord&) const = default;
};

struct VerificationReport {
  std::string spec_hash;
  std::string environment;
  std::vector<CheckRecord> checks;

  bool all_pass() const;
  /// Throws InvalidArgument if the id is already present.
  void add(CheckRecord record);
  const CheckRecord* find(const std::string& id) const;
};

/// Compiler and Eigen versions.
std::string environment_stamp();

std::string emit_structured(const VerificationReport& report);
/// Throws SchemaError on malformed input.
VerificationReport parse_structured(const std::string& text);
std::string emit_csv(const VerificationReport& report);

/// Writes report.txt and summary.csv into dir, creating it. Throws IOError.
void write_report(const VerificationReport& report, const std::string& dir);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace hkreduce
