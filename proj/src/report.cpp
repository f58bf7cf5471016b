#include "hkreduce/report.hpp"

#include "hkreduce/errors.hpp"
#include "hkreduce/spec_format.hpp"

#include <Eigen/Core>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace hkreduce {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

double read_number(const SpecValue& v, const std::string& field) {
  if (v.kind == SpecValue::Kind::String) {
    if (v.s == "inf") return std::numeric_limits<double>::infinity();
    if (v.s == "-inf") return -std::numeric_limits<double>::infinity();
    if (v.s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  return v.as_real(field);
}

std::string emit_number(double x) {
  // non-finite values are not numbers in the grammar
  return std::isfinite(x) ? format_real(x) : quote(format_real(x));
}

}  // namespace

bool VerificationReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void VerificationReport::add(CheckRecord record) {
  if (find(record.id) != nullptr) throw InvalidArgument("duplicate check id " + record.id);
  checks.push_back(std::move(record));
}

const CheckRecord* VerificationReport::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

std::string environment_stamp() {
  std::ostringstream s;
#if defined(__clang__)
  s << "clang " << __clang_major__ << "." << __clang_minor__ << "." << __clang_patchlevel__;
#elif defined(__GNUC__)
  s << "gcc " << __GNUC__ << "." << __GNUC_MINOR__ << "." << __GNUC_PATCHLEVEL__;
#else
  s << "unknown compiler";
#endif
  s << "; eigen " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION;
  s << "; c++ " << __cplusplus;
  return s.str();
}

std::string emit_structured(const VerificationReport& report) {
  std::ostringstream s;
  s << "[report]\n";
  s << "spec_hash = " << quote(report.spec_hash) << "\n";
  s << "environment = " << quote(report.environment) << "\n";
  for (const auto& c : report.checks) {
    s << "\n[check." << c.id << "]\n";
    s << "anchor = " << quote(c.anchor) << "\n";
    s << "violation = " << emit_number(c.violation) << "\n";
    s << "tol = " << emit_number(c.tol) << "\n";
    s << "pass = " << (c.pass ? "true" : "false") << "\n";
    s << "runtime = " << emit_number(c.runtime) << "\n";
    s << "note = " << quote(c.note) << "\n";
  }
  return s.str();
}

VerificationReport parse_structured(const std::string& text) {
  const SpecDocument doc = parse_spec_text(text);
  VerificationReport out;
  out.spec_hash = doc.get("report", "spec_hash").as_string("report.spec_hash");
  out.environment = doc.get("report", "environment").as_string("report.environment");
  for (const auto& sec : doc.sections()) {
    if (sec.name.empty()) {
      if (!sec.entries.empty()) throw SchemaError(sec.entries.front().key, 0, "field outside a section");
      continue;
    }
    if (sec.name == "report") continue;
    if (sec.name.rfind("check.", 0) != 0) throw SchemaError(sec.name, sec.line, "unknown section");
    const std::string f = sec.name + ".";
    CheckRecord c;
    c.id = sec.name.substr(6);
    c.anchor = doc.get(sec.name, "anchor").as_string(f + "anchor");
    c.violation = read_number(doc.get(sec.name, "violation"), f + "violation");
    c.tol = read_number(doc.get(sec.name, "tol"), f + "tol");
    c.pass = doc.get(sec.name, "pass").as_bool(f + "pass");
    c.runtime = read_number(doc.get(sec.name, "runtime"), f + "runtime");
    c.note = doc.get(sec.name, "note").as_string(f + "note");
    out.add(std::move(c));
  }
  return out;
}

std::string emit_csv(const VerificationReport& report) {
  std::ostringstream s;
  s << "id,anchor,violation,tol,pass\n";
  for (const auto& c : report.checks) {
    s << csv_field(c.id) << "," << csv_field(c.anchor) << "," << format_real(c.violation) << ","
      << format_real(c.tol) << "," << (c.pass ? "true" : "false") << "\n";
  }
  return s.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError("cannot write " + path);
  out << contents;
  if (!out) throw IOError("cannot write " + path);
}

void write_report(const VerificationReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IOError("cannot create " + dir + ": " + ec.message());
  write_text_file((std::filesystem::path(dir) / "report.txt").string(), emit_structured(report));
  write_text_file((std::filesystem::path(dir) / "summary.csv").string(), emit_csv(report));
}

}  // namespace hkreduce
