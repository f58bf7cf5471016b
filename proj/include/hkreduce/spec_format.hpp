#pragma once

// Line-oriented spec files:
//
//   # comment
//   [section]            section names may contain dots
//   key = value
//
// Values are integers (12), reals (1e-4, 0.5), complex numbers (1+2i, -0.5i,
// i), double-quoted strings with \" \\ \n escapes, booleans (true, false) and
// bracketed lists of values, which may nest and span lines. Keys outside any
// section belong to the section "". Repeated sections or keys are errors.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace hkreduce {

struct SpecValue {
  enum class Kind { Int, Real, Complex, String, Bool, List };

  Kind kind = Kind::Int;
  long long i = 0;
  double r = 0.0;
  std::complex<double> c;
  std::string s;
  bool b = false;
  std::vector<SpecValue> list;
  int line = 0;

  // Accessors widen Int -> Real -> Complex and throw SchemaError naming `field`.
  long long as_int(const std::string& field) const;
  double as_real(const std::string& field) const;
  std::complex<double> as_complex(const std::string& field) const;
  const std::string& as_string(const std::string& field) const;
  bool as_bool(const std::string& field) const;
  const std::vector<SpecValue>& as_list(const std::string& field) const;
};

struct SpecEntry {
  std::string key;
  SpecValue value;
};

struct SpecSection {
  std::string name;
  int line = 0;
  std::vector<SpecEntry> entries;

  const SpecValue* find(const std::string& key) const;
};

class SpecDocument {
 public:
  const std::vector<SpecSection>& sections() const { return sections_; }
  const SpecSection* section(const std::string& name) const;
  bool has(const std::string& section, const std::string& key) const;
  /// Throws SchemaError("section.key") when absent.
  const SpecValue& get(const std::string& section, const std::string& key) const;
  const SpecValue* find(const std::string& section, const std::string& key) const;

  SpecSection& add_section(const std::string& name, int line);

 private:
  std::vector<SpecSection> sections_;
};

/// Throws SchemaError with the offending line.
SpecDocument parse_spec_text(const std::string& text);
/// Throws IOError when the file cannot be read.
std::string read_text_file(const std::string& path);

/// Quoted, escaped form of a string.
std::string quote(const std::string& s);
/// %.17g.
std::string format_real(double x);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace hkreduce
