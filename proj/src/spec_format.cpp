#include "hkreduce/spec_format.hpp"

#include "hkreduce/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hkreduce {

namespace {

const char* kind_name(SpecValue::Kind k) {
  switch (k) {
    case SpecValue::Kind::Int: return "integer";
    case SpecValue::Kind::Real: return "real";
    case SpecValue::Kind::Complex: return "complex";
    case SpecValue::Kind::String: return "string";
    case SpecValue::Kind::Bool: return "boolean";
    case SpecValue::Kind::List: return "list";
  }
  return "?";
}

[[noreturn]] void wrong_kind(const SpecValue& v, const std::string& field, const char* wanted) {
  throw SchemaError(field, v.line, std::string("expected ") + wanted + ", found " + kind_name(v.kind));
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  in >> out;
  return !in.fail() && in.peek() == std::char_traits<char>::eof();
}

bool is_integer(const std::string& s) {
  std::size_t k = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (k == s.size()) return false;
  for (; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
  return true;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  SpecDocument run() {
    SpecDocument doc;
    SpecSection* current = &doc.add_section("", 0);
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        const int line = line_;
        get();
        std::string name;
        while (!at_end() && peek() != ']' && peek() != '\n') name += get();
        if (at_end() || peek() != ']') throw SchemaError("", line, "unterminated section header");
        get();
        name = trim(name);
        if (name.empty()) throw SchemaError("", line, "empty section name");
        if (doc.section(name) != nullptr) throw SchemaError(name, line, "duplicate section");
        current = &doc.add_section(name, line);
        end_of_line();
        continue;
      }
      const int line = line_;
      std::string key;
      while (!at_end() && peek() != '=' && peek() != '\n' && peek() != '#') key += get();
      key = trim(key);
      if (at_end() || peek() != '=') throw SchemaError(key, line, "expected 'key = value'");
      get();
      if (key.empty()) throw SchemaError("", line, "empty key");
      for (char ch : key) {
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-')) {
          throw SchemaError(key, line, "invalid character in key");
        }
      }
      const std::string field = current->name.empty() ? key : current->name + "." + key;
      if (current->find(key) != nullptr) throw SchemaError(field, line, "duplicate key");
      skip_spaces();
      SpecValue v = value(field);
      current->entries.push_back({key, std::move(v)});
      end_of_line();
    }
    return doc;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char get() {
    const char ch = text_[pos_++];
    if (ch == '\n') ++line_;
    return ch;
  }

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) get();
  }

  void skip_comment() {
    while (!at_end() && peek() != '\n') get();
  }

  // Whitespace, newlines and comments, used inside lists.
  void skip_all() {
    while (!at_end()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        get();
      } else if (peek() == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  void skip_blank_lines() { skip_all(); }

  void end_of_line() {
    skip_spaces();
    if (at_end()) return;
    if (peek() == '#') skip_comment();
    if (at_end()) return;
    if (peek() != '\n') throw SchemaError("", line_, std::string("unexpected '") + peek() + "'");
    get();
  }

  SpecValue value(const std::string& field) {
    SpecValue v;
    v.line = line_;
    if (at_end() || peek() == '\n' || peek() == '#') throw SchemaError(field, line_, "missing value");
    if (peek() == '[') {
      get();
      v.kind = SpecValue::Kind::List;
      skip_all();
      if (!at_end() && peek() == ']') {
        get();
        return v;
      }
      while (true) {
        skip_all();
        v.list.push_back(value(field));
        skip_all();
        if (at_end()) throw SchemaError(field, v.line, "unterminated list");
        const char ch = get();
        if (ch == ']') break;
        if (ch != ',') throw SchemaError(field, line_, "expected ',' or ']' in list");
        skip_all();
        if (!at_end() && peek() == ']') {
          get();
          break;
        }
      }
      return v;
    }
    if (peek() == '"') {
      get();
      v.kind = SpecValue::Kind::String;
      while (true) {
        if (at_end() || peek() == '\n') throw SchemaError(field, v.line, "unterminated string");
        char ch = get();
        if (ch == '"') break;
        if (ch == '\\') {
          if (at_end()) throw SchemaError(field, v.line, "unterminated string");
          const char e = get();
          if (e == 'n') ch = '\n';
          else if (e == '"' || e == '\\') ch = e;
          else throw SchemaError(field, v.line, "unknown escape");
        }
        v.s += ch;
      }
      return v;
    }
    std::string tok;
    while (!at_end() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' && peek() != ']' &&
           peek() != '#') {
      tok += get();
    }
    scalar(tok, field, v);
    return v;
  }

  void scalar(const std::string& tok, const std::string& field, SpecValue& v) {
    if (tok == "true" || tok == "false") {
      v.kind = SpecValue::Kind::Bool;
      v.b = tok == "true";
      return;
    }
    if (is_integer(tok)) {
      v.kind = SpecValue::Kind::Int;
      try {
        v.i = std::stoll(tok);
      } catch (const std::exception&) {
        throw SchemaError(field, v.line, "integer out of range: " + tok);
      }
      v.r = static_cast<double>(v.i);
      v.c = v.r;
      return;
    }
    double x = 0.0;
    if (parse_double(tok, x)) {
      if (!std::isfinite(x)) throw SchemaError(field, v.line, "non-finite number");
      v.kind = SpecValue::Kind::Real;
      v.r = x;
      v.c = x;
      return;
    }
    if (!tok.empty() && tok.back() == 'i') {
      const std::string body = tok.substr(0, tok.size() - 1);
      // split at the last sign that is not an exponent sign or the leading sign
      std::size_t split = std::string::npos;
      for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
          split = k;
          break;
        }
      }
      const std::string re = split == std::string::npos ? "" : body.substr(0, split);
      std::string im = split == std::string::npos ? body : body.substr(split);
      if (im.empty() || im == "+") im = "1";
      if (im == "-") im = "-1";
      double a = 0.0, b = 0.0;
      if ((re.empty() || parse_double(re, a)) && parse_double(im, b) && std::isfinite(a) && std::isfinite(b)) {
        v.kind = SpecValue::Kind::Complex;
        v.c = {a, b};
        return;
      }
    }
    throw SchemaError(field, v.line, "cannot parse value '" + tok + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

long long SpecValue::as_int(const std::string& field) const {
  if (kind != Kind::Int) wrong_kind(*this, field, "integer");
  return i;
}

double SpecValue::as_real(const std::string& field) const {
  if (kind != Kind::Int && kind != Kind::Real) wrong_kind(*this, field, "real");
  return r;
}

std::complex<double> SpecValue::as_complex(const std::string& field) const {
  if (kind != Kind::Int && kind != Kind::Real && kind != Kind::Complex) wrong_kind(*this, field, "complex");
  return c;
}

const std::string& SpecValue::as_string(const std::string& field) const {
  if (kind != Kind::String) wrong_kind(*this, field, "string");
  return s;
}

bool SpecValue::as_bool(const std::string& field) const {
  if (kind != Kind::Bool) wrong_kind(*this, field, "boolean");
  return b;
}

const std::vector<SpecValue>& SpecValue::as_list(const std::string& field) const {
  if (kind != Kind::List) wrong_kind(*this, field, "list");
  return list;
}

const SpecValue* SpecSection::find(const std::string& key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e.value;
  return nullptr;
}

const SpecSection* SpecDocument::section(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

bool SpecDocument::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const SpecValue* SpecDocument::find(const std::string& section, const std::string& key) const {
  const SpecSection* s = this->section(section);
  return s == nullptr ? nullptr : s->find(key);
}

const SpecValue& SpecDocument::get(const std::string& section, const std::string& key) const {
  const SpecValue* v = find(section, key);
  if (v == nullptr) {
    const SpecSection* s = this->section(section);
    throw SchemaError(section.empty() ? key : section + "." + key, s == nullptr ? 0 : s->line, "missing field");
  }
  return *v;
}

SpecSection& SpecDocument::add_section(const std::string& name, int line) {
  sections_.push_back({name, line, {}});
  return sections_.back();
}

SpecDocument parse_spec_text(const std::string& text) { return Parser(text).run(); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IOError("cannot read " + path);
  return ss.str();
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') {
      out += '\\';
      out += ch;
    } else if (ch == '\n') {
      out += "\\n";
    } else {
      out += ch;
    }
  }
  return out + "\"";
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  // keep reals distinguishable from integers when read back
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hkreduce
