#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace fairx {

// Minimal JSON emitter with full control over number formatting: doubles are
// rendered with 17 significant digits so matrices round-trip bit-faithfully.
class JsonWriter {
 public:
  std::string take() { return std::move(buf_); }
  const std::string& str() const { return buf_; }

  static std::string number(double v) {
    char tmp[40];
    std::snprintf(tmp, sizeof(tmp), "%.17g", v);
    return tmp;
  }

  void begin_object() { open('{'); }
  void end_object() { close('}'); }
  void begin_array() { open('['); }
  void end_array() { close(']'); }

  void key(const std::string& k) {
    comma();
    append_string(k);
    buf_ += ':';
    just_keyed_ = true;
  }

  void value(double v) { raw(number(v)); }
  void value(int v) { raw(std::to_string(v)); }
  void value(long long v) { raw(std::to_string(v)); }
  void value(unsigned long long v) { raw(std::to_string(v)); }
  void value(bool v) { raw(v ? "true" : "false"); }
  void value(const std::string& s) {
    comma();
    append_string(s);
    just_keyed_ = false;
  }
  void value(const char* s) { value(std::string(s)); }

  void value(const std::vector<double>& v) {
    begin_array();
    for (double d : v) value(d);
    end_array();
  }
  void value(const std::vector<int>& v) {
    begin_array();
    for (int d : v) value(d);
    end_array();
  }

  template <typename T>
  void kv(const std::string& k, const T& v) {
    key(k);
    value(v);
  }

 private:
  std::string buf_;
  bool need_comma_ = false;
  bool just_keyed_ = false;

  void comma() {
    if (need_comma_ && !just_keyed_) buf_ += ',';
  }

  void open(char c) {
    comma();
    buf_ += c;
    need_comma_ = false;
    just_keyed_ = false;
  }

  void close(char c) {
    buf_ += c;
    need_comma_ = true;
    just_keyed_ = false;
  }

  void raw(const std::string& s) {
    comma();
    buf_ += s;
    need_comma_ = true;
    just_keyed_ = false;
  }

  void append_string(const std::string& s) {
    buf_ += '"';
    for (char ch : s) {
      switch (ch) {
        case '"': buf_ += "\\\""; break;
        case '\\': buf_ += "\\\\"; break;
        case '\n': buf_ += "\\n"; break;
        case '\t': buf_ += "\\t"; break;
        default: buf_ += ch;
      }
    }
    buf_ += '"';
    need_comma_ = true;
  }
};

}  // namespace fairx
