#include "roomforge/json_writer.hpp"

#include <cmath>
#include <cstdio>

namespace roomforge {

void JsonWriter::comma() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!first_stack_.empty()) {
    if (!first_stack_.back()) out_ += ',';
    first_stack_.back() = false;
    newline();
  }
}

void JsonWriter::newline() {
  if (!pretty_) return;
  out_ += '\n';
  out_.append(2 * first_stack_.size(), ' ');
}

void JsonWriter::begin_object() {
  comma();
  out_ += '{';
  first_stack_.push_back(true);
}

void JsonWriter::end_object() {
  const bool empty = first_stack_.back();
  first_stack_.pop_back();
  if (!empty) newline();
  out_ += '}';
}

void JsonWriter::begin_array() {
  comma();
  out_ += '[';
  first_stack_.push_back(true);
}

void JsonWriter::end_array() {
  const bool empty = first_stack_.back();
  first_stack_.pop_back();
  if (!empty) newline();
  out_ += ']';
}

void JsonWriter::key(const std::string& k) {
  comma();
  out_ += '"';
  out_ += escape(k);
  out_ += pretty_ ? "\": " : "\":";
  pending_key_ = true;
}

void JsonWriter::value(const std::string& v) {
  comma();
  out_ += '"';
  out_ += escape(v);
  out_ += '"';
}

void JsonWriter::value(const char* v) { value(std::string(v)); }

void JsonWriter::value(double v, int decimals) {
  comma();
  if (!std::isfinite(v)) {
    out_ += "null";
    return;
  }
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  out_ += buf;
}

void JsonWriter::value_int(std::int64_t v) {
  comma();
  out_ += std::to_string(v);
}

void JsonWriter::value_uint(std::uint64_t v) {
  comma();
  out_ += std::to_string(v);
}

void JsonWriter::value(bool v) {
  comma();
  out_ += v ? "true" : "false";
}

void JsonWriter::raw(const std::string& json_text) {
  comma();
  out_ += json_text;
}

std::string JsonWriter::escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace roomforge
