#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace roomforge {

// deterministic JSON emitter: fixed field order is the caller's, floats are
// printed with a fixed number of decimals so equal values give equal bytes
class JsonWriter {
 public:
  explicit JsonWriter(bool pretty = false) : pretty_(pretty) {}

  void begin_object();
  void end_object();
  void begin_array();
  void end_array();
  void key(const std::string& k);
  void value(const std::string& v);
  void value(const char* v);
  void value(double v, int decimals = 6);
  void value_int(std::int64_t v);
  void value_uint(std::uint64_t v);
  void value(bool v);
  // splices pre-serialized JSON into a value position verbatim
  void raw(const std::string& json_text);

  [[nodiscard]] const std::string& str() const { return out_; }

  static std::string escape(const std::string& s);

 private:
  void comma();
  void newline();
  std::string out_;
  std::vector<bool> first_stack_{};
  bool pretty_ = false;
  bool pending_key_ = false;
};

}  // namespace roomforge
