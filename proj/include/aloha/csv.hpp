#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>

namespace aloha::csv {

/// Shortest decimal string that round-trips to `v`. Independent of the
/// current locale, so outputs are byte-stable.
inline std::string format(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

inline std::string format(std::optional<double> v) {
  return v ? format(*v) : std::string();
}

/// Writes comma-separated fields, one row per call to end_row().
class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}

  Writer& field(std::string_view s) {
    if (!first_) os_ << ',';
    os_ << s;
    first_ = false;
    return *this;
  }
  Writer& field(double v) { return field(format(v)); }
  Writer& field(std::optional<double> v) { return field(format(v)); }
  Writer& field(std::int64_t v) { return field(std::to_string(v)); }
  Writer& field(std::uint64_t v) { return field(std::to_string(v)); }
  Writer& field(int v) { return field(std::to_string(v)); }

  void end_row() {
    os_ << '\n';
    first_ = true;
  }

 private:
  std::ostream& os_;
  bool first_ = true;
};

}  // namespace aloha::csv
