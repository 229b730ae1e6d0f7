#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dcqr {

/// Malformed or inconsistent configuration (unknown keys, bad values, failed validation).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failures: missing inputs, unwritable outputs.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline double parse_double(std::string_view text, std::string_view what) {
  const auto t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("invalid number for " + std::string(what) + ": '" + std::string(t) + "'");
  }
  return value;
}

inline long parse_int(std::string_view text, std::string_view what) {
  const auto t = trim(text);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("invalid integer for " + std::string(what) + ": '" + std::string(t) + "'");
  }
  return value;
}

inline bool parse_switch(std::string_view text, std::string_view what) {
  const auto t = trim(text);
  if (t == "on" || t == "true" || t == "yes" || t == "1") return true;
  if (t == "off" || t == "false" || t == "no" || t == "0") return false;
  throw ConfigError("expected on|off for " + std::string(what) + ": '" + std::string(t) + "'");
}

}  // namespace detail

/// Plain-text `key = value` file. `#` starts a comment; keys may repeat.
class KeyValueFile {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };

  static KeyValueFile parse(std::istream& in, std::string source = "<stream>") {
    KeyValueFile file;
    file.source_ = std::move(source);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string_view line = raw;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError(file.source_ + ":" + std::to_string(line_no) + ": expected 'key = value'");
      }
      Entry e{std::string(detail::trim(line.substr(0, eq))),
              std::string(detail::trim(line.substr(eq + 1))), line_no};
      if (e.key.empty()) {
        throw ConfigError(file.source_ + ":" + std::to_string(line_no) + ": empty key");
      }
      file.entries_.push_back(std::move(e));
    }
    return file;
  }

  static KeyValueFile load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    auto file = parse(in, path.string());
    file.dir_ = path.parent_path();
    return file;
  }

  const std::vector<Entry>& entries() const { return entries_; }
  const std::string& source() const { return source_; }
  /// Directory of the file on disk; relative paths inside it resolve against this.
  const std::filesystem::path& directory() const { return dir_; }

  std::string where(const Entry& e) const { return source_ + ":" + std::to_string(e.line); }

 private:
  std::vector<Entry> entries_;
  std::string source_;
  std::filesystem::path dir_;
};

}  // namespace dcqr
