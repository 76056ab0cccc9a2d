#include "pedflow/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pedflow::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c == '-';
  });
}

std::optional<double> to_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  std::istringstream is(t);
  is.imbue(std::locale::classic());
  double value = 0.0;
  is >> value;
  if (is.fail() || !is.eof()) return std::nullopt;
  return value;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": expected `key = value`");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": invalid key `" + key + "`");
    }
    if (cfg.values_.count(key)) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": duplicate key `" + key + "`");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

std::optional<std::string> Config::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void Config::fail(const std::string& key, const std::string& what) const {
  throw ConfigError(origin_ + ": `" + key + "` " + what);
}

std::string Config::get_string(const std::string& key) const {
  const auto v = find(key);
  if (!v) fail(key, "is required");
  return *v;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return find(key).value_or(fallback);
}

double Config::get_double(const std::string& key) const {
  const auto v = find(key);
  if (!v) fail(key, "is required");
  const auto d = to_double(*v);
  if (!d || !std::isfinite(*d)) fail(key, "must be a finite number, got `" + *v + "`");
  return *d;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t Config::get_int(const std::string& key) const {
  const auto v = find(key);
  if (!v) fail(key, "is required");
  std::int64_t out = 0;
  const auto* first = v->data();
  const auto* last = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) fail(key, "must be an integer, got `" + *v + "`");
  return out;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_uint(const std::string& key) const {
  const auto v = find(key);
  if (!v) fail(key, "is required");
  std::uint64_t out = 0;
  const auto* first = v->data();
  const auto* last = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    fail(key, "must be a non-negative integer, got `" + *v + "`");
  }
  return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  fail(key, "must be a boolean, got `" + *v + "`");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  const auto v = find(key);
  if (!v) fail(key, "is required");
  std::vector<double> out;
  std::istringstream in(*v);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto d = to_double(item);
    if (!d || !std::isfinite(*d)) fail(key, "must be a comma-separated list of numbers");
    out.push_back(*d);
  }
  if (out.empty()) fail(key, "must not be empty");
  return out;
}

void Config::require_known(const std::set<std::string>& known) const {
  for (const auto& [key, value] : values_) {
    if (!known.count(key)) throw ConfigError(origin_ + ": unknown key `" + key + "`");
  }
}

}  // namespace pedflow::cli
