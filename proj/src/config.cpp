#include "swabsim/config.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace swabsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: expected a number at " + where + ", got '" + tok + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  // Shortest representation that round-trips a double.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::stod(buf) == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ConfigFile cfg = parse_text(ss.str(), path);
  cfg.dir_ = std::filesystem::path(path).parent_path().string();
  return cfg;
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  Section* cur = nullptr;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config: malformed section at " + where);
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ConfigError("config: empty section name at " + where);
      for (const auto& s : cfg.sections_)
        if (s.name == name) throw ConfigError("config: duplicate section [" + name + "] at " + where);
      cfg.sections_.push_back({name, {}});
      cur = &cfg.sections_.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected 'key = value' at " + where);
    if (!cur) throw ConfigError("config: key before any [section] at " + where);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key at " + where);
    for (const auto& e : cur->entries)
      if (e.key == key)
        throw ConfigError("config: duplicate key '" + key + "' in [" + cur->name + "] at " + where);
    cur->entries.push_back({key, value});
  }
  return cfg;
}

const std::string* ConfigFile::find(const std::string& section, const std::string& key) const {
  for (const auto& s : sections_)
    if (s.name == section)
      for (const auto& e : s.entries)
        if (e.key == key) return &e.value;
  return nullptr;
}

const std::string& ConfigFile::require(const std::string& section, const std::string& key) const {
  const std::string* v = find(section, key);
  if (!v) throw ConfigError("config: missing key '" + key + "' in section [" + section + "] (" + origin_ + ")");
  return *v;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

bool ConfigFile::has_section(const std::string& section) const {
  for (const auto& s : sections_)
    if (s.name == section) return true;
  return false;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
  return require(section, key);
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
  return parse_double(require(section, key), "[" + section + "]." + key);
}

long ConfigFile::get_int(const std::string& section, const std::string& key) const {
  const double v = get_double(section, key);
  const long i = static_cast<long>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("config: expected an integer at [" + section + "]." + key);
  return i;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key) const {
  const std::string v = require(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: expected a boolean at [" + section + "]." + key + ", got '" + v + "'");
}

std::vector<double> ConfigFile::get_vector(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& tok : split_ws(require(section, key)))
    out.push_back(parse_double(tok, "[" + section + "]." + key));
  return out;
}

std::vector<double> ConfigFile::get_vector(const std::string& section, const std::string& key,
                                           std::size_t expected) const {
  auto v = get_vector(section, key);
  if (v.size() != expected)
    throw ConfigError("config: [" + section + "]." + key + " must have " + std::to_string(expected) +
                      " entries, got " + std::to_string(v.size()));
  return v;
}

std::string ConfigFile::get_string_or(const std::string& s, const std::string& k,
                                      const std::string& d) const {
  const std::string* v = find(s, k);
  return v ? *v : d;
}
double ConfigFile::get_double_or(const std::string& s, const std::string& k, double d) const {
  return has(s, k) ? get_double(s, k) : d;
}
long ConfigFile::get_int_or(const std::string& s, const std::string& k, long d) const {
  return has(s, k) ? get_int(s, k) : d;
}
bool ConfigFile::get_bool_or(const std::string& s, const std::string& k, bool d) const {
  return has(s, k) ? get_bool(s, k) : d;
}
std::vector<double> ConfigFile::get_vector_or(const std::string& s, const std::string& k,
                                              const std::vector<double>& d) const {
  return has(s, k) ? get_vector(s, k) : d;
}

void ConfigFile::set(const std::string& section, const std::string& key, const std::string& value) {
  for (auto& s : sections_) {
    if (s.name != section) continue;
    for (auto& e : s.entries)
      if (e.key == key) {
        e.value = value;
        return;
      }
    s.entries.push_back({key, value});
    return;
  }
  sections_.push_back({section, {{key, value}}});
}

void ConfigFile::set(const std::string& section, const std::string& key, double value) {
  set(section, key, format_double(value));
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::vector<double>& value) {
  std::string joined;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (i) joined += ' ';
    joined += format_double(value[i]);
  }
  set(section, key, joined);
}

void ConfigFile::reject_unknown(const std::map<std::string, std::set<std::string>>& allowed) const {
  for (const auto& s : sections_) {
    const auto it = allowed.find(s.name);
    if (it == allowed.end())
      throw ConfigError("config: unknown section [" + s.name + "] (" + origin_ + ")");
    for (const auto& e : s.entries)
      if (!it->second.count(e.key))
        throw ConfigError("config: unknown key '" + e.key + "' in [" + s.name + "] (" + origin_ + ")");
  }
}

std::vector<std::string> ConfigFile::section_names() const {
  std::vector<std::string> out;
  for (const auto& s : sections_) out.push_back(s.name);
  return out;
}

std::vector<std::string> ConfigFile::keys(const std::string& section) const {
  std::vector<std::string> out;
  for (const auto& s : sections_)
    if (s.name == section)
      for (const auto& e : s.entries) out.push_back(e.key);
  return out;
}

std::string ConfigFile::dump() const {
  std::string out;
  for (const auto& s : sections_) {
    out += "[" + s.name + "]\n";
    for (const auto& e : s.entries) out += e.key + " = " + e.value + "\n";
    out += "\n";
  }
  return out;
}

void ConfigFile::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("config: cannot write '" + path + "'");
  out << dump();
}

std::string ConfigFile::resolve_path(const std::string& p) const {
  std::filesystem::path fp(p);
  if (fp.is_absolute() || dir_.empty()) return p;
  return (std::filesystem::path(dir_) / fp).string();
}

}  // namespace swabsim
