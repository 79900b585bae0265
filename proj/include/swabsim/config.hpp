#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace swabsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sectioned key-value configuration text:
///
///   # comment
///   [section]
///   key = value          (scalar, string, or whitespace-separated list)
///
/// Order of sections and keys is preserved so a dump is stable.
class ConfigFile {
 public:
  ConfigFile() = default;

  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_text(const std::string& text, const std::string& origin = "<text>");

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  long get_int(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  std::vector<double> get_vector(const std::string& section, const std::string& key) const;
  std::vector<double> get_vector(const std::string& section, const std::string& key,
                                 std::size_t expected) const;

  // Defaulted variants.
  std::string get_string_or(const std::string& s, const std::string& k, const std::string& d) const;
  double get_double_or(const std::string& s, const std::string& k, double d) const;
  long get_int_or(const std::string& s, const std::string& k, long d) const;
  bool get_bool_or(const std::string& s, const std::string& k, bool d) const;
  std::vector<double> get_vector_or(const std::string& s, const std::string& k,
                                    const std::vector<double>& d) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  void set(const std::string& section, const std::string& key, double value);
  void set(const std::string& section, const std::string& key, const std::vector<double>& value);

  /// Every (section, key) must appear in `allowed`, where allowed maps a
  /// section name to its key set. Throws ConfigError naming the offender.
  void reject_unknown(const std::map<std::string, std::set<std::string>>& allowed) const;

  std::vector<std::string> section_names() const;
  std::vector<std::string> keys(const std::string& section) const;

  std::string dump() const;
  void write_file(const std::string& path) const;

  /// Directory of the file this config was parsed from ("" for text).
  const std::string& directory() const { return dir_; }
  /// Resolve a possibly relative path against this config's directory.
  std::string resolve_path(const std::string& p) const;

 private:
  struct Entry {
    std::string key;
    std::string value;
  };
  struct Section {
    std::string name;
    std::vector<Entry> entries;
  };

  const std::string* find(const std::string& section, const std::string& key) const;
  const std::string& require(const std::string& section, const std::string& key) const;

  std::vector<Section> sections_;
  std::string origin_;
  std::string dir_;
};

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace swabsim
