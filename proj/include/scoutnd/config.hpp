#pragma once

#include <map>
#include <string>
#include <vector>

#include "scoutnd/common.hpp"

namespace scoutnd {

// Sectioned key-value run configuration. Every key is declared in a schema;
// unknown keys are rejected at parse time so typos cannot silently fall back
// to defaults. The resolved state (defaults plus overrides) can be dumped in
// the same grammar and re-parsed to an identical configuration.
class Config {
 public:
  // All schema defaults materialized.
  static Config defaults();

  // Parses the documented grammar on top of the defaults.
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text,
                             const std::string& origin = "<string>");

  // Applies SCOUTND_<SECTION>_<KEY> environment overrides.
  void apply_env();

  // Sets one key (validated against the schema; value must parse per type).
  void set(const std::string& section, const std::string& key,
           const std::string& value);

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  std::vector<double> get_doubles(const std::string& section,
                                  const std::string& key) const;
  std::vector<int> get_ints(const std::string& section, const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& section,
                                       const std::string& key) const;

  // Full dump in the config grammar (schema order); parsing it back yields
  // an identical configuration.
  std::string resolved_dump() const;

  friend bool operator==(const Config&, const Config&) = default;

 private:
  std::map<std::string, std::string> values_;  // "section.key" -> raw value
};

std::vector<std::string> split_list(const std::string& value);

}  // namespace scoutnd
