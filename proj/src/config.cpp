#include "scoutnd/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace scoutnd {

namespace {

enum class KeyType { kString, kDouble, kInt, kU64, kBool, kDoubleList, kIntList, kStringList };

struct KeySpec {
  const char* section;
  const char* key;
  KeyType type;
  const char* default_value;
};

// One row per configuration key. Defaults here are the library defaults;
// anything not listed is an unknown key.
const KeySpec kSchema[] = {
    {"meta", "version", KeyType::kInt, "1"},

    {"problem", "kind", KeyType::kString, "sphere"},
    {"problem", "dim", KeyType::kInt, "2"},
    {"problem", "case", KeyType::kInt, "1"},
    {"problem", "noise_std", KeyType::kDouble, "0.31622776601683794"},
    {"problem", "lf_scale", KeyType::kDouble, "1.05"},
    {"problem", "lf_cost_weight", KeyType::kDouble, "0.1"},

    {"external", "command1", KeyType::kString, ""},
    {"external", "command2", KeyType::kString, ""},
    {"external", "command3", KeyType::kString, ""},
    {"external", "command4", KeyType::kString, ""},
    {"external", "constraints", KeyType::kInt, "0"},
    {"external", "noise_dim", KeyType::kInt, "0"},
    {"external", "noise_std", KeyType::kDouble, "0"},
    {"external", "costs", KeyType::kDoubleList, "1"},
    {"external", "timeout_ms", KeyType::kInt, "10000"},
    {"external", "retries", KeyType::kInt, "2"},

    {"init", "mu0", KeyType::kDoubleList, "1"},
    {"init", "sigma0", KeyType::kDouble, "1"},

    {"run", "estimator", KeyType::kString, "baseline_qmc"},
    {"run", "samples_per_level", KeyType::kIntList, "50"},
    {"run", "seed", KeyType::kU64, "0"},
    {"run", "workers", KeyType::kInt, "0"},
    {"run", "eps_theta", KeyType::kDouble, "0.0001"},
    {"run", "eps_sigma", KeyType::kDouble, "0"},
    {"run", "max_inner_steps", KeyType::kInt, "500"},
    {"run", "max_outer_rounds", KeyType::kInt, "8"},
    {"run", "max_total_evals", KeyType::kU64, "0"},
    {"run", "max_hf_cost", KeyType::kDouble, "0"},
    {"run", "checkpoint", KeyType::kString, ""},
    {"run", "checkpoint_every", KeyType::kInt, "0"},
    {"run", "resume", KeyType::kString, ""},

    {"adam", "lr_mu", KeyType::kDouble, "0.005"},
    {"adam", "lr_log_sigma", KeyType::kDouble, "0.02"},
    {"adam", "beta1", KeyType::kDouble, "0.9"},
    {"adam", "beta2", KeyType::kDouble, "0.999"},
    {"adam", "eps", KeyType::kDouble, "1e-08"},

    {"penalty", "lambda0", KeyType::kDoubleList, "1"},
    {"penalty", "ratio", KeyType::kDouble, "10"},
    {"penalty", "rounds", KeyType::kInt, "4"},

    {"bench", "dims", KeyType::kIntList, "2,4,8,16,32"},
    {"bench", "cases", KeyType::kIntList, "1,2"},
    {"bench", "seeds", KeyType::kInt, "5"},
    {"bench", "seed0", KeyType::kU64, "1"},
    {"bench", "methods", KeyType::kStringList, "scout-nd,mf-scout-nd"},
    {"bench", "mf_samples", KeyType::kIntList, "50,10"},
    {"bench", "eps_f", KeyType::kDouble, "0.1"},
    {"bench", "budget_hf_cost", KeyType::kDouble, "50000"},

    {"profile", "manifest", KeyType::kString, ""},
    {"profile", "metric", KeyType::kString, "hf_cost"},
    {"profile", "alpha_max", KeyType::kDouble, "0"},
    {"profile", "alpha_points", KeyType::kInt, "256"},

    {"variance", "dims", KeyType::kIntList, "2,4,8,16,32"},
    {"variance", "repetitions", KeyType::kInt, "10"},
    {"variance", "samples", KeyType::kInt, "128"},
    {"variance", "seed", KeyType::kU64, "0"},
};

const KeySpec* find_spec(const std::string& section, const std::string& key) {
  for (const KeySpec& spec : kSchema) {
    if (section == spec.section && key == spec.key) return &spec;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void validate_value(const KeySpec& spec, const std::string& value) {
  auto path = std::string(spec.section) + "." + spec.key;
  auto check_scalar = [&](const std::string& v, KeyType t) {
    bool ok = true;
    switch (t) {
      case KeyType::kDouble:
        parse_double(v, &ok);
        break;
      case KeyType::kInt: {
        double d = parse_double(v, &ok);
        if (ok && d != std::floor(d)) ok = false;
        break;
      }
      case KeyType::kU64: {
        std::uint64_t value = 0;
        auto res = std::from_chars(v.data(), v.data() + v.size(), value);
        ok = res.ec == std::errc() && res.ptr == v.data() + v.size();
        break;
      }
      case KeyType::kBool:
        ok = v == "true" || v == "false" || v == "0" || v == "1";
        break;
      default:
        break;
    }
    if (!ok) {
      throw ConfigError("bad value '" + v + "' for key " + path);
    }
  };
  switch (spec.type) {
    case KeyType::kString:
    case KeyType::kStringList:
      return;
    case KeyType::kDoubleList:
    case KeyType::kIntList: {
      auto items = split_list(value);
      if (items.empty()) throw ConfigError("empty list for key " + path);
      KeyType elem = spec.type == KeyType::kDoubleList ? KeyType::kDouble : KeyType::kInt;
      for (const auto& item : items) check_scalar(item, elem);
      return;
    }
    default:
      check_scalar(value, spec.type);
  }
}

}  // namespace

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string cur;
  for (char ch : value) {
    if (ch == ',') {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  std::string last = trim(cur);
  if (!last.empty() || !items.empty()) items.push_back(last);
  for (const auto& item : items) {
    if (item.empty()) throw ConfigError("empty element in list '" + value + "'");
  }
  return items;
}

Config Config::defaults() {
  Config config;
  for (const KeySpec& spec : kSchema) {
    config.values_[std::string(spec.section) + "." + spec.key] = spec.default_value;
  }
  return config;
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config config = defaults();
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(line_no) +
                          ": unterminated section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
      }
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected 'key = value', got '" + t + "'");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": key '" + key +
                        "' outside any [section]");
    }
    try {
      config.set(section, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_string(text.str(), path);
}

void Config::apply_env() {
  for (const KeySpec& spec : kSchema) {
    std::string name = "SCOUTND_" + std::string(spec.section) + "_" + spec.key;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (const char* value = std::getenv(name.c_str())) {
      set(spec.section, spec.key, value);
    }
  }
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
  const KeySpec* spec = find_spec(section, key);
  if (!spec) {
    throw ConfigError("unknown key '" + section + "." + key + "'");
  }
  validate_value(*spec, value);
  values_[section + "." + key] = value;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return values_.count(section + "." + key) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  auto it = values_.find(section + "." + key);
  if (it == values_.end()) {
    throw ConfigError("missing required key '" + section + "." + key + "'");
  }
  return it->second;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  return parse_double(get_string(section, key));
}

int Config::get_int(const std::string& section, const std::string& key) const {
  return static_cast<int>(get_double(section, key));
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key) const {
  std::string v = get_string(section, key);
  std::uint64_t value = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), value);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("bad unsigned value '" + v + "' for key " + section + "." + key);
  }
  return value;
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
  std::string v = get_string(section, key);
  return v == "true" || v == "1";
}

std::vector<double> Config::get_doubles(const std::string& section,
                                        const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get_string(section, key))) {
    out.push_back(parse_double(item));
  }
  return out;
}

std::vector<int> Config::get_ints(const std::string& section,
                                  const std::string& key) const {
  std::vector<int> out;
  for (const auto& item : split_list(get_string(section, key))) {
    out.push_back(static_cast<int>(parse_double(item)));
  }
  return out;
}

std::vector<std::string> Config::get_strings(const std::string& section,
                                             const std::string& key) const {
  return split_list(get_string(section, key));
}

std::string Config::resolved_dump() const {
  std::ostringstream out;
  out << "# resolved scoutnd configuration (all keys explicit)\n";
  std::string current_section;
  for (const KeySpec& spec : kSchema) {
    if (current_section != spec.section) {
      current_section = spec.section;
      out << "\n[" << current_section << "]\n";
    }
    auto it = values_.find(std::string(spec.section) + "." + spec.key);
    out << spec.key << " = " << (it == values_.end() ? "" : it->second) << '\n';
  }
  return out.str();
}

}  // namespace scoutnd
