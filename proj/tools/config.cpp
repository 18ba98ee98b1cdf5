#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cahnlab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw ConfigError(where + ": expected a number, got '" + text + "'");
  return v;
}

}  // namespace

Config Config::defaults() {
  Config c;
  const std::pair<const char*, const char*> table[] = {
      {"mesh.family", "icosphere"},
      {"mesh.subdivisions", "4"},
      {"mesh.axes", "1,1,1.3"},
      {"mesh.major_radius", "2"},
      {"mesh.minor_radius", "0.7"},
      {"mesh.nu", "48"},
      {"mesh.nv", "24"},
      {"mesh.path", ""},
      {"mesh.inj_estimate", ""},
      {"mesh.genus", ""},
      {"potential.kind", "quartic"},
      {"potential.coefficients", ""},
      {"potential.growth", ""},
      {"potential.tail", ""},
      {"potential.delta", "0.5"},
      {"epsilon", "0.05"},
      {"volume", "0.4"},
      {"distance.method", "fast_marching"},
      {"profile.samples", "2048"},
      {"profile.offset_exponent", "1.5"},
      {"profile.alpha", "0"},
      {"profile.beta", "1"},
      {"photograph.base_points", "0"},
      {"photograph.margin", "0"},
      {"flow.init", "photograph"},
      {"flow.base_point", "0"},
      {"flow.tau0", "0.01"},
      {"flow.tau_max", "1"},
      {"flow.max_steps", "20000"},
      {"flow.tol_grad", "0"},
      {"flow.backtrack", "0.5"},
      {"flow.grow", "1.2"},
      {"flow.grow_after", "5"},
      {"flow.cg_tolerance", "1e-10"},
      {"flow.newton", "true"},
      {"flow.trajectory_every", "0"},
      {"flow.truncate", "false"},
      {"truncation.lambda_star", "10"},
      {"truncation.t1", "2"},
      {"morse.k", "8"},
      {"seeds.kind", "farthest_point"},
      {"seeds.count", "30"},
      {"seeds.list", ""},
      {"sweep.delta_margin", "0"},
      {"sweep.relative_l2", "0.05"},
      {"sweep.relative_energy", "0.02"},
      {"audit.base_points", "20"},
      {"audit.rng_seed", "7"},
  };
  for (const auto& [k, v] : table) c.entries_[k] = {v, "default"};
  return c;
}

void Config::set(const std::string& key, const std::string& value, const std::string& origin) {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(origin + ": unknown key '" + key + "'");
  it->second = {value, origin};
}

void Config::load_text(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = name + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!section.empty()) key = section + "." + key;
    set(key, trim(line.substr(eq + 1)), where);
  }
}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::stringstream buf;
  buf << in.rdbuf();
  load_text(buf.str(), path);
}

void Config::apply_environment(const std::string& prefix) {
  for (auto& [key, entry] : entries_) {
    std::string name = prefix + key;
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) {
      return ch == '.' ? '_' : static_cast<char>(std::toupper(ch));
    });
    if (const char* v = std::getenv(name.c_str())) entry = {v, "env:" + name};
  }
}

const std::string& Config::raw(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second.value;
}

std::string Config::origin(const std::string& key) const { return entries_.at(key).origin; }

double Config::number(const std::string& key) const { return parse_number(raw(key), origin(key) + ": " + key); }

int Config::integer(const std::string& key) const {
  const double v = number(key);
  if (v != static_cast<double>(static_cast<int>(v))) {
    throw ConfigError(origin(key) + ": " + key + ": expected an integer, got '" + raw(key) + "'");
  }
  return static_cast<int>(v);
}

bool Config::boolean(const std::string& key) const {
  const std::string& v = raw(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(origin(key) + ": " + key + ": expected true/false, got '" + v + "'");
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(raw(key))) out.push_back(parse_number(item, origin(key) + ": " + key));
  return out;
}

std::vector<int> Config::integers(const std::string& key) const {
  std::vector<int> out;
  for (double v : numbers(key)) {
    if (v != static_cast<double>(static_cast<int>(v))) {
      throw ConfigError(origin(key) + ": " + key + ": expected integers");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::string> header_lines(const Config& cfg) {
  std::vector<std::string> out;
  for (const auto& [k, e] : cfg.entries()) out.push_back(k + " = " + e.value);
  return out;
}

}  // namespace cahnlab::cli
