#include "roughflow/config.hpp"

#include <fstream>
#include <sstream>

#include "roughflow/errors.hpp"

namespace roughflow {

namespace {
std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw ArgumentError("config key '" + key + "' expects a number, got '" + v + "'");
}
}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ArgumentError("config line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ArgumentError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ArgumentError("config line " + std::to_string(lineno) + ": empty key");
    c.set(section.empty() ? key : section + "." + key, trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ArgumentError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

const std::string* Config::find(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

bool Config::has(const std::string& key) const { return find(key) != nullptr; }

void Config::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = value;
      return;
    }
  entries_.emplace_back(key, value);
}

std::string Config::str(const std::string& key, const std::string& def) const {
  const std::string* v = find(key);
  return v ? *v : def;
}

double Config::num(const std::string& key, double def) const {
  const std::string* v = find(key);
  return v ? to_double(key, *v) : def;
}

long Config::integer(const std::string& key, long def) const {
  const std::string* v = find(key);
  if (!v) return def;
  const double x = to_double(key, *v);
  if (x != static_cast<double>(static_cast<long>(x)))
    throw ArgumentError("config key '" + key + "' expects an integer, got '" + *v + "'");
  return static_cast<long>(x);
}

std::vector<double> Config::list(const std::string& key, const std::vector<double>& def) const {
  const std::string* v = find(key);
  if (!v) return def;
  std::string s = *v;
  for (char& ch : s)
    if (ch == ',') ch = ' ';
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_double(key, tok));
  return out;
}

Vec Config::vec(const std::string& key, const Vec& def) const {
  if (!has(key)) return def;
  const auto l = list(key, {});
  Vec v(static_cast<int>(l.size()));
  for (size_t i = 0; i < l.size(); ++i) v(static_cast<int>(i)) = l[i];
  return v;
}

}  // namespace roughflow
