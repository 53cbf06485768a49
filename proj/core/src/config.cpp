#include "smx/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "smx/errors.hpp"

namespace smx {

namespace {
std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}
}  // namespace

RunConfig RunConfig::parse_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw SchemaError("config line " + std::to_string(lineno) +
                                ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw SchemaError("config line " + std::to_string(lineno) +
                              ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw SchemaError("config line " + std::to_string(lineno) +
                              ": empty key");
    cfg.set(section.empty() ? key : section + "." + key, value);
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

void RunConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

bool RunConfig::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

std::string RunConfig::get_string(const std::string& key,
                                  const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw SchemaError("config: key '" + key + "' is not a number: " +
                            it->second);
  }
}

long RunConfig::get_long(const std::string& key, long fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const long v = std::stol(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw SchemaError("config: key '" + key + "' is not an integer: " +
                            it->second);
  }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw SchemaError("config: key '" + key + "' is not a boolean: " +
                          it->second);
}

void RunConfig::validate_keys(const std::vector<std::string>& allowed) const {
  for (const auto& [key, value] : entries_)
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw PreconditionError("config: unknown key '" + key + "'");
}

std::string RunConfig::to_text() const {
  // sectionless keys first, then sections in sorted order
  std::ostringstream out;
  for (const auto& [key, value] : entries_)
    if (key.find('.') == std::string::npos)
      out << key << " = " << value << '\n';
  std::string current_section;
  for (const auto& [key, value] : entries_) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) continue;
    const std::string section = key.substr(0, dot);
    if (section != current_section) {
      out << "\n[" << section << "]\n";
      current_section = section;
    }
    out << key.substr(dot + 1) << " = " << value << '\n';
  }
  return out.str();
}

}  // namespace smx
