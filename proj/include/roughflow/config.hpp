#pragma once

#include <string>
#include <utility>
#include <vector>

#include "roughflow/jet.hpp"

namespace roughflow {

// Flat text config: "[section]" headers and "key = value" lines; '#' starts a comment.
// Keys are addressed as "section.key" (keys before any header have no prefix).
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const;
  std::string str(const std::string& key, const std::string& def) const;
  double num(const std::string& key, double def) const;
  long integer(const std::string& key, long def) const;
  // comma or whitespace separated numbers
  std::vector<double> list(const std::string& key, const std::vector<double>& def) const;
  Vec vec(const std::string& key, const Vec& def) const;

  void set(const std::string& key, const std::string& value);
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  const std::string* find(const std::string& key) const;
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace roughflow
