#pragma once
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "viewdrift/errors.hpp"

namespace viewdrift::kv {

// Doubles are printed with 17 significant digits so that write -> read
// round-trips bit-exactly through strtod.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin) throw InvalidInput("kv: not a number: " + s);
  return v;
}

// Line-oriented key/value document: "key token token ...". Keys may repeat
// (e.g. one line per frame); '#' starts a comment line. Order is preserved.
struct Doc {
  std::vector<std::pair<std::string, std::vector<std::string>>> lines;

  void add(const std::string& key, std::vector<std::string> toks) {
    lines.emplace_back(key, std::move(toks));
  }
  void add(const std::string& key, const std::string& tok) { add(key, std::vector<std::string>{tok}); }
  void add_num(const std::string& key, double v) { add(key, fmt(v)); }
  void add_nums(const std::string& key, const std::vector<double>& vs) {
    std::vector<std::string> toks;
    toks.reserve(vs.size());
    for (double v : vs) toks.push_back(fmt(v));
    add(key, std::move(toks));
  }

  const std::vector<std::string>* find(const std::string& key) const {
    for (const auto& [k, toks] : lines)
      if (k == key) return &toks;
    return nullptr;
  }

  const std::vector<std::string>& require(const std::string& key) const {
    const auto* toks = find(key);
    if (!toks) throw InvalidInput("kv: missing key: " + key);
    return *toks;
  }

  std::vector<const std::vector<std::string>*> all(const std::string& key) const {
    std::vector<const std::vector<std::string>*> out;
    for (const auto& [k, toks] : lines)
      if (k == key) out.push_back(&toks);
    return out;
  }

  bool has(const std::string& key) const { return find(key) != nullptr; }

  double num(const std::string& key) const {
    const auto& toks = require(key);
    if (toks.size() != 1) throw InvalidInput("kv: expected one value for " + key);
    return parse_double(toks[0]);
  }
  double num_or(const std::string& key, double fallback) const {
    return has(key) ? num(key) : fallback;
  }
  std::string str(const std::string& key) const {
    const auto& toks = require(key);
    if (toks.size() != 1) throw InvalidInput("kv: expected one value for " + key);
    return toks[0];
  }
  std::string str_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? str(key) : fallback;
  }

  std::string serialize() const {
    std::ostringstream os;
    for (const auto& [k, toks] : lines) {
      os << k;
      for (const auto& t : toks) os << ' ' << t;
      os << '\n';
    }
    return os.str();
  }
};

inline Doc parse(std::istream& in) {
  Doc doc;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key.empty()) continue;
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    doc.add(key, std::move(toks));
  }
  return doc;
}

inline Doc read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("kv: cannot open " + path);
  return parse(in);
}

inline void write_file(const std::string& path, const Doc& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("kv: cannot write " + path);
  out << doc.serialize();
}

}  // namespace viewdrift::kv
