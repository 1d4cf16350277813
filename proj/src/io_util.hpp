#pragma once

#include <map>
#include <string>
#include <vector>

#include "types.hpp"

namespace dsm {

/// Shortest round-trippable decimal rendering (17 significant digits).
std::string fmt17(double v);

/// Comma-joined fmt17 rendering of a vector.
std::string join17(const Vector& v);

Vector parse_vector(const std::string& csv_list);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Minimal "key = value" text format shared by config and problem files.
// '#' starts a comment; blank lines are ignored; keys may be dotted.
using KvMap = std::map<std::string, std::string>;

struct KvEntry {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<KvEntry> parse_kv_text(const std::string& text);
KvMap parse_kv_file(const std::string& path);

const std::string& kv_get(const KvMap& kv, const std::string& key);
double kv_get_double(const KvMap& kv, const std::string& key);
long long kv_get_int(const KvMap& kv, const std::string& key);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
double parse_double(const std::string& s, const std::string& what);
long long parse_int(const std::string& s, const std::string& what);

}  // namespace dsm
