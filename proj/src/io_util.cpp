#include "io_util.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dsm {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join17(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt17(v[i]);
  }
  return out;
}

Vector parse_vector(const std::string& csv_list) {
  const auto parts = split(csv_list, ',');
  Vector v(static_cast<Eigen::Index>(parts.size()));
  for (size_t i = 0; i < parts.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = parse_double(parts[i], "vector entry");
  return v;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io, "cannot open '" + path + "' for writing");
  out << content;
  require(out.good(), ErrorCode::io, "failed writing '" + path + "'");
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    require(trim(s.substr(pos)).empty(), ErrorCode::parse,
            what + ": trailing characters in '" + s + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorCode::parse, what + ": cannot parse '" + s + "' as a number");
  }
}

long long parse_int(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    long long v = std::stoll(s, &pos);
    require(trim(s.substr(pos)).empty(), ErrorCode::parse,
            what + ": trailing characters in '" + s + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorCode::parse, what + ": cannot parse '" + s + "' as an integer");
  }
}

std::vector<KvEntry> parse_kv_text(const std::string& text) {
  std::vector<KvEntry> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::parse,
            "line " + std::to_string(lineno) + ": expected 'key = value'");
    KvEntry e;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = lineno;
    require(!e.key.empty(), ErrorCode::parse,
            "line " + std::to_string(lineno) + ": empty key");
    entries.push_back(std::move(e));
  }
  return entries;
}

KvMap parse_kv_file(const std::string& path) {
  KvMap kv;
  for (const auto& e : parse_kv_text(read_text_file(path))) kv[e.key] = e.value;
  return kv;
}

const std::string& kv_get(const KvMap& kv, const std::string& key) {
  auto it = kv.find(key);
  require(it != kv.end(), ErrorCode::parse, "missing key '" + key + "'");
  return it->second;
}

double kv_get_double(const KvMap& kv, const std::string& key) {
  return parse_double(kv_get(kv, key), key);
}

long long kv_get_int(const KvMap& kv, const std::string& key) {
  return parse_int(kv_get(kv, key), key);
}

}  // namespace dsm
