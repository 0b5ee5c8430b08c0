#pragma once

// Line-oriented JSON file helpers. Every record is a single JSON object on
// its own line. Files produced by this tool start with a header record of
// the form {"_header": {...}} carrying provenance metadata (tool version,
// config hash, seed); readers skip or validate it.

#include <cstdint>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddikit/version.hpp"

namespace ddikit::jsonl {

// Insertion-ordered JSON keeps serialized output byte-stable.
using json = nlohmann::ordered_json;

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

inline bool is_header(const json& record) {
  return record.is_object() && record.contains("_header");
}

// Builds {"_header": {"kind": ..., "tool_version": ..., <extra...>}}.
inline json header_record(const std::string& kind, const json& extra = json::object()) {
  json h;
  h["kind"] = kind;
  h["tool_version"] = kToolVersion;
  for (const auto& [key, value] : extra.items()) h[key] = value;
  json record;
  record["_header"] = h;
  return record;
}

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open for writing: " + path);
  }

  void write(const json& record) {
    out_ << record.dump() << '\n';
    if (!out_) throw IoError("write failed: " + path_);
  }

  void close() {
    out_.close();
    if (out_.fail()) throw IoError("close failed: " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

// Calls fn(line_number, record) for every line; line numbers are 1-based.
// Blank lines are skipped. Malformed JSON raises IoError naming the line.
inline void for_each(const std::string& path,
                     const std::function<void(std::size_t, const json&)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char c : line) {
      if (c != ' ' && c != '\t') {
        blank = false;
        break;
      }
    }
    if (blank) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded()) {
      throw IoError(path + ":" + std::to_string(line_no) + ": malformed JSON line");
    }
    fn(line_no, record);
  }
}

// Reads all records (header records included, in file order).
inline std::vector<json> read_all(const std::string& path) {
  std::vector<json> records;
  for_each(path, [&](std::size_t, const json& r) { records.push_back(r); });
  return records;
}

}  // namespace ddikit::jsonl
