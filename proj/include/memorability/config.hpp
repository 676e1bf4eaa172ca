/*
 * Copyright 2026 The memorability authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// A small reader for the TOML subset used by manifests, experiment configs
// and synthetic fixture specs:
//
//   # comment
//   key = "string" | 42 | 1.5 | true | ["a", "b"] | [1, 2]
//   [table]            [table.sub]           [[array_of_tables]]
//
// Inline tables, multi-line arrays and multi-line strings are not supported.

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "memorability/csv.hpp"
#include "memorability/error.hpp"

namespace memorability::config {

struct Table;

struct Value {
  enum class Kind { kString, kInteger, kFloat, kBool, kArray, kTable, kTableArray };
  Kind kind = Kind::kString;
  std::string str;
  std::int64_t integer = 0;
  double real = 0.0;
  bool boolean = false;
  std::vector<Value> array;
  std::shared_ptr<Table> table;
  std::vector<std::shared_ptr<Table>> tables;
};

struct Table {
  std::map<std::string, Value> entries;
  std::string name;  // dotted path, for error messages

  bool has(const std::string& key) const { return entries.count(key) != 0; }

  const Value& at(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) throw DataError("missing key '" + qualified(key) + "'");
    return it->second;
  }

  std::string qualified(const std::string& key) const {
    return name.empty() ? key : name + "." + key;
  }

  std::string get_string(const std::string& key) const {
    const Value& v = at(key);
    if (v.kind != Value::Kind::kString) throw DataError("'" + qualified(key) + "' must be a string");
    return v.str;
  }
  std::string get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
  }

  std::int64_t get_int(const std::string& key) const {
    const Value& v = at(key);
    if (v.kind != Value::Kind::kInteger) throw DataError("'" + qualified(key) + "' must be an integer");
    return v.integer;
  }
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
  }

  double get_double(const std::string& key) const {
    const Value& v = at(key);
    if (v.kind == Value::Kind::kFloat) return v.real;
    if (v.kind == Value::Kind::kInteger) return static_cast<double>(v.integer);
    throw DataError("'" + qualified(key) + "' must be a number");
  }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Value& v = at(key);
    if (v.kind != Value::Kind::kBool) throw DataError("'" + qualified(key) + "' must be true or false");
    return v.boolean;
  }

  std::vector<std::string> get_strings(const std::string& key) const {
    const Value& v = at(key);
    if (v.kind != Value::Kind::kArray) throw DataError("'" + qualified(key) + "' must be an array");
    std::vector<std::string> out;
    for (const Value& e : v.array) {
      if (e.kind != Value::Kind::kString) throw DataError("'" + qualified(key) + "' must hold strings");
      out.push_back(e.str);
    }
    return out;
  }

  const Table& get_table(const std::string& key) const {
    const Value& v = at(key);
    if (v.kind != Value::Kind::kTable) throw DataError("'" + qualified(key) + "' must be a table");
    return *v.table;
  }

  /// Entries of a [[key]] array; empty when absent.
  std::vector<std::shared_ptr<Table>> get_table_array(const std::string& key) const {
    if (!has(key)) return {};
    const Value& v = at(key);
    if (v.kind != Value::Kind::kTableArray) throw DataError("'" + qualified(key) + "' must be [[" + key + "]]");
    return v.tables;
  }
};

namespace detail {

class Parser {
 public:
  Parser(std::string source, std::string origin) : src_(std::move(source)), origin_(std::move(origin)) {}

  Table parse() {
    Table root;
    Table* current = &root;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= src_.size()) {
      std::size_t end = src_.find('\n', pos);
      if (end == std::string::npos) end = src_.size();
      line_ = src_.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      line_no_ = line_no;
      i_ = 0;
      skip_ws();
      if (done_or_comment()) continue;
      if (line_[i_] == '[') {
        current = open_table(root);
      } else {
        parse_assignment(*current);
      }
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(at_line(origin_, line_no_) + ": " + what);
  }

  void skip_ws() {
    while (i_ < line_.size() && (line_[i_] == ' ' || line_[i_] == '\t' || line_[i_] == '\r')) ++i_;
  }

  bool done_or_comment() const { return i_ >= line_.size() || line_[i_] == '#'; }

  void expect_end() {
    skip_ws();
    if (!done_or_comment()) fail("unexpected trailing text");
  }

  std::string parse_key() {
    skip_ws();
    if (i_ < line_.size() && line_[i_] == '"') return parse_string();
    std::size_t b = i_;
    while (i_ < line_.size() && (std::isalnum(static_cast<unsigned char>(line_[i_])) || line_[i_] == '_' ||
                                  line_[i_] == '-'))
      ++i_;
    if (b == i_) fail("expected a key");
    return line_.substr(b, i_ - b);
  }

  std::vector<std::string> parse_dotted_key() {
    std::vector<std::string> parts{parse_key()};
    skip_ws();
    while (i_ < line_.size() && line_[i_] == '.') {
      ++i_;
      parts.push_back(parse_key());
      skip_ws();
    }
    return parts;
  }

  static Table* child(Table& parent, const std::string& key) {
    if (!parent.has(key)) {
      Value& v = parent.entries[key];
      v.kind = Value::Kind::kTable;
      v.table = std::make_shared<Table>();
      v.table->name = parent.qualified(key);
    }
    Value& v = parent.entries[key];
    if (v.kind == Value::Kind::kTableArray) return v.tables.back().get();
    if (v.kind != Value::Kind::kTable) return nullptr;
    return v.table.get();
  }

  Table* open_table(Table& root) {
    ++i_;
    const bool array = i_ < line_.size() && line_[i_] == '[';
    if (array) ++i_;
    auto path = parse_dotted_key();
    if (i_ >= line_.size() || line_[i_] != ']') fail("expected ']'");
    ++i_;
    if (array) {
      if (i_ >= line_.size() || line_[i_] != ']') fail("expected ']]'");
      ++i_;
    }
    expect_end();
    Table* t = &root;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      t = child(*t, path[k]);
      if (!t) fail("'" + path[k] + "' is not a table");
    }
    const std::string& last = path.back();
    if (!array) {
      Table* c = child(*t, last);
      if (!c) fail("'" + last + "' is not a table");
      return c;
    }
    if (t->has(last) && t->entries[last].kind != Value::Kind::kTableArray)
      fail("'" + last + "' already defined");
    Value& v = t->entries[last];
    v.kind = Value::Kind::kTableArray;
    auto tbl = std::make_shared<Table>();
    tbl->name = t->qualified(last) + "[" + std::to_string(v.tables.size()) + "]";
    v.tables.push_back(tbl);
    return tbl.get();
  }

  void parse_assignment(Table& t) {
    std::string key = parse_key();
    skip_ws();
    if (i_ >= line_.size() || line_[i_] != '=') fail("expected '=' after key '" + key + "'");
    ++i_;
    Value v = parse_value();
    expect_end();
    if (t.has(key)) fail("duplicate key '" + key + "'");
    t.entries.emplace(std::move(key), std::move(v));
  }

  std::string parse_string() {
    ++i_;  // opening quote
    std::string out;
    while (i_ < line_.size() && line_[i_] != '"') {
      char c = line_[i_++];
      if (c == '\\' && i_ < line_.size()) {
        char e = line_[i_++];
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out.push_back(c);
      }
    }
    if (i_ >= line_.size()) fail("unterminated string");
    ++i_;
    return out;
  }

  Value parse_value() {
    skip_ws();
    if (i_ >= line_.size()) fail("missing value");
    Value v;
    const char c = line_[i_];
    if (c == '"') {
      v.kind = Value::Kind::kString;
      v.str = parse_string();
      return v;
    }
    if (c == '[') {
      ++i_;
      v.kind = Value::Kind::kArray;
      skip_ws();
      if (i_ < line_.size() && line_[i_] == ']') {
        ++i_;
        return v;
      }
      while (true) {
        v.array.push_back(parse_value());
        skip_ws();
        if (i_ < line_.size() && line_[i_] == ',') {
          ++i_;
          skip_ws();
          if (i_ < line_.size() && line_[i_] == ']') {
            ++i_;
            break;
          }
          continue;
        }
        if (i_ < line_.size() && line_[i_] == ']') {
          ++i_;
          break;
        }
        fail("expected ',' or ']' in array");
      }
      return v;
    }
    std::size_t b = i_;
    while (i_ < line_.size() && line_[i_] != ',' && line_[i_] != ']' && line_[i_] != '#' && line_[i_] != ' ' &&
           line_[i_] != '\t' && line_[i_] != '\r')
      ++i_;
    std::string tok = line_.substr(b, i_ - b);
    if (tok == "true" || tok == "false") {
      v.kind = Value::Kind::kBool;
      v.boolean = tok == "true";
      return v;
    }
    std::string digits;
    for (char ch : tok)
      if (ch != '_') digits.push_back(ch);
    const bool looks_float = digits.find_first_of(".eE") != std::string::npos || digits == "inf" ||
                             digits == "nan" || digits == "+inf" || digits == "-inf";
    if (!looks_float) {
      std::int64_t n = 0;
      const char* first = digits.data();
      if (!digits.empty() && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, digits.data() + digits.size(), n);
      if (ec == std::errc() && ptr == digits.data() + digits.size()) {
        v.kind = Value::Kind::kInteger;
        v.integer = n;
        return v;
      }
      fail("invalid value '" + tok + "'");
    }
    auto d = csv::parse_double(digits);
    if (!d) fail("invalid value '" + tok + "'");
    v.kind = Value::Kind::kFloat;
    v.real = *d;
    return v;
  }

  std::string src_;
  std::string origin_;
  std::string line_;
  std::size_t line_no_ = 0;
  std::size_t i_ = 0;
};

}  // namespace detail

inline Table parse(std::string source, std::string origin = "<config>") {
  return detail::Parser(std::move(source), std::move(origin)).parse();
}

inline Table parse_file(const std::string& path) { return parse(csv::read_file(path), path); }

/// Resolves `path` relative to the directory holding `base_file`, unless it
/// is absolute.
inline std::string resolve_relative(const std::string& base_file, const std::string& path) {
  if (!path.empty() && path.front() == '/') return path;
  const auto slash = base_file.find_last_of('/');
  if (slash == std::string::npos) return path;
  return base_file.substr(0, slash + 1) + path;
}

}  // namespace memorability::config
