#pragma once

// Strict JSON object reading shared by the config loaders.

#include <cmath>
#include <optional>
#include <set>
#include <string>

#include "edgefed/error.hpp"
#include "json.hpp"

namespace edgefed::detail {

using nlohmann::json;

// Reads one JSON object against a closed set of keys.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ParseError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const json& require(const std::string& key) {
    const json* v = find(key);
    if (!v) throw ParseError(sub(key), "missing required key");
    return *v;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ParseError(sub(key), "missing required key");
    }
    if (!v->is_number()) throw ParseError(sub(key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ParseError(sub(key), "expected a finite number");
    return d;
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ParseError(sub(key), "missing required key");
    }
    if (!v->is_number_integer()) throw ParseError(sub(key), "expected an integer");
    return v->get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ParseError(sub(key), "missing required key");
    }
    if (!v->is_number_unsigned()) throw ParseError(sub(key), "expected a non-negative integer");
    return v->get<std::uint64_t>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ParseError(sub(key), "missing required key");
    }
    if (!v->is_string()) throw ParseError(sub(key), "expected a string");
    return v->get<std::string>();
  }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw UnknownKey(sub(it.key()));
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

inline std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

inline const json& require_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path, "expected an array");
  return v;
}

// Runs a validate() call and reports its message as the broken invariant.
template <typename F>
void check(const std::string& path, F&& f) {
  try {
    f();
  } catch (const InvalidConfig& e) {
    throw ValidationError(e.what(), path);
  } catch (const InvalidProfile& e) {
    throw ValidationError(e.what(), path);
  }
}

}  // namespace edgefed::detail
