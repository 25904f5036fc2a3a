// Copyright 2026 The SumGD Engine Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Validates JSON against the subset of JSON Schema the checked-in schemas
// use: type, const, enum, required, properties, additionalProperties, items,
// minItems/maxItems, minimum/maximum, minLength, pattern, oneOf, local $ref.

#include <filesystem>
#include <fstream>
#include <regex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sumgd::testing {

class SchemaValidator {
 public:
  explicit SchemaValidator(nlohmann::json schema) : root_(std::move(schema)) {}

  static SchemaValidator load(const std::filesystem::path& path) {
    std::ifstream in(path);
    return SchemaValidator(nlohmann::json::parse(in));
  }

  // Empty on success, else one message per violation.
  std::vector<std::string> validate(const nlohmann::json& doc) const {
    std::vector<std::string> errors;
    check(root_, doc, "$", errors);
    return errors;
  }

 private:
  static bool has_type(const nlohmann::json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    return false;
  }

  const nlohmann::json& resolve(const std::string& ref) const {
    // Only "#/a/b" pointers into this document.
    return root_.at(nlohmann::json::json_pointer(ref.substr(1)));
  }

  void check(const nlohmann::json& s, const nlohmann::json& v, const std::string& at,
             std::vector<std::string>& errors) const {
    if (s.is_boolean()) {
      if (!s.get<bool>()) errors.push_back(at + ": not allowed");
      return;
    }
    if (s.contains("$ref")) {
      check(resolve(s["$ref"].get<std::string>()), v, at, errors);
    }
    if (s.contains("oneOf")) {
      int matches = 0;
      for (const auto& alt : s["oneOf"]) {
        std::vector<std::string> sub;
        check(alt, v, at, sub);
        if (sub.empty()) ++matches;
      }
      if (matches != 1) {
        errors.push_back(at + ": matches " + std::to_string(matches) + " oneOf branches");
      }
    }
    if (s.contains("type")) {
      bool ok = false;
      if (s["type"].is_string()) {
        ok = has_type(v, s["type"].get<std::string>());
      } else {
        for (const auto& t : s["type"]) ok = ok || has_type(v, t.get<std::string>());
      }
      if (!ok) {
        errors.push_back(at + ": expected type " + s["type"].dump() + ", got " + v.dump());
        return;
      }
    }
    if (s.contains("const") && v != s["const"]) {
      errors.push_back(at + ": expected " + s["const"].dump());
    }
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found = found || e == v;
      if (!found) errors.push_back(at + ": " + v.dump() + " not in enum");
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>()) {
        errors.push_back(at + ": below minimum");
      }
      if (s.contains("maximum") && x > s["maximum"].get<double>()) {
        errors.push_back(at + ": above maximum");
      }
    }
    if (v.is_string()) {
      const auto& str = v.get_ref<const std::string&>();
      if (s.contains("minLength") && str.size() < s["minLength"].get<std::size_t>()) {
        errors.push_back(at + ": shorter than minLength");
      }
      if (s.contains("pattern") &&
          !std::regex_search(str, std::regex(s["pattern"].get<std::string>()))) {
        errors.push_back(at + ": '" + str + "' does not match " + s["pattern"].dump());
      }
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) {
        errors.push_back(at + ": too few items");
      }
      if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) {
        errors.push_back(at + ": too many items");
      }
      if (s.contains("items")) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          check(s["items"], v[i], at + "[" + std::to_string(i) + "]", errors);
        }
      }
    }
    if (v.is_object()) {
      if (s.contains("required")) {
        for (const auto& key : s["required"]) {
          if (!v.contains(key.get<std::string>())) {
            errors.push_back(at + ": missing required '" + key.get<std::string>() + "'");
          }
        }
      }
      for (const auto& [key, value] : v.items()) {
        const std::string child = at + "." + key;
        if (s.contains("properties") && s["properties"].contains(key)) {
          check(s["properties"][key], value, child, errors);
        } else if (s.contains("additionalProperties")) {
          check(s["additionalProperties"], value, child, errors);
        }
      }
    }
  }

  nlohmann::json root_;
};

}  // namespace sumgd::testing
