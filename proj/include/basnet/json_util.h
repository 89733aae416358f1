/* Copyright 2026 The BaSNet Engine Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef BASNET_JSON_UTIL_H_
#define BASNET_JSON_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace basnet {

using Json = nlohmann::ordered_json;

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

// Parses `text`; syntax errors become kParse errors of the form
// "<source>:<line>:<column>: <message>".
Json ParseJsonText(std::string_view text, const std::string& source);

struct ValueStart {
  int depth = 0;         // 1 = direct child of the top-level container
  std::size_t line = 0;  // 1-based
  std::string top_key;   // enclosing top-level object key, if any
};

// Start position of every JSON value in document order. Used to attach line
// numbers to schema errors found after parsing.
std::vector<ValueStart> ScanValues(std::string_view text);

// Lines of the elements of the array stored under top-level `key` (or of the
// top-level array itself when `key` is empty).
std::vector<std::size_t> ArrayElementLines(std::string_view text,
                                           std::string_view key);

}  // namespace basnet

#endif  // BASNET_JSON_UTIL_H_
