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
#include "basnet/json_util.h"

#include <fstream>
#include <sstream>

#include "basnet/error.h"

namespace basnet {

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(out.good(), ErrorKind::kIo, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  Require(out.good(), ErrorKind::kIo, "write failed for " + path.string());
}

Json ParseJsonText(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    Fail(ErrorKind::kParse, source + ":" + std::to_string(line) + ":" +
                                std::to_string(column) + ": " + e.what());
  }
}

std::vector<ValueStart> ScanValues(std::string_view text) {
  std::vector<ValueStart> values;
  std::vector<char> stack;
  bool in_string = false, escaped = false;
  bool expect_value = true, expect_key = false, capturing = false;
  std::string key, top_key;
  std::size_t line = 1;
  for (char ch : text) {
    if (ch == '\n') ++line;
    if (in_string) {
      if (escaped) {
        escaped = false;
        if (capturing) key += ch;
      } else if (ch == '\\') {
        escaped = true;
      } else if (ch == '"') {
        in_string = false;
        if (capturing) {
          top_key = key;
          capturing = false;
        }
      } else if (capturing) {
        key += ch;
      }
      continue;
    }
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') continue;
    if (expect_key && ch == '"') {
      expect_key = false;
      in_string = true;
      if (stack.size() == 1) {
        capturing = true;
        key.clear();
      }
      continue;
    }
    if (expect_value && ch != ']' && ch != '}') {
      values.push_back({static_cast<int>(stack.size()), line,
                        stack.empty() ? std::string() : top_key});
    }
    expect_value = false;
    expect_key = false;
    switch (ch) {
      case '"':
        in_string = true;
        break;
      case '[':
        stack.push_back('[');
        expect_value = true;
        break;
      case '{':
        stack.push_back('{');
        expect_key = true;
        break;
      case ']':
      case '}':
        if (!stack.empty()) stack.pop_back();
        break;
      case ',':
        if (!stack.empty() && stack.back() == '[') expect_value = true;
        if (!stack.empty() && stack.back() == '{') expect_key = true;
        break;
      case ':':
        expect_value = true;
        break;
      default:
        break;
    }
  }
  return values;
}

std::vector<std::size_t> ArrayElementLines(std::string_view text,
                                           std::string_view key) {
  const int depth = key.empty() ? 1 : 2;
  std::vector<std::size_t> lines;
  for (const ValueStart& v : ScanValues(text)) {
    if (v.depth == depth && v.top_key == key) lines.push_back(v.line);
  }
  return lines;
}

}  // namespace basnet
