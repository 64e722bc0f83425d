// Copyright 2026 The selfalign Authors.
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

#include <algorithm>
#include <cctype>
#include <regex>
#include <string>

#include <fmt/format.h>

#include "selfalign/errors.h"
#include "selfalign/oracle.h"

namespace selfalign {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view LastNonEmptyLine(std::string_view text) {
  while (true) {
    text = Trim(text);
    if (text.empty()) return text;
    const std::size_t nl = text.find_last_of('\n');
    std::string_view line = nl == std::string_view::npos ? text : text.substr(nl + 1);
    line = Trim(line);
    if (!line.empty()) return line;
    text = text.substr(0, nl);
  }
}

Direction DirectionFromComment(std::string comment) {
  std::transform(comment.begin(), comment.end(), comment.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  struct Keyword {
    const char* text;
    Direction direction;
  };
  static constexpr Keyword kKeywords[] = {{"no change", Direction::kNoChange},
                                          {"increase", Direction::kIncrease},
                                          {"decrease", Direction::kDecrease}};
  std::size_t best = std::string::npos;
  Direction result = Direction::kNoChange;
  for (const auto& k : kKeywords) {
    const std::size_t pos = comment.find(k.text);
    if (pos < best) {
      best = pos;
      result = k.direction;
    }
  }
  return result;
}

}  // namespace

std::vector<int> ParseRankingReply(std::string_view reply, std::size_t n) {
  static const std::regex kList(R"(^\[\s*(\d+(\s*,\s*\d+)*)?\s*\]$)");
  const std::string line(LastNonEmptyLine(reply));
  if (!std::regex_match(line, kList)) {
    throw ReplyParseError(
        fmt::format("last line of the reply is not a bracketed index list: '{}'", line),
        std::string(reply));
  }
  std::vector<int> out;
  static const std::regex kInt(R"(\d+)");
  for (auto it = std::sregex_iterator(line.begin(), line.end(), kInt);
       it != std::sregex_iterator(); ++it) {
    const std::string digits = it->str();
    if (digits.size() > 9) {
      throw ReplyParseError("sample index out of range: " + digits, std::string(reply));
    }
    out.push_back(std::stoi(digits));
  }
  std::vector<int> sorted = out;
  std::sort(sorted.begin(), sorted.end());
  bool permutation = sorted.size() == n;
  for (std::size_t i = 0; permutation && i < n; ++i) {
    permutation = sorted[i] == static_cast<int>(i);
  }
  if (!permutation) {
    throw ReplyParseError(
        fmt::format("ranking {} is not a permutation of samples 0..{}", line,
                    static_cast<long long>(n) - 1),
        std::string(reply));
  }
  return out;
}

ReflectionResult ParseReflectionReply(std::string_view reply,
                                      std::span<const std::string> parameter_names) {
  const std::size_t open = reply.rfind('{');
  if (open == std::string_view::npos || reply.find('}', open) == std::string_view::npos) {
    throw ReplyParseError("reply contains no dictionary literal", std::string(reply));
  }
  const std::string body(reply.substr(open + 1));
  static const std::regex kKey(R"((['"])([A-Za-z_][A-Za-z0-9_]*)\1\s*:)");
  std::vector<std::smatch> keys;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), kKey);
       it != std::sregex_iterator(); ++it) {
    keys.push_back(*it);
  }
  ReflectionResult out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const std::string name = keys[i][2].str();
    if (std::find(parameter_names.begin(), parameter_names.end(), name) ==
        parameter_names.end()) {
      throw ReplyParseError("reflection names unknown parameter '" + name + "'",
                            std::string(reply));
    }
    const std::size_t from = static_cast<std::size_t>(keys[i].position() + keys[i].length());
    const std::size_t to = i + 1 < keys.size() ? static_cast<std::size_t>(keys[i + 1].position())
                                               : body.size();
    const std::string segment = body.substr(from, to - from);
    const std::size_t hash = segment.find('#');
    out[name] = hash == std::string::npos ? Direction::kNoChange
                                          : DirectionFromComment(segment.substr(hash + 1));
  }
  return out;
}

}  // namespace selfalign
