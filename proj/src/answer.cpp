// Copyright 2026 The hrt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hrt/answer.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <regex>

namespace hrt {

namespace {

constexpr std::string_view kMarker = "final answer:";

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string clean_payload(std::string_view s) {
  std::string p = trim(s);
  if (!p.empty() && p.back() == '.') p.pop_back();
  return trim(p);
}

// Contents of the brace group opening at text[open]; npos-safe.
bool brace_group(std::string_view text, std::size_t open, std::string& inner, std::size_t& end) {
  int depth = 0;
  for (std::size_t i = open; i < text.size(); ++i) {
    if (text[i] == '{') ++depth;
    if (text[i] == '}' && --depth == 0) {
      inner = std::string(text.substr(open + 1, i - open - 1));
      end = i + 1;
      return true;
    }
  }
  return false;
}

std::string strip_digits_zeros(std::string digits) {
  const auto nz = digits.find_first_not_of('0');
  return nz == std::string::npos ? "0" : digits.substr(nz);
}

}  // namespace

std::vector<AnswerDeclaration> find_answer_declarations(std::string_view text) {
  std::vector<AnswerDeclaration> out;
  const std::string low = lower(text);
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    const std::string_view line_low = std::string_view(low).substr(line_start, line_end - line_start);
    const auto at = line_low.rfind(kMarker);
    if (at != std::string_view::npos) {
      const std::size_t from = line_start + at + kMarker.size();
      out.push_back({line_start + at, clean_payload(text.substr(from, line_end - from))});
    }
    if (line_end == text.size()) break;
    line_start = line_end + 1;
  }
  constexpr std::string_view kBoxed = "\\boxed{";
  for (std::size_t pos = text.find(kBoxed); pos != std::string_view::npos;
       pos = text.find(kBoxed, pos + 1)) {
    std::string inner;
    std::size_t end = 0;
    if (brace_group(text, pos + kBoxed.size() - 1, inner, end)) {
      out.push_back({pos, clean_payload(inner)});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.offset < b.offset; });
  return out;
}

std::string last_declared_answer(std::string_view text) {
  auto decls = find_answer_declarations(text);
  return decls.empty() ? std::string() : decls.back().payload;
}

std::string normalize_answer(std::string_view answer) {
  std::string s = trim(answer);
  // Peel wrappers until stable.
  for (bool changed = true; changed;) {
    changed = false;
    if (s.size() >= 2 && s.front() == '$' && s.back() == '$') {
      s = trim(std::string_view(s).substr(1, s.size() - 2));
      changed = true;
    }
    if (s.rfind("\\boxed{", 0) == 0 && s.back() == '}') {
      s = trim(std::string_view(s).substr(7, s.size() - 8));
      changed = true;
    }
    if (!s.empty() && s.back() == '.') {
      s.pop_back();
      s = trim(s);
      changed = true;
    }
  }
  s = lower(s);
  std::string collapsed;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!collapsed.empty() && collapsed.back() != ' ') collapsed += ' ';
    } else {
      collapsed += c;
    }
  }
  s = collapsed;

  static const std::regex integer(R"(([+-]?)(\d+))");
  static const std::regex fraction(R"(([+-]?)(\d+)\s*/\s*(\d+))");
  static const std::regex decimal(R"(([+-]?)(\d*)\.(\d+))");
  std::smatch m;
  const auto sign_of = [](const std::string& sign, const std::string& magnitude) {
    return (sign == "-" && magnitude != "0") ? std::string("-") : std::string();
  };
  if (std::regex_match(s, m, integer)) {
    const std::string mag = strip_digits_zeros(m[2]);
    return sign_of(m[1], mag) + mag;
  }
  if (std::regex_match(s, m, fraction)) {
    const std::string num = strip_digits_zeros(m[2]);
    const std::string den = strip_digits_zeros(m[3]);
    unsigned long long p = 0;
    unsigned long long q = 0;
    const bool fits = num.size() <= 18 && den.size() <= 18;
    if (fits) {
      std::from_chars(num.data(), num.data() + num.size(), p);
      std::from_chars(den.data(), den.data() + den.size(), q);
    }
    if (!fits || q == 0) return sign_of(m[1], num) + num + "/" + den;
    const unsigned long long g = std::gcd(p, q);
    if (g > 0) {
      p /= g;
      q /= g;
    }
    const std::string mag = q == 1 ? std::to_string(p) : std::to_string(p) + "/" + std::to_string(q);
    return sign_of(m[1], p == 0 ? "0" : mag) + mag;
  }
  if (std::regex_match(s, m, decimal)) {
    std::string whole = strip_digits_zeros(m[2].length() ? std::string(m[2]) : "0");
    std::string frac = m[3];
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    const std::string mag = frac.empty() ? whole : whole + "." + frac;
    return sign_of(m[1], mag) + mag;
  }
  return s;
}

bool answers_match(std::string_view a, std::string_view b) {
  const std::string na = normalize_answer(a);
  return !na.empty() && na == normalize_answer(b);
}

}  // namespace hrt
