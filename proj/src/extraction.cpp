#include "rtrim/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "rtrim/errors.hpp"

namespace rtrim {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

void erase_all(std::string& s, std::string_view token) {
  size_t pos = 0;
  while ((pos = s.find(token, pos)) != std::string::npos) s.erase(pos, token.size());
}

// True when the brace at position 0 closes at the last position.
bool braces_wrap_whole(const std::string& s) {
  int depth = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '{') ++depth;
    else if (s[i] == '}') {
      --depth;
      if (depth == 0) return i + 1 == s.size();
    }
  }
  return false;
}

bool is_integer_text(std::string_view s) {
  size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// Reads a balanced {...} group starting at `pos` (which must be '{').
// Returns the contents and advances `pos` past the closing brace.
std::optional<std::string> read_group(std::string_view s, size_t& pos) {
  if (pos >= s.size() || s[pos] != '{') return std::nullopt;
  int depth = 0;
  size_t open = pos;
  for (size_t i = pos; i < s.size(); ++i) {
    if (s[i] == '{') ++depth;
    else if (s[i] == '}') {
      --depth;
      if (depth == 0) {
        pos = i + 1;
        return std::string(s.substr(open + 1, i - open - 1));
      }
    }
  }
  return std::nullopt;
}

// \frac{a}{b} with integer a and b becomes a/b; everything else passes through.
std::string rewrite_integer_fracs(const std::string& in) {
  static constexpr std::string_view kFrac = "\\frac{";
  std::string out;
  size_t i = 0;
  while (i < in.size()) {
    if (in.compare(i, kFrac.size(), kFrac) == 0) {
      size_t pos = i + kFrac.size() - 1;
      auto num = read_group(in, pos);
      std::optional<std::string> den;
      if (num && pos < in.size() && in[pos] == '{') den = read_group(in, pos);
      if (num && den && is_integer_text(trim(*num)) && is_integer_text(trim(*den))) {
        out += trim(*num) + "/" + trim(*den);
        i = pos;
        continue;
      }
    }
    out += in[i++];
  }
  return out;
}

std::string collapse_whitespace(const std::string& in) {
  std::string out;
  bool in_ws = false;
  for (char c : in) {
    if (is_space(c)) {
      in_ws = true;
      continue;
    }
    if (in_ws && !out.empty()) out += ' ';
    in_ws = false;
    out += c;
  }
  return out;
}

bool is_binary_op(char c) { return c == '+' || c == '-' || c == '*' || c == '/'; }

std::string drop_spaces_around_ops(const std::string& in) {
  std::string out;
  for (size_t i = 0; i < in.size(); ++i) {
    if (in[i] == ' ' && i + 1 < in.size() && is_binary_op(in[i + 1])) continue;
    if (is_binary_op(in[i])) {
      out += in[i];
      while (i + 1 < in.size() && in[i + 1] == ' ') ++i;
      continue;
    }
    out += in[i];
  }
  return out;
}

bool is_decimal_text(std::string_view s) {
  size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  if (digits == 0 || i >= s.size() || s[i] != '.') return false;
  ++i;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

std::string strip_trailing_zero_decimals(std::string s) {
  if (!is_decimal_text(s)) return s;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

bool is_textual(std::string_view s) {
  bool any_alpha = false;
  for (char c : s) {
    if (std::isalpha(static_cast<unsigned char>(c))) any_alpha = true;
    else if (c != ' ') return false;
  }
  return any_alpha;
}

std::optional<long long> parse_ll(std::string_view s) {
  if (!is_integer_text(s)) return std::nullopt;
  size_t digits = s.size() - ((s[0] == '+' || s[0] == '-') ? 1 : 0);
  if (digits > 18) return std::nullopt;
  return std::strtoll(std::string(s).c_str(), nullptr, 10);
}

Rational reduced(long long num, long long den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

std::optional<Rational> parse_rational(const std::string& s) {
  if (auto v = parse_ll(s)) return Rational{*v, 1};
  if (is_decimal_text(s)) {
    size_t dot = s.find('.');
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    std::string digits = whole;
    if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) digits.erase(0, 1);
    digits += frac;
    if (digits.size() > 18 || frac.size() > 18) return std::nullopt;
    long long num = std::strtoll(digits.c_str(), nullptr, 10);
    long long den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    return reduced(neg ? -num : num, den);
  }
  size_t slash = s.find('/');
  if (slash != std::string::npos && s.find('/', slash + 1) == std::string::npos) {
    auto a = parse_ll(s.substr(0, slash));
    auto b = parse_ll(s.substr(slash + 1));
    if (a && b && *b != 0) return reduced(*a, *b);
  }
  return std::nullopt;
}

}  // namespace

std::string Rational::render() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

std::string CanonicalAnswer::key() const {
  if (numeric_value) return "num:" + numeric_value->render();
  return "txt:" + text;
}

std::optional<std::string> extract_answer(std::string_view completion_text) {
  static constexpr std::string_view kMarker = "\\boxed{";
  std::vector<size_t> hits;
  for (size_t pos = completion_text.find(kMarker); pos != std::string_view::npos;
       pos = completion_text.find(kMarker, pos + 1)) {
    hits.push_back(pos);
  }
  for (auto it = hits.rbegin(); it != hits.rend(); ++it) {
    size_t pos = *it + kMarker.size() - 1;
    if (auto group = read_group(completion_text, pos)) return group;
  }
  return std::nullopt;
}

CanonicalAnswer normalize_answer(std::string_view raw) {
  std::string s = trim(raw);
  if (s.empty()) throw EvalError("empty answer");

  erase_all(s, "\\left");
  erase_all(s, "\\right");
  s = trim(s);
  for (bool stripped = true; stripped;) {
    stripped = false;
    while (s.size() >= 2 && s.front() == '$' && s.back() == '$') {
      s = trim(std::string_view(s).substr(1, s.size() - 2));
      stripped = true;
    }
    while (s.size() >= 2 && s.front() == '{' && braces_wrap_whole(s)) {
      s = trim(std::string_view(s).substr(1, s.size() - 2));
      stripped = true;
    }
  }
  s = rewrite_integer_fracs(s);
  s = collapse_whitespace(s);
  s = drop_spaces_around_ops(s);
  s = trim(s);
  if (s.empty()) throw EvalError("empty answer");
  s = strip_trailing_zero_decimals(s);
  if (is_textual(s)) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  }

  CanonicalAnswer out;
  out.text = s;
  out.numeric_value = parse_rational(s);
  return out;
}

bool answers_equal(const CanonicalAnswer& a, const CanonicalAnswer& b) {
  if (a.numeric_value && b.numeric_value) return *a.numeric_value == *b.numeric_value;
  return a.text == b.text;
}

std::optional<CanonicalAnswer> extract_canonical(std::string_view completion_text) {
  auto raw = extract_answer(completion_text);
  if (!raw) return std::nullopt;
  if (trim(*raw).empty()) return std::nullopt;
  try {
    return normalize_answer(*raw);
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

}  // namespace rtrim
