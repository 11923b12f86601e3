#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace rtrim {

// Exact rational, normalized so den > 0 and gcd(|num|, den) == 1.
struct Rational {
  long long num = 0;
  long long den = 1;

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  std::string render() const;
};

// A normalized answer. `numeric_value` is set when the text parses as an
// integer, a finite decimal, or a simple fraction a/b.
struct CanonicalAnswer {
  std::string text;
  std::optional<Rational> numeric_value;

  // Equivalence-class key: numerically equal answers share a key even when
  // their surface texts differ (e.g. "0.5" and "1/2").
  std::string key() const;
};

// Contents of the last balanced `\boxed{...}` group, or nothing. An
// unbalanced final occurrence falls back to earlier occurrences.
std::optional<std::string> extract_answer(std::string_view completion_text);

// Normalization pipeline: strips $ delimiters, \left/\right, redundant outer
// braces; collapses whitespace and drops spaces around + - * /; rewrites
// integer \frac{a}{b} as a/b; trims trailing ".0" from numerals; lowercases
// purely textual answers; attempts an exact rational parse.
// Throws EvalError("empty answer") when nothing remains after trimming.
CanonicalAnswer normalize_answer(std::string_view raw);

// Exact numeric equality when both sides are numeric, byte equality of the
// normalized texts otherwise.
bool answers_equal(const CanonicalAnswer& a, const CanonicalAnswer& b);

// extract + normalize in one step; empty or missing boxed groups become
// nullopt instead of an error.
std::optional<CanonicalAnswer> extract_canonical(std::string_view completion_text);

}  // namespace rtrim
