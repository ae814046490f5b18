#include "synthsoc/rational.h"

#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace synthsoc {

namespace {

using Wide = __int128;

std::int64_t narrow(Wide v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
  return static_cast<std::int64_t>(v);
}

Wide wide_gcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational make(Wide num, Wide den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide g = wide_gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational(narrow(num), narrow(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    if (num == INT64_MIN || den == INT64_MIN) throw std::overflow_error("rational overflow");
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Rational { throw std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
  if (text.empty()) return fail();

  auto parse_int = [&](std::string_view s) -> std::int64_t {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) fail();
    return v;
  };

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(parse_int(text));

  std::string_view int_part = text.substr(0, dot);
  std::string_view frac_part = text.substr(dot + 1);
  if (frac_part.empty() || frac_part.size() > 18) return fail();
  bool negative = !int_part.empty() && int_part.front() == '-';
  if (negative || (!int_part.empty() && int_part.front() == '+')) int_part.remove_prefix(1);
  Wide whole = int_part.empty() ? 0 : parse_int(int_part);
  if (whole < 0) return fail();
  Wide frac = parse_int(frac_part);
  if (frac < 0) return fail();
  Wide scale = 1;
  for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
  Wide num = whole * scale + frac;
  return make(negative ? -num : num, scale);
}

Rational Rational::from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite value cannot be a rational");
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
  if (ec != std::errc()) throw std::invalid_argument("value out of rational range");
  std::string_view s(buf, static_cast<std::size_t>(p - buf));
  // Shortest round-trip fixed notation can be long for tiny magnitudes.
  if (auto dot = s.find('.'); dot != std::string_view::npos && s.size() - dot - 1 > 18) {
    throw std::invalid_argument("value has too many decimal places for an exact rational");
  }
  return parse(s);
}

Rational& Rational::operator+=(const Rational& o) {
  *this = make(Wide(num_) * o.den_ + Wide(o.num_) * den_, Wide(den_) * o.den_);
  return *this;
}

Rational& Rational::operator-=(const Rational& o) {
  *this = make(Wide(num_) * o.den_ - Wide(o.num_) * den_, Wide(den_) * o.den_);
  return *this;
}

Rational& Rational::operator*=(const Rational& o) {
  *this = make(Wide(num_) * o.num_, Wide(den_) * o.den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::domain_error("rational division by zero");
  *this = make(Wide(num_) * o.den_, Wide(den_) * o.num_);
  return *this;
}

Rational Rational::operator-() const { return make(-Wide(num_), den_); }

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  return Wide(a.num_) * b.den_ <=> Wide(b.num_) * a.den_;
}

}  // namespace synthsoc
