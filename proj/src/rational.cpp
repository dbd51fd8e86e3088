#include "trolley/rational.hpp"

#include <numeric>
#include <stdexcept>

namespace trolley {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN)
    throw std::overflow_error("rational overflow");
  return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::invalid_argument("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n, d);
  num_ = g ? n / g : n;
  den_ = g ? d / g : d;
}

Rational Rational::operator+(const Rational& o) const {
  const i128 n = i128(num_) * o.den_ + i128(o.num_) * den_;
  const i128 d = i128(den_) * o.den_;
  const i128 g = n == 0 ? d : gcd128(n, d);
  return Rational(narrow(n / g), narrow(d / g));
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
  const i128 n = i128(num_) * o.num_;
  const i128 d = i128(den_) * o.den_;
  const i128 g = n == 0 ? d : gcd128(n, d);
  return Rational(narrow(n / g), narrow(d / g));
}

Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) throw std::invalid_argument("rational division by zero");
  return *this * Rational(o.den_, o.num_);
}

bool Rational::operator<(const Rational& o) const {
  return i128(num_) * o.den_ < i128(o.num_) * den_;
}

std::int64_t Rational::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& text) {
  size_t i = 0;
  bool neg = false;
  if (i < text.size() && text[i] == '-') {
    neg = true;
    ++i;
  }
  auto digits = [&](std::int64_t& out) {
    if (i >= text.size() || !isdigit(static_cast<unsigned char>(text[i])))
      return false;
    i128 v = 0;
    while (i < text.size() && isdigit(static_cast<unsigned char>(text[i]))) {
      v = v * 10 + (text[i] - '0');
      if (v > INT64_MAX) return false;
      ++i;
    }
    out = static_cast<std::int64_t>(v);
    return true;
  };
  std::int64_t n = 0, d = 1;
  if (!digits(n)) throw std::invalid_argument("malformed rational: " + text);
  if (i < text.size() && text[i] == '/') {
    ++i;
    if (!digits(d) || d == 0)
      throw std::invalid_argument("malformed rational: " + text);
  }
  if (i != text.size())
    throw std::invalid_argument("malformed rational: " + text);
  return Rational(neg ? -n : n, d);
}

}  // namespace trolley
