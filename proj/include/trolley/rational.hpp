#ifndef TROLLEY_RATIONAL_HPP
#define TROLLEY_RATIONAL_HPP

#include <cstdint>
#include <functional>
#include <string>

namespace trolley {

// Exact rational on int64. Denominator is always positive and the
// fraction is kept reduced, so structural comparison is value comparison.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(std::int64_t n, std::int64_t d);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  bool negative() const { return num_ < 0; }

  Rational operator-() const { return Rational(-num_, den_); }
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;

  bool operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const;
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }

  // Largest integer <= value.
  std::int64_t floor() const;

  // "n" when integral, "n/d" otherwise.
  std::string str() const;

  // Accepts the grammar ["-"] digits ["/" digits]; throws std::invalid_argument
  // on anything else (including a zero denominator).
  static Rational parse(const std::string& text);

 private:
  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace trolley

template <>
struct std::hash<trolley::Rational> {
  size_t operator()(const trolley::Rational& r) const noexcept {
    return std::hash<std::int64_t>()(r.num()) * 1000003u ^
           std::hash<std::int64_t>()(r.den());
  }
};

#endif  // TROLLEY_RATIONAL_HPP
