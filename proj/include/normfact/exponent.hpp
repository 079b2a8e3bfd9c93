#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

#include "normfact/errors.hpp"

namespace normfact {

/// A norm order p in [1, inf], with inf as a distinguished value.
///
/// Finite orders are stored as doubles; the conjugate q with 1/p + 1/q = 1
/// is computed as p/(p-1), with conjugate(1) = inf and conjugate(inf) = 1.
class Exponent {
public:
  /// Finite order; must satisfy p >= 1.
  Exponent(double p) : value_(p), inf_(false) {
    if (!(std::isfinite(p) && p >= 1.0))
      throw Error("exponent must be a finite real >= 1 (or Exponent::infinity())");
  }

  static Exponent infinity() { return Exponent(Inf{}); }

  bool is_infinite() const { return inf_; }
  bool is_one() const { return !inf_ && value_ == 1.0; }
  bool is_two() const { return !inf_ && value_ == 2.0; }

  /// Finite value; only meaningful when !is_infinite().
  double value() const { return value_; }

  Exponent conjugate() const {
    if (inf_) return Exponent(1.0);
    if (value_ == 1.0) return infinity();
    return Exponent(value_ / (value_ - 1.0));
  }

  friend bool operator==(const Exponent& a, const Exponent& b) {
    if (a.inf_ || b.inf_) return a.inf_ && b.inf_;
    return a.value_ == b.value_;
  }
  friend bool operator!=(const Exponent& a, const Exponent& b) { return !(a == b); }

  /// "inf" for the infinite order, shortest exact decimal otherwise.
  std::string str() const {
    if (inf_) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value_);
    // trim to the shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[40];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, value_);
      if (std::strtod(shorter, nullptr) == value_) return shorter;
    }
    return buf;
  }

  /// Accepts "inf", "Inf", "INF", the UTF-8 infinity sign, or a decimal >= 1.
  static std::optional<Exponent> parse(std::string_view s) {
    if (s == "inf" || s == "Inf" || s == "INF" || s == "∞") return infinity();
    try {
      std::size_t pos = 0;
      const double v = std::stod(std::string(s), &pos);
      if (pos != s.size()) return std::nullopt;
      if (!(std::isfinite(v) && v >= 1.0)) return std::nullopt;
      return Exponent(v);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

private:
  struct Inf {};
  explicit Exponent(Inf) : value_(0.0), inf_(true) {}

  double value_;
  bool inf_;
};

}  // namespace normfact
