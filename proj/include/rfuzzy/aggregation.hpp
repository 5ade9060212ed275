#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>

#include "model.hpp"

namespace rfuzzy {

namespace detail {

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline double combine(connective op, double x, double y) {
  switch (op) {
    case connective::min: return std::min(x, y);
    case connective::max: return std::max(x, y);
    case connective::prod: return x * y;
    case connective::luka: return std::max(0.0, x + y - 1.0);
    case connective::dprod: return x + y - x * y;
    case connective::dluka: return std::min(1.0, x + y);
    case connective::complement: break;
  }
  throw std::invalid_argument("complement has no binary form");
}

}  // namespace detail

// Applies a connective to one or more truth values. Binary connectives fold
// left over the list; complement takes exactly one value. The result is
// clamped against rounding drift before re-entering [0,1].
inline truth_value apply_connective(connective op, std::span<const truth_value> values) {
  if (values.empty()) throw std::invalid_argument("apply_connective needs at least one value");
  if (op == connective::complement) {
    if (values.size() != 1)
      throw std::invalid_argument("complement takes exactly one value, got " +
                                  std::to_string(values.size()));
    return truth_value(1.0 - values[0].value());
  }
  double acc = values[0].value();
  for (std::size_t i = 1; i < values.size(); ++i)
    acc = detail::combine(op, acc, values[i].value());
  return truth_value(detail::clamp01(acc));
}

inline truth_value apply_connective(connective op, std::initializer_list<truth_value> values) {
  return apply_connective(op, std::span<const truth_value>(values.begin(), values.size()));
}

struct connective_impl {
  connective name;
  truth_value (*apply)(std::span<const truth_value>);
};

inline const connective_impl& connective_table(connective op) {
  static const connective_impl table[] = {
      {connective::min,
       [](std::span<const truth_value> v) { return apply_connective(connective::min, v); }},
      {connective::max,
       [](std::span<const truth_value> v) { return apply_connective(connective::max, v); }},
      {connective::prod,
       [](std::span<const truth_value> v) { return apply_connective(connective::prod, v); }},
      {connective::luka,
       [](std::span<const truth_value> v) { return apply_connective(connective::luka, v); }},
      {connective::dprod,
       [](std::span<const truth_value> v) { return apply_connective(connective::dprod, v); }},
      {connective::dluka,
       [](std::span<const truth_value> v) { return apply_connective(connective::dluka, v); }},
      {connective::complement,
       [](std::span<const truth_value> v) { return apply_connective(connective::complement, v); }},
  };
  return table[static_cast<int>(op)];
}

// Piecewise-linear interpolation over a truth function. Declared points are
// reproduced exactly; x outside [first.x, last.x] has no value and the caller
// falls through to whatever defaults the program declares.
inline std::optional<truth_value> interpolate(const truth_function& fn, double x) {
  const std::vector<fn_point>& pts = fn.points;
  if (pts.size() < 2) throw std::invalid_argument("truth function needs at least two points");
  if (x < pts.front().x || x > pts.back().x) return std::nullopt;
  auto hi = std::upper_bound(pts.begin(), pts.end(), x,
                             [](double v, const fn_point& p) { return v < p.x; });
  const fn_point& lo = *(hi - 1);
  if (lo.x == x) return lo.tv;
  double t = (x - lo.x) / (hi->x - lo.x);
  double y = lo.tv.value() + t * (hi->tv.value() - lo.tv.value());
  return truth_value(detail::clamp01(y));
}

}  // namespace rfuzzy
