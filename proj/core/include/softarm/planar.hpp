#pragma once

#include "softarm/types.hpp"

namespace softarm {

/// Clockwise orthogonal vector: (x, y) -> (y, -x).
inline Vec2 perp(const Vec2& a) { return {a.y(), -a.x()}; }

/// a × b := a · perp(b). Equal to the usual determinant a.x*b.y - a.y*b.x.
inline double cross2(const Vec2& a, const Vec2& b) { return a.dot(perp(b)); }

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

/// Heaviside step with value 1 at the origin.
inline double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }

}  // namespace softarm
