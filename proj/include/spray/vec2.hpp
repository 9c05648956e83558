#pragma once

#include <cmath>

namespace spray {

inline constexpr double pi = 3.14159265358979323846264338327950288;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  // counterclockwise quarter turn: (x, y) -> (-y, x)
  Vec2 perp() const { return {-y, x}; }

  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

inline bool finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

}  // namespace spray
