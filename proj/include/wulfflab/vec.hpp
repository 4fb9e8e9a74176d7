#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace wulfflab {

/// Fixed-size Euclidean vector. Used for points and directions in 2D and 3D.
template <std::size_t N>
struct Vec {
  std::array<double, N> c{};

  constexpr double& operator[](std::size_t i) { return c[i]; }
  constexpr double operator[](std::size_t i) const { return c[i]; }

  constexpr Vec& operator+=(const Vec& o) {
    for (std::size_t i = 0; i < N; ++i) c[i] += o.c[i];
    return *this;
  }
  constexpr Vec& operator-=(const Vec& o) {
    for (std::size_t i = 0; i < N; ++i) c[i] -= o.c[i];
    return *this;
  }
  constexpr Vec& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  friend constexpr Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend constexpr Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend constexpr Vec operator*(Vec a, double s) { return a *= s; }
  friend constexpr Vec operator*(double s, Vec a) { return a *= s; }
  friend constexpr Vec operator-(Vec a) { return a *= -1.0; }
  friend constexpr bool operator==(const Vec&, const Vec&) = default;
};

using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

template <std::size_t N>
constexpr double dot(const Vec<N>& a, const Vec<N>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t N>
inline double norm(const Vec<N>& a) {
  return std::sqrt(dot(a, a));
}

template <std::size_t N>
inline Vec<N> normalized(const Vec<N>& a) {
  const double n = norm(a);
  return n > 0.0 ? a * (1.0 / n) : a;
}

constexpr double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]}};
}

/// Counterclockwise perpendicular.
constexpr Vec2 perp(const Vec2& a) { return {{-a[1], a[0]}}; }

inline Vec2 polar(double angle, double radius = 1.0) {
  return {{radius * std::cos(angle), radius * std::sin(angle)}};
}

inline constexpr double kPi = 3.14159265358979323846;

/// Lebesgue measure of the unit ball in dimension n (n = 2 or 3).
constexpr double unit_ball_volume(int n) { return n == 2 ? kPi : 4.0 * kPi / 3.0; }

}  // namespace wulfflab
