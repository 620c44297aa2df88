#pragma once

#include <cmath>

namespace dbsplace {

/// 3D position or displacement. All geometry in this library is in kilometers.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3& a, const Vec3& b) = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline double distance_km(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Horizontal (ground-plane) separation of two points.
inline double horizontal_distance_km(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Axis-aligned box in km. Ground regions have z_min == z_max == 0.
struct Region3D {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  double z_min = 0.0, z_max = 0.0;

  friend bool operator==(const Region3D&, const Region3D&) = default;

  bool contains(const Vec3& p, double tol = 1e-12) const {
    return p.x >= x_min - tol && p.x <= x_max + tol && p.y >= y_min - tol &&
           p.y <= y_max + tol && p.z >= z_min - tol && p.z <= z_max + tol;
  }

  bool well_formed() const { return x_min <= x_max && y_min <= y_max && z_min <= z_max; }

  double x_width() const { return x_max - x_min; }
  double y_width() const { return y_max - y_min; }
  double z_width() const { return z_max - z_min; }

  /// Clamp a point into the box; `moved[i]` is set when axis i was clamped.
  Vec3 clamp(const Vec3& p, bool moved[3]) const {
    Vec3 q = p;
    moved[0] = moved[1] = moved[2] = false;
    if (q.x < x_min) { q.x = x_min; moved[0] = true; } else if (q.x > x_max) { q.x = x_max; moved[0] = true; }
    if (q.y < y_min) { q.y = y_min; moved[1] = true; } else if (q.y > y_max) { q.y = y_max; moved[1] = true; }
    if (q.z < z_min) { q.z = z_min; moved[2] = true; } else if (q.z > z_max) { q.z = z_max; moved[2] = true; }
    return q;
  }
};

}  // namespace dbsplace
