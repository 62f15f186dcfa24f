#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace vpc {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// Point on the unit sphere. Construction normalizes; a near-zero input
/// vector is rejected.
class UnitVec {
public:
  UnitVec(double x, double y, double z);
  explicit UnitVec(const Vec3& v) : UnitVec(v.x, v.y, v.z) {}

  double x() const { return v_.x; }
  double y() const { return v_.y; }
  double z() const { return v_.z; }
  const Vec3& vec() const { return v_; }

private:
  Vec3 v_;
};

/// Great-circle arc length between two points, in [0, pi].
double geodesic_distance(const UnitVec& a, const UnitVec& b);

struct EulerAngles {
  double yaw = 0.0;    // about +Z, positive turns the view from +X toward +Y
  double pitch = 0.0;  // positive raises the view toward +Z
  double roll = 0.0;   // about the view axis
};

/// Head orientation as a unit quaternion.
///
/// Frame convention: right-handed, +X forward, +Z up. Euler angles compose
/// intrinsically in yaw, pitch, roll order; positive pitch looks up, so the
/// identity view direction (1,0,0) maps to
///   (cos yaw cos pitch, sin yaw cos pitch, sin pitch).
///
/// q and -q denote the same rotation; components are canonicalized to w >= 0
/// (ties at w == 0 broken by the first nonzero of x, y, z) so value equality
/// is well defined.
class Orientation {
public:
  Orientation() : w_(1.0) {}
  /// Normalizes; rejects non-finite or near-zero-norm input.
  Orientation(double w, double x, double y, double z);

  static Orientation from_euler(const EulerAngles& e);
  static Orientation from_euler(double yaw, double pitch, double roll) {
    return from_euler(EulerAngles{yaw, pitch, roll});
  }
  /// Inverse of from_euler away from gimbal lock (|pitch| near pi/2 yields
  /// the roll = 0 representative).
  EulerAngles to_euler() const;

  Vec3 rotate(const Vec3& v) const;
  Vec3 rotate_inverse(const Vec3& v) const;

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

private:
  double w_ = 1.0, x_ = 0.0, y_ = 0.0, z_ = 0.0;
};

Orientation operator*(const Orientation& a, const Orientation& b);

/// Shortest-arc spherical interpolation, t in [0, 1].
Orientation slerp(const Orientation& a, const Orientation& b, double t);

/// The rotated forward axis: where the user is looking.
UnitVec view_direction(const Orientation& o);

/// Rectangular field of view, radians, each side strictly inside (0, pi).
struct ViewportSpec {
  ViewportSpec(double h_fov_rad, double v_fov_rad);
  double h_fov;
  double v_fov;
};

/// Default spec: 100 x 100 degrees, a common HMD approximation.
ViewportSpec default_viewport_spec();

/// Local frame of one viewport with precomputed half-FoV tangents, for bulk
/// membership tests.
struct ViewportFrame {
  ViewportFrame(const Orientation& o, const ViewportSpec& spec);

  /// True iff the unit vector p lies on the viewport: in front of the viewer
  /// and, after gnomonic projection onto the tangent plane, inside the
  /// closed FoV rectangle. A 1e-12 relative slack keeps the closed boundary
  /// stable under rounding.
  bool contains(const Vec3& p) const {
    const double f = dot(p, forward);
    if (f <= 0.0) return false;
    const double slack = 1e-12 * f;
    return std::abs(dot(p, left)) <= tan_half_h * f + slack &&
           std::abs(dot(p, up)) <= tan_half_v * f + slack;
  }

  Vec3 forward, left, up;
  double tan_half_h, tan_half_v;
};

bool point_in_viewport(const UnitVec& p, const Orientation& o, const ViewportSpec& spec);

/// Deterministic quasi-uniform point set on the sphere (Fibonacci spiral
/// lattice). Same count always yields bit-identical points.
class SphereGrid {
public:
  static SphereGrid fibonacci(int count);

  int count() const { return static_cast<int>(points_.size()); }
  std::span<const Vec3> points() const { return points_; }

private:
  SphereGrid() = default;
  std::vector<Vec3> points_;
};

/// Area of the intersection of the two viewports as a fraction of one
/// viewport's area, estimated by counting grid points. The denominator is
/// the mean of the two per-viewport counts, which makes the result exactly
/// symmetric and exactly 1 for identical orientations.
///
/// Throws DataError when a viewport captures no grid point (grid too coarse
/// for the viewport size).
double pairwise_overlap(const Orientation& a, const Orientation& b, const ViewportSpec& spec,
                        const SphereGrid& grid);

/// Fraction of one viewport's area covered by the intersection of all listed
/// viewports (denominator: mean per-viewport count). One orientation yields
/// exactly 1.
double joint_overlap(std::span<const Orientation> orientations, const ViewportSpec& spec,
                     const SphereGrid& grid);

}  // namespace vpc
