#include "vpclust/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>

#include "vpclust/util.hpp"

namespace vpc {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite3(double a, double b, double c) {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c);
}

}  // namespace

UnitVec::UnitVec(double x, double y, double z) {
  if (!finite3(x, y, z)) throw std::invalid_argument("UnitVec: non-finite component");
  const double n = std::sqrt(x * x + y * y + z * z);
  if (n < 1e-12) throw std::invalid_argument("UnitVec: zero-norm vector");
  v_ = {x / n, y / n, z / n};
}

double geodesic_distance(const UnitVec& a, const UnitVec& b) {
  const double d = std::clamp(dot(a.vec(), b.vec()), -1.0, 1.0);
  return std::acos(d);
}

Orientation::Orientation(double w, double x, double y, double z) {
  if (!std::isfinite(w) || !finite3(x, y, z))
    throw std::invalid_argument("Orientation: non-finite component");
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (n < 1e-9) throw std::invalid_argument("Orientation: zero-norm quaternion");
  w_ = w / n;
  x_ = x / n;
  y_ = y / n;
  z_ = z / n;
  // Canonical sign: w >= 0, ties broken by the first nonzero vector part.
  bool flip = w_ < 0.0;
  if (w_ == 0.0) {
    if (x_ != 0.0)
      flip = x_ < 0.0;
    else if (y_ != 0.0)
      flip = y_ < 0.0;
    else
      flip = z_ < 0.0;
  }
  if (flip) {
    w_ = -w_;
    x_ = -x_;
    y_ = -y_;
    z_ = -z_;
  }
}

Orientation operator*(const Orientation& a, const Orientation& b) {
  return Orientation(a.w() * b.w() - a.x() * b.x() - a.y() * b.y() - a.z() * b.z(),
                     a.w() * b.x() + a.x() * b.w() + a.y() * b.z() - a.z() * b.y(),
                     a.w() * b.y() - a.x() * b.z() + a.y() * b.w() + a.z() * b.x(),
                     a.w() * b.z() + a.x() * b.y() - a.y() * b.x() + a.z() * b.w());
}

Orientation Orientation::from_euler(const EulerAngles& e) {
  if (!finite3(e.yaw, e.pitch, e.roll))
    throw std::invalid_argument("from_euler: non-finite angle");
  const Orientation qz(std::cos(e.yaw / 2), 0.0, 0.0, std::sin(e.yaw / 2));
  // Positive pitch raises the view toward +Z, i.e. rotation by -pitch about +Y.
  const Orientation qy(std::cos(e.pitch / 2), 0.0, -std::sin(e.pitch / 2), 0.0);
  const Orientation qx(std::cos(e.roll / 2), std::sin(e.roll / 2), 0.0, 0.0);
  return qz * qy * qx;
}

EulerAngles Orientation::to_euler() const {
  // Rotation matrix entries: R21 = 2(xy+wz), R11 = 1-2(y^2+z^2),
  // R31 = 2(xz-wy), R32 = 2(yz+wx), R33 = 1-2(x^2+y^2).
  const double r21 = 2.0 * (x_ * y_ + w_ * z_);
  const double r11 = 1.0 - 2.0 * (y_ * y_ + z_ * z_);
  const double r31 = 2.0 * (x_ * z_ - w_ * y_);
  const double r32 = 2.0 * (y_ * z_ + w_ * x_);
  const double r33 = 1.0 - 2.0 * (x_ * x_ + y_ * y_);
  const double sp = std::clamp(r31, -1.0, 1.0);
  EulerAngles e;
  if (std::abs(sp) > 1.0 - 1e-12) {
    // Gimbal lock: yaw and roll are coupled; report the roll = 0 member.
    const double r12 = 2.0 * (x_ * y_ - w_ * z_);
    const double r13 = 2.0 * (x_ * z_ + w_ * y_);
    e.pitch = std::copysign(kPi / 2, sp);
    e.yaw = std::atan2(-r12, -r13 * std::copysign(1.0, sp));
    e.roll = 0.0;
    return e;
  }
  e.yaw = std::atan2(r21, r11);
  e.pitch = std::asin(sp);
  e.roll = std::atan2(r32, r33);
  return e;
}

Vec3 Orientation::rotate(const Vec3& v) const {
  // v' = v + 2w (q x v) + 2 q x (q x v)
  const Vec3 q{x_, y_, z_};
  const Vec3 t = 2.0 * cross(q, v);
  return v + w_ * t + cross(q, t);
}

Vec3 Orientation::rotate_inverse(const Vec3& v) const {
  const Vec3 q{-x_, -y_, -z_};
  const Vec3 t = 2.0 * cross(q, v);
  return v + w_ * t + cross(q, t);
}

Orientation slerp(const Orientation& a, const Orientation& b, double t) {
  double d = a.w() * b.w() + a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
  double sign = 1.0;
  if (d < 0.0) {
    d = -d;
    sign = -1.0;
  }
  double sa, sb;
  if (d > 1.0 - 1e-10) {
    // Nearly parallel: linear blend, renormalized by the constructor.
    sa = 1.0 - t;
    sb = t;
  } else {
    const double theta = std::acos(std::clamp(d, -1.0, 1.0));
    const double s = std::sin(theta);
    sa = std::sin((1.0 - t) * theta) / s;
    sb = std::sin(t * theta) / s;
  }
  sb *= sign;
  return Orientation(sa * a.w() + sb * b.w(), sa * a.x() + sb * b.x(), sa * a.y() + sb * b.y(),
                     sa * a.z() + sb * b.z());
}

UnitVec view_direction(const Orientation& o) {
  const Vec3 v = o.rotate(Vec3{1.0, 0.0, 0.0});
  return UnitVec(v);
}

ViewportSpec::ViewportSpec(double h_fov_rad, double v_fov_rad) : h_fov(h_fov_rad), v_fov(v_fov_rad) {
  if (!(h_fov > 0.0 && h_fov < kPi) || !(v_fov > 0.0 && v_fov < kPi))
    throw std::invalid_argument("ViewportSpec: FoV must lie strictly inside (0, pi)");
}

ViewportSpec default_viewport_spec() {
  const double d = 100.0 * kPi / 180.0;
  return ViewportSpec(d, d);
}

ViewportFrame::ViewportFrame(const Orientation& o, const ViewportSpec& spec)
    : forward(o.rotate(Vec3{1.0, 0.0, 0.0})),
      left(o.rotate(Vec3{0.0, 1.0, 0.0})),
      up(o.rotate(Vec3{0.0, 0.0, 1.0})),
      tan_half_h(std::tan(spec.h_fov / 2)),
      tan_half_v(std::tan(spec.v_fov / 2)) {}

bool point_in_viewport(const UnitVec& p, const Orientation& o, const ViewportSpec& spec) {
  return ViewportFrame(o, spec).contains(p.vec());
}

SphereGrid SphereGrid::fibonacci(int count) {
  if (count < 1) throw std::invalid_argument("SphereGrid: count must be >= 1");
  SphereGrid grid;
  grid.points_.reserve(static_cast<std::size_t>(count));
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    grid.points_.push_back(Vec3{r * std::cos(phi), r * std::sin(phi), z});
  }
  return grid;
}

double pairwise_overlap(const Orientation& a, const Orientation& b, const ViewportSpec& spec,
                        const SphereGrid& grid) {
  const ViewportFrame fa(a, spec);
  const ViewportFrame fb(b, spec);
  long in_a = 0, in_b = 0, in_both = 0;
  for (const Vec3& p : grid.points()) {
    const bool ia = fa.contains(p);
    const bool ib = fb.contains(p);
    in_a += ia;
    in_b += ib;
    in_both += ia && ib;
  }
  if (in_a == 0 || in_b == 0)
    throw DataError("pairwise_overlap: grid too coarse for viewport spec (" +
                    std::to_string(grid.count()) + " points, empty viewport count)");
  return 2.0 * static_cast<double>(in_both) / static_cast<double>(in_a + in_b);
}

double joint_overlap(std::span<const Orientation> orientations, const ViewportSpec& spec,
                     const SphereGrid& grid) {
  if (orientations.empty()) throw std::invalid_argument("joint_overlap: empty orientation list");
  std::vector<ViewportFrame> frames;
  frames.reserve(orientations.size());
  for (const Orientation& o : orientations) frames.emplace_back(o, spec);

  std::vector<long> per_viewport(frames.size(), 0);
  long in_all = 0;
  for (const Vec3& p : grid.points()) {
    bool all = true;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const bool in = frames[i].contains(p);
      per_viewport[i] += in;
      all = all && in;
    }
    in_all += all;
  }
  long total = 0;
  for (std::size_t i = 0; i < per_viewport.size(); ++i) {
    if (per_viewport[i] == 0)
      throw DataError("joint_overlap: grid too coarse for viewport spec (viewport " +
                      std::to_string(i) + " captured no grid point)");
    total += per_viewport[i];
  }
  return static_cast<double>(in_all) * static_cast<double>(frames.size()) /
         static_cast<double>(total);
}

}  // namespace vpc
