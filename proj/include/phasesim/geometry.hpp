#pragma once

namespace phasesim {

/// Axis-aligned rectangle in screen coordinates (meters).
struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return z_max - z_min; }
  double area() const { return width() * height(); }

  bool contains(double x, double z) const {
    return x >= x_min && x <= x_max && z >= z_min && z <= z_max;
  }

  bool intersects(const Rect& other) const {
    return x_min <= other.x_max && other.x_min <= x_max && z_min <= other.z_max &&
           other.z_min <= z_max;
  }

  bool operator==(const Rect&) const = default;
};

}  // namespace phasesim
