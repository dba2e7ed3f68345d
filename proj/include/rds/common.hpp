#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rds {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

// Error hierarchy. Everything thrown by the library derives from Error so the
// CLI can report a single category line.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure could not decide (step budget, resolution).
class Inconclusive : public Error {
 public:
  using Error::Error;
};

// The discrete scheme violated one of its soundness guarantees.
class SchemeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, int line = 0, int column = 0)
      : Error(line > 0 ? msg + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"
                       : msg),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Points in R^1 or R^2. The last coordinate is x_N: `y` in the plane, `x` on
// the line (where `y` stays zero).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) {
  const double n = norm(a);
  return n > 0.0 ? a / n : Vec2{};
}
inline Vec2 unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

// Angle of a planar direction measured from e_N = (0,1), positive towards +x'.
inline double angle_from_vertical(Vec2 e) { return std::atan2(e.x, e.y); }
inline Vec2 from_vertical_angle(double theta) { return {std::sin(theta), std::cos(theta)}; }

}  // namespace rds
