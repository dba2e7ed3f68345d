#pragma once

#include "rds/geometry.hpp"

namespace rds::detail {

class SupportImpl {
 public:
  virtual ~SupportImpl() = default;
  virtual SupportKind kind() const = 0;
  virtual int dimension() const { return 2; }
  virtual std::string describe() const = 0;
  virtual double signed_distance(Vec2 x) const = 0;
  virtual bool contains(Vec2 x) const { return signed_distance(x) <= 0.0; }
  virtual double distance(Vec2 x) const { return std::max(0.0, signed_distance(x)); }
  virtual std::optional<double> graph(double) const { return std::nullopt; }
  virtual std::vector<Vec2> projections(Vec2 x) const;
  virtual std::optional<std::vector<Arc>> asymptotic_arcs() const = 0;
  // Single point sets give an opening of -inf by convention.
  virtual bool is_singleton() const { return false; }
  // Region where the set is actually known (masks).
  virtual std::optional<Window> known_window() const { return std::nullopt; }
  // Grid spacing for rasters, 0 for analytic sets.
  virtual double resolution() const { return 0.0; }
};

}  // namespace rds::detail
