#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace hysterix {

// Evaluation side for functions that can jump at grid nodes.
enum class Side { Left, Value, Right };

// Strictly increasing node vector t_0 = 0 < t_1 < ... < t_N = T.
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> nodes);
  static TimeGrid uniform(double T, std::size_t intervals);

  std::size_t size() const { return nodes_.size(); }
  std::size_t intervals() const { return nodes_.size() - 1; }
  double operator[](std::size_t k) const { return nodes_[k]; }
  const std::vector<double>& nodes() const { return nodes_; }
  double duration() const { return nodes_.back(); }

  // Largest k with t_k <= t and k < intervals(); t must lie in [0, T].
  std::size_t interval_of(double t) const;
  // Index of an exact node match, or npos.
  std::size_t find_node(double t) const;
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  // Coarsest spacing max_k (t_{k+1} - t_k).
  double max_spacing() const;
  double min_spacing() const;

  TimeGrid merged_with(const TimeGrid& other) const;
  TimeGrid with_nodes(const std::vector<double>& extra) const;
  // True if every node of sub is a node of *this.
  bool refines(const TimeGrid& sub) const;

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.nodes_ == b.nodes_;
  }

 private:
  std::vector<double> nodes_;
};

// Continuous piecewise linear function given by node values.
class PLFunction {
 public:
  PLFunction() = default;
  PLFunction(TimeGrid grid, std::vector<double> values);
  static PLFunction constant(const TimeGrid& grid, double c);

  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double value(std::size_t k) const { return values_[k]; }
  double duration() const { return grid_.duration(); }

  double eval(double t) const;
  double eval(double t, Side) const { return eval(t); }

  // Exact re-representation on a finer grid (must contain all current nodes).
  PLFunction on_grid(const TimeGrid& finer) const;
  PLFunction with_nodes(const std::vector<double>& extra) const;

  double total_variation() const;
  // |f(0)| + total variation
  double bv_norm() const;
  double sup_norm() const;

  PLFunction& operator*=(double s);
  PLFunction& operator+=(const PLFunction& other);  // requires equal grids

 private:
  TimeGrid grid_;
  std::vector<double> values_;
};

PLFunction add(const PLFunction& a, const PLFunction& b);
PLFunction sub(const PLFunction& a, const PLFunction& b);
PLFunction scale(const PLFunction& a, double s);
// Composition u(rho(t)) for increasing rho with rho(0)=0, rho(T')=T.
PLFunction compose_pl(const PLFunction& u, const PLFunction& rho);

// Regulated grid function: per node a left limit, a value and a right limit,
// linear on each open interval between right_k and left_{k+1}. Conventions
// left_0 = value_0 and right_N = value_N are enforced on construction.
class GridRegulated {
 public:
  GridRegulated() = default;
  GridRegulated(TimeGrid grid, std::vector<double> left, std::vector<double> value,
                std::vector<double> right);
  static GridRegulated from_pl(const PLFunction& f);
  static GridRegulated constant(const TimeGrid& grid, double c);

  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& left() const { return left_; }
  const std::vector<double>& value() const { return value_; }
  const std::vector<double>& right() const { return right_; }
  double duration() const { return grid_.duration(); }

  double eval(double t, Side side = Side::Value) const;

  GridRegulated on_grid(const TimeGrid& finer) const;
  GridRegulated with_nodes(const std::vector<double>& extra) const;

  double total_variation() const;
  double bv_norm() const;
  double sup_norm() const;

  bool is_right_continuous(double tol) const;
  bool is_left_continuous(double tol) const;
  // max_k |value_k - left_k| + |right_k - value_k| (zero for continuous data)
  double max_jump() const;

  GridRegulated& operator*=(double s);

 private:
  TimeGrid grid_;
  std::vector<double> left_, value_, right_;
};

GridRegulated add(const GridRegulated& a, const GridRegulated& b);
GridRegulated sub(const GridRegulated& a, const GridRegulated& b);
GridRegulated scale(const GridRegulated& a, double s);
// max over nodes and limits of |a - b| on the merged grid
double sup_dist(const GridRegulated& a, const GridRegulated& b);

enum class IntervalKind { Open, Closed, LeftClosed, RightClosed };

// 0/1 indicator of the interval between s and tau (both must become nodes).
GridRegulated interval_indicator(const TimeGrid& grid, double s, double tau,
                                 IntervalKind kind);
// Indicator of the single point t.
GridRegulated point_indicator(const TimeGrid& grid, double t);
// Pointwise product f*s where s must be constant on every open interval.
GridRegulated multiply_step(const GridRegulated& f, const GridRegulated& step);

// Hysteresis data: half width r of the admissible band [-r, r] and the
// initial state y0 with |y0| <= r.
struct HysteresisConfig {
  double r = 1.0;
  double y0 = 0.0;
  void validate() const;
};

}  // namespace hysterix
