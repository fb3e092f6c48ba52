#include "hysterix/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hysterix {

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw std::invalid_argument("TimeGrid: need at least 2 nodes");
  if (nodes_.front() != 0.0) throw std::invalid_argument("TimeGrid: first node must be 0");
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
    if (!(nodes_[k] < nodes_[k + 1]))
      throw std::invalid_argument("TimeGrid: nodes must be strictly increasing");
  }
  if (!std::isfinite(nodes_.back())) throw std::invalid_argument("TimeGrid: non-finite node");
}

TimeGrid TimeGrid::uniform(double T, std::size_t intervals) {
  if (!(T > 0.0) || intervals == 0) throw std::invalid_argument("TimeGrid::uniform: bad arguments");
  std::vector<double> n(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k)
    n[k] = T * static_cast<double>(k) / static_cast<double>(intervals);
  n.front() = 0.0;
  n.back() = T;
  return TimeGrid(std::move(n));
}

std::size_t TimeGrid::interval_of(double t) const {
  if (t < nodes_.front() || t > nodes_.back())
    throw std::domain_error("TimeGrid: t outside [0, T]");
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
  if (k == 0) return 0;  // unreachable given the range check
  k -= 1;
  if (k >= intervals()) k = intervals() - 1;  // t == T
  return k;
}

std::size_t TimeGrid::find_node(double t) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t);
  if (it != nodes_.end() && *it == t) return static_cast<std::size_t>(it - nodes_.begin());
  return npos;
}

double TimeGrid::max_spacing() const {
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) m = std::max(m, nodes_[k + 1] - nodes_[k]);
  return m;
}

double TimeGrid::min_spacing() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) m = std::min(m, nodes_[k + 1] - nodes_[k]);
  return m;
}

TimeGrid TimeGrid::merged_with(const TimeGrid& other) const {
  if (nodes_.back() != other.nodes_.back())
    throw std::invalid_argument("TimeGrid::merged_with: horizons differ");
  std::vector<double> m;
  m.reserve(nodes_.size() + other.nodes_.size());
  std::merge(nodes_.begin(), nodes_.end(), other.nodes_.begin(), other.nodes_.end(),
             std::back_inserter(m));
  m.erase(std::unique(m.begin(), m.end()), m.end());
  return TimeGrid(std::move(m));
}

TimeGrid TimeGrid::with_nodes(const std::vector<double>& extra) const {
  std::vector<double> m = nodes_;
  for (double t : extra) {
    if (t < 0.0 || t > nodes_.back())
      throw std::domain_error("TimeGrid::with_nodes: node outside [0, T]");
    m.push_back(t);
  }
  std::sort(m.begin(), m.end());
  m.erase(std::unique(m.begin(), m.end()), m.end());
  return TimeGrid(std::move(m));
}

bool TimeGrid::refines(const TimeGrid& sub) const {
  for (double t : sub.nodes_)
    if (find_node(t) == npos) return false;
  return true;
}

PLFunction::PLFunction(TimeGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("PLFunction: values/nodes size mismatch");
}

PLFunction PLFunction::constant(const TimeGrid& grid, double c) {
  return PLFunction(grid, std::vector<double>(grid.size(), c));
}

double PLFunction::eval(double t) const {
  std::size_t j = grid_.find_node(t);
  if (j != TimeGrid::npos) return values_[j];
  std::size_t k = grid_.interval_of(t);
  double t0 = grid_[k], t1 = grid_[k + 1];
  double lam = (t - t0) / (t1 - t0);
  return values_[k] + lam * (values_[k + 1] - values_[k]);
}

PLFunction PLFunction::on_grid(const TimeGrid& finer) const {
  if (!finer.refines(grid_)) throw std::invalid_argument("PLFunction::on_grid: grid not finer");
  std::vector<double> v(finer.size());
  for (std::size_t k = 0; k < finer.size(); ++k) v[k] = eval(finer[k]);
  return PLFunction(finer, std::move(v));
}

PLFunction PLFunction::with_nodes(const std::vector<double>& extra) const {
  return on_grid(grid_.with_nodes(extra));
}

double PLFunction::total_variation() const {
  double v = 0.0;
  for (std::size_t k = 0; k + 1 < values_.size(); ++k) v += std::fabs(values_[k + 1] - values_[k]);
  return v;
}

double PLFunction::bv_norm() const { return std::fabs(values_.front()) + total_variation(); }

double PLFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

PLFunction& PLFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

PLFunction& PLFunction::operator+=(const PLFunction& other) {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("PLFunction+=: grids differ");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

PLFunction add(const PLFunction& a, const PLFunction& b) {
  TimeGrid m = a.grid().merged_with(b.grid());
  PLFunction ra = a.on_grid(m), rb = b.on_grid(m);
  ra += rb;
  return ra;
}

PLFunction sub(const PLFunction& a, const PLFunction& b) { return add(a, scale(b, -1.0)); }

PLFunction scale(const PLFunction& a, double s) {
  PLFunction r = a;
  r *= s;
  return r;
}

PLFunction compose_pl(const PLFunction& u, const PLFunction& rho) {
  const TimeGrid& gr = rho.grid();
  if (rho.value(0) != 0.0 || rho.value(gr.size() - 1) != u.duration())
    throw std::invalid_argument("compose_pl: rho must map [0,T'] onto [0,T]");
  for (std::size_t k = 0; k + 1 < gr.size(); ++k)
    if (!(rho.value(k) <= rho.value(k + 1)))
      throw std::invalid_argument("compose_pl: rho must be nondecreasing");
  // pull u's nodes back through rho so the composition is linear between nodes
  std::vector<double> extra;
  for (double s : u.grid().nodes()) {
    for (std::size_t k = 0; k + 1 < gr.size(); ++k) {
      double a = rho.value(k), b = rho.value(k + 1);
      if (s > a && s < b) {
        double t = gr[k] + (gr[k + 1] - gr[k]) * (s - a) / (b - a);
        extra.push_back(t);
      }
    }
  }
  TimeGrid out = gr.with_nodes(extra);
  std::vector<double> v(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) v[k] = u.eval(rho.eval(out[k]));
  return PLFunction(out, std::move(v));
}

GridRegulated::GridRegulated(TimeGrid grid, std::vector<double> left, std::vector<double> value,
                             std::vector<double> right)
    : grid_(std::move(grid)), left_(std::move(left)), value_(std::move(value)),
      right_(std::move(right)) {
  std::size_t n = grid_.size();
  if (left_.size() != n || value_.size() != n || right_.size() != n)
    throw std::invalid_argument("GridRegulated: size mismatch");
  left_.front() = value_.front();
  right_.back() = value_.back();
}

GridRegulated GridRegulated::from_pl(const PLFunction& f) {
  return GridRegulated(f.grid(), f.values(), f.values(), f.values());
}

GridRegulated GridRegulated::constant(const TimeGrid& grid, double c) {
  std::vector<double> v(grid.size(), c);
  return GridRegulated(grid, v, v, v);
}

double GridRegulated::eval(double t, Side side) const {
  std::size_t j = grid_.find_node(t);
  if (j != TimeGrid::npos) {
    switch (side) {
      case Side::Left: return left_[j];
      case Side::Value: return value_[j];
      case Side::Right: return right_[j];
    }
  }
  std::size_t k = grid_.interval_of(t);
  double t0 = grid_[k], t1 = grid_[k + 1];
  double lam = (t - t0) / (t1 - t0);
  return right_[k] + lam * (left_[k + 1] - right_[k]);
}

GridRegulated GridRegulated::on_grid(const TimeGrid& finer) const {
  if (!finer.refines(grid_)) throw std::invalid_argument("GridRegulated::on_grid: grid not finer");
  std::size_t n = finer.size();
  std::vector<double> l(n), v(n), r(n);
  for (std::size_t k = 0; k < n; ++k) {
    double t = finer[k];
    std::size_t j = grid_.find_node(t);
    if (j != TimeGrid::npos) {
      l[k] = left_[j];
      v[k] = value_[j];
      r[k] = right_[j];
    } else {
      // interior of an old interval: the function is continuous there
      double x = eval(t, Side::Value);
      l[k] = v[k] = r[k] = x;
    }
  }
  return GridRegulated(finer, std::move(l), std::move(v), std::move(r));
}

GridRegulated GridRegulated::with_nodes(const std::vector<double>& extra) const {
  return on_grid(grid_.with_nodes(extra));
}

double GridRegulated::total_variation() const {
  double v = 0.0;
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    v += std::fabs(value_[k] - left_[k]) + std::fabs(right_[k] - value_[k]);
    if (k + 1 < grid_.size()) v += std::fabs(left_[k + 1] - right_[k]);
  }
  return v;
}

double GridRegulated::bv_norm() const { return std::fabs(value_.front()) + total_variation(); }

double GridRegulated::sup_norm() const {
  double m = 0.0;
  for (std::size_t k = 0; k < grid_.size(); ++k)
    m = std::max({m, std::fabs(left_[k]), std::fabs(value_[k]), std::fabs(right_[k])});
  return m;
}

bool GridRegulated::is_right_continuous(double tol) const {
  for (std::size_t k = 0; k < grid_.size(); ++k)
    if (std::fabs(right_[k] - value_[k]) > tol) return false;
  return true;
}

bool GridRegulated::is_left_continuous(double tol) const {
  for (std::size_t k = 0; k < grid_.size(); ++k)
    if (std::fabs(value_[k] - left_[k]) > tol) return false;
  return true;
}

double GridRegulated::max_jump() const {
  double m = 0.0;
  for (std::size_t k = 0; k < grid_.size(); ++k)
    m = std::max(m, std::fabs(value_[k] - left_[k]) + std::fabs(right_[k] - value_[k]));
  return m;
}

GridRegulated& GridRegulated::operator*=(double s) {
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    left_[k] *= s;
    value_[k] *= s;
    right_[k] *= s;
  }
  return *this;
}

GridRegulated add(const GridRegulated& a, const GridRegulated& b) {
  TimeGrid m = a.grid().merged_with(b.grid());
  GridRegulated ra = a.on_grid(m), rb = b.on_grid(m);
  std::vector<double> l(m.size()), v(m.size()), r(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    l[k] = ra.left()[k] + rb.left()[k];
    v[k] = ra.value()[k] + rb.value()[k];
    r[k] = ra.right()[k] + rb.right()[k];
  }
  return GridRegulated(m, std::move(l), std::move(v), std::move(r));
}

GridRegulated sub(const GridRegulated& a, const GridRegulated& b) {
  return add(a, scale(b, -1.0));
}

GridRegulated scale(const GridRegulated& a, double s) {
  GridRegulated r = a;
  r *= s;
  return r;
}

double sup_dist(const GridRegulated& a, const GridRegulated& b) {
  GridRegulated d = sub(a, b);
  return d.sup_norm();
}

GridRegulated interval_indicator(const TimeGrid& grid, double s, double tau, IntervalKind kind) {
  if (!(s < tau)) throw std::invalid_argument("interval_indicator: need s < tau");
  TimeGrid g = grid.with_nodes({s, tau});
  std::size_t n = g.size();
  std::vector<double> l(n, 0.0), v(n, 0.0), r(n, 0.0);
  std::size_t ks = g.find_node(s), kt = g.find_node(tau);
  for (std::size_t k = ks; k <= kt; ++k) {
    bool at_s = (k == ks), at_t = (k == kt);
    l[k] = at_s ? 0.0 : 1.0;
    r[k] = at_t ? 0.0 : 1.0;
    if (at_s)
      v[k] = (kind == IntervalKind::Closed || kind == IntervalKind::LeftClosed) ? 1.0 : 0.0;
    else if (at_t)
      v[k] = (kind == IntervalKind::Closed || kind == IntervalKind::RightClosed) ? 1.0 : 0.0;
    else
      v[k] = 1.0;
  }
  return GridRegulated(g, std::move(l), std::move(v), std::move(r));
}

GridRegulated point_indicator(const TimeGrid& grid, double t) {
  TimeGrid g = grid.with_nodes({t});
  std::size_t n = g.size();
  std::vector<double> l(n, 0.0), v(n, 0.0), r(n, 0.0);
  v[g.find_node(t)] = 1.0;
  return GridRegulated(g, std::move(l), std::move(v), std::move(r));
}

GridRegulated multiply_step(const GridRegulated& f, const GridRegulated& step) {
  TimeGrid m = f.grid().merged_with(step.grid());
  GridRegulated rf = f.on_grid(m), rs = step.on_grid(m);
  std::size_t n = m.size();
  for (std::size_t k = 0; k + 1 < n; ++k)
    if (rs.right()[k] != rs.left()[k + 1])
      throw std::invalid_argument("multiply_step: step factor not interval-constant");
  std::vector<double> l(n), v(n), r(n);
  for (std::size_t k = 0; k < n; ++k) {
    l[k] = rf.left()[k] * rs.left()[k];
    v[k] = rf.value()[k] * rs.value()[k];
    r[k] = rf.right()[k] * rs.right()[k];
  }
  return GridRegulated(m, std::move(l), std::move(v), std::move(r));
}

void HysteresisConfig::validate() const {
  if (!(r > 0.0)) throw std::domain_error("HysteresisConfig: r must be positive");
  if (std::fabs(y0) > r) throw std::domain_error("HysteresisConfig: |y0| must be <= r");
}

}  // namespace hysterix
