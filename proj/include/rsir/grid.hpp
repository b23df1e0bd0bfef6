#ifndef RSIR_GRID_HPP
#define RSIR_GRID_HPP

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace rsir {

/// Segmented age mesh plus a time mesh.
///
/// The age axis [0, age_max] is split at the vaccination ages
/// 0 = a_0 < a_1 < ... < a_N < a_{N+1} = age_max. Every segment carries its
/// own closed node range, so interior interfaces are double-valued: the last
/// node of segment j-1 is the left trace at a_j and the first node of
/// segment j is the right trace. The time step equals the age cell width
/// (unit-speed characteristics pass exactly through nodes).
class Grid {
 public:
  Grid(double age_max, int cells_per_unit_age, double time_horizon,
       std::vector<double> interior_interfaces = {});

  double age_max() const { return age_max_; }
  int cells_per_unit_age() const { return cells_; }
  double cell_width() const { return h_; }
  double dt() const { return h_; }
  double horizon() const { return horizon_; }
  int time_steps() const { return time_steps_; }
  double time_node(int k) const { return k * h_; }

  int segments() const { return static_cast<int>(seg_cells_.size()); }
  const std::vector<double>& segment_bounds() const { return bounds_; }
  double segment_start(int j) const { return bounds_[j]; }
  double segment_length(int j) const { return bounds_[j + 1] - bounds_[j]; }
  int segment_cells(int j) const { return seg_cells_[j]; }
  int segment_nodes(int j) const { return seg_cells_[j] + 1; }
  int segment_offset(int j) const { return seg_offset_[j]; }
  int total_nodes() const { return total_nodes_; }
  double node_age(int j, int i) const { return bounds_[j] + i * h_; }

  /// True when x sits on a mesh node (up to a relative snap tolerance).
  bool aligned(double x) const;
  /// Index of the mesh node nearest to x; throws if x is not aligned.
  int node_index(double x) const;

  bool operator==(const Grid& o) const;

 private:
  double age_max_, h_, horizon_;
  int cells_, time_steps_, total_nodes_;
  std::vector<double> bounds_;
  std::vector<int> seg_cells_;
  std::vector<int> seg_offset_;
};

/// Piecewise-linear nodal function of age on a Grid, double-valued at
/// interior interfaces. L1/Linf/TV are exact for this representative; TV
/// counts interface jumps |right - left|.
class GridFunction {
 public:
  GridFunction() = default;  // empty; assign before use
  GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values);
  static GridFunction zero(std::shared_ptr<const Grid> grid);
  static GridFunction sample(std::shared_ptr<const Grid> grid,
                             const std::function<double(double)>& f);

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::span<const double> segment(int j) const;
  std::span<double> segment(int j);
  double operator[](int flat) const { return values_[flat]; }

  /// One-sided traces at interior interface a_j (j = 1..N).
  double left_trace(int j) const;
  double right_trace(int j) const;

  double l1() const;
  double linf() const;
  double tv() const;
  double integral() const;  // signed trapezoid
  double min_value() const;

  /// Same nodal values reinterpreted on a refined grid (ratio x cells per
  /// unit age, same bounds): samples the piecewise-linear interpolant, so
  /// l1() and tv() are preserved exactly.
  GridFunction refined(std::shared_ptr<const Grid> fine) const;

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
};

double l1_norm(const GridFunction& f);
double total_variation(const GridFunction& f);
double sup_norm(const GridFunction& f);
double l1_distance(const GridFunction& a, const GridFunction& b);

/// Trapezoid L1 distance between plain nodal vectors on a uniform mesh.
double l1_distance(std::span<const double> a, std::span<const double> b,
                   double h);

/// (S, I, R) at one time; the three share one grid.
struct SIRState {
  GridFunction S, I, R;
  double time = 0.0;

  double min_value() const;
  double total_mass() const;  // integral of S + I + R
};

}  // namespace rsir

#endif
