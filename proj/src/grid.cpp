#include "rsir/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsir {

namespace {
constexpr double kSnapRel = 1e-9;

bool near_integer(double v, double tol) {
  return std::abs(v - std::round(v)) <= tol;
}
}  // namespace

Grid::Grid(double age_max, int cells_per_unit_age, double time_horizon,
           std::vector<double> interior_interfaces)
    : age_max_(age_max), horizon_(time_horizon), cells_(cells_per_unit_age) {
  if (age_max <= 0 || cells_per_unit_age <= 0 || time_horizon < 0)
    throw std::invalid_argument("Grid: age_max, resolution, horizon must be positive");
  h_ = 1.0 / cells_per_unit_age;

  const double tol = kSnapRel * std::max(1.0, age_max);
  if (!near_integer(age_max * cells_, tol * cells_))
    throw std::invalid_argument("Grid: age_max must be a whole number of cells");
  if (!near_integer(time_horizon * cells_, tol * cells_))
    throw std::invalid_argument("Grid: horizon must be a whole number of time steps");
  time_steps_ = static_cast<int>(std::llround(time_horizon * cells_));

  bounds_.push_back(0.0);
  double prev = 0.0;
  for (double a : interior_interfaces) {
    if (a <= prev || a >= age_max)
      throw std::invalid_argument("Grid: interfaces must be strictly increasing inside (0, age_max)");
    if (!near_integer(a * cells_, tol * cells_))
      throw std::invalid_argument("Grid: interface does not coincide with a mesh node");
    bounds_.push_back(a);
    prev = a;
  }
  bounds_.push_back(age_max);

  total_nodes_ = 0;
  for (std::size_t j = 0; j + 1 < bounds_.size(); ++j) {
    int c = static_cast<int>(std::llround((bounds_[j + 1] - bounds_[j]) * cells_));
    seg_cells_.push_back(c);
    seg_offset_.push_back(total_nodes_);
    total_nodes_ += c + 1;
  }
}

bool Grid::aligned(double x) const {
  const double tol = kSnapRel * std::max(1.0, age_max_);
  return near_integer(x * cells_, tol * cells_) && x >= -tol && x <= age_max_ + tol;
}

int Grid::node_index(double x) const {
  if (!aligned(x)) throw std::invalid_argument("Grid: value is not on a mesh node");
  return static_cast<int>(std::llround(x * cells_));
}

bool Grid::operator==(const Grid& o) const {
  return age_max_ == o.age_max_ && cells_ == o.cells_ && horizon_ == o.horizon_ &&
         bounds_ == o.bounds_;
}

GridFunction::GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_->total_nodes())
    throw std::invalid_argument("GridFunction: value count does not match grid");
}

GridFunction GridFunction::zero(std::shared_ptr<const Grid> grid) {
  std::vector<double> v(grid->total_nodes(), 0.0);
  return GridFunction(std::move(grid), std::move(v));
}

GridFunction GridFunction::sample(std::shared_ptr<const Grid> grid,
                                  const std::function<double(double)>& f) {
  std::vector<double> v(grid->total_nodes());
  for (int j = 0; j < grid->segments(); ++j) {
    int off = grid->segment_offset(j);
    for (int i = 0; i < grid->segment_nodes(j); ++i) v[off + i] = f(grid->node_age(j, i));
  }
  return GridFunction(std::move(grid), std::move(v));
}

std::span<const double> GridFunction::segment(int j) const {
  return {values_.data() + grid_->segment_offset(j),
          static_cast<std::size_t>(grid_->segment_nodes(j))};
}

std::span<double> GridFunction::segment(int j) {
  return {values_.data() + grid_->segment_offset(j),
          static_cast<std::size_t>(grid_->segment_nodes(j))};
}

double GridFunction::left_trace(int j) const {
  if (j < 1 || j >= grid_->segments())
    throw std::invalid_argument("left_trace: interface index out of range");
  return values_[grid_->segment_offset(j - 1) + grid_->segment_cells(j - 1)];
}

double GridFunction::right_trace(int j) const {
  if (j < 1 || j >= grid_->segments())
    throw std::invalid_argument("right_trace: interface index out of range");
  return values_[grid_->segment_offset(j)];
}

double GridFunction::l1() const {
  const double h = grid_->cell_width();
  double acc = 0.0;
  for (int j = 0; j < grid_->segments(); ++j) {
    auto s = segment(j);
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
      acc += 0.5 * h * (std::abs(s[i]) + std::abs(s[i + 1]));
  }
  return acc;
}

double GridFunction::integral() const {
  const double h = grid_->cell_width();
  double acc = 0.0;
  for (int j = 0; j < grid_->segments(); ++j) {
    auto s = segment(j);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) acc += 0.5 * h * (s[i] + s[i + 1]);
  }
  return acc;
}

double GridFunction::linf() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::min_value() const {
  double m = values_.empty() ? 0.0 : values_[0];
  for (double v : values_) m = std::min(m, v);
  return m;
}

double GridFunction::tv() const {
  double acc = 0.0;
  for (int j = 0; j < grid_->segments(); ++j) {
    auto s = segment(j);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) acc += std::abs(s[i + 1] - s[i]);
  }
  for (int j = 1; j < grid_->segments(); ++j)
    acc += std::abs(right_trace(j) - left_trace(j));
  return acc;
}

GridFunction GridFunction::refined(std::shared_ptr<const Grid> fine) const {
  const Grid& g = *grid_;
  if (fine->segment_bounds() != g.segment_bounds() ||
      fine->cells_per_unit_age() % g.cells_per_unit_age() != 0)
    throw std::invalid_argument("refined: not a compatible refinement");
  int ratio = fine->cells_per_unit_age() / g.cells_per_unit_age();
  std::vector<double> v(fine->total_nodes());
  for (int j = 0; j < g.segments(); ++j) {
    auto coarse = segment(j);
    int off = fine->segment_offset(j);
    for (int i = 0; i < fine->segment_nodes(j); ++i) {
      int ic = i / ratio, r = i % ratio;
      if (r == 0)
        v[off + i] = coarse[ic];
      else {
        double w = static_cast<double>(r) / ratio;
        v[off + i] = (1.0 - w) * coarse[ic] + w * coarse[ic + 1];
      }
    }
  }
  return GridFunction(std::move(fine), std::move(v));
}

double l1_norm(const GridFunction& f) { return f.l1(); }
double total_variation(const GridFunction& f) { return f.tv(); }
double sup_norm(const GridFunction& f) { return f.linf(); }

double l1_distance(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("l1_distance: grids differ");
  const double h = a.grid().cell_width();
  double acc = 0.0;
  for (int j = 0; j < a.grid().segments(); ++j) {
    auto sa = a.segment(j), sb = b.segment(j);
    for (std::size_t i = 0; i + 1 < sa.size(); ++i)
      acc += 0.5 * h * (std::abs(sa[i] - sb[i]) + std::abs(sa[i + 1] - sb[i + 1]));
  }
  return acc;
}

double l1_distance(std::span<const double> a, std::span<const double> b, double h) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i)
    acc += 0.5 * h * (std::abs(a[i] - b[i]) + std::abs(a[i + 1] - b[i + 1]));
  return acc;
}

double SIRState::min_value() const {
  return std::min({S.min_value(), I.min_value(), R.min_value()});
}

double SIRState::total_mass() const {
  return S.integral() + I.integral() + R.integral();
}

}  // namespace rsir
