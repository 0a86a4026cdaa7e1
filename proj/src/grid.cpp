#include "sparse_ocp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparse_ocp/error.hpp"

namespace sparse_ocp {

SpaceTimeGrid::SpaceTimeGrid(int dim, int nx, int nt, double final_time)
    : dim_(dim), nx_(nx), nt_(nt), final_time_(final_time) {
  if (dim != 1 && dim != 2) throw InvalidInput("grid: dimension must be 1 or 2");
  if (nx < 1) throw InvalidInput("grid: nx must be >= 1");
  if (nt < 1) throw InvalidInput("grid: nt must be >= 1");
  if (!(final_time > 0.0) || !std::isfinite(final_time))
    throw InvalidInput("grid: final time must be positive");
  h_ = 1.0 / (nx + 1);
  dt_ = final_time / nt;
  nodes_ = dim == 1 ? static_cast<std::size_t>(nx) : static_cast<std::size_t>(nx) * nx;
  node_volume_ = dim == 1 ? h_ : h_ * h_;
}

Field::Field(const SpaceTimeGrid& grid, FieldKind kind, double fill)
    : grid_(grid),
      kind_(kind),
      values_(kind == FieldKind::SpaceTime ? grid.nodes() * grid.nt() : grid.nodes(), fill) {}

Field Field::space_time(const SpaceTimeGrid& grid, double fill) {
  return Field(grid, FieldKind::SpaceTime, fill);
}

Field Field::terminal_slice(const SpaceTimeGrid& grid, double fill) {
  return Field(grid, FieldKind::TerminalSlice, fill);
}

std::span<double> Field::level(int k) {
  return std::span<double>(values_).subspan(offset(k), grid_.nodes());
}

std::span<const double> Field::level(int k) const {
  return std::span<const double>(values_).subspan(offset(k), grid_.nodes());
}

Field Field::terminal() const {
  Field slice = terminal_slice(grid_);
  std::ranges::copy(last_level(), slice.values_.begin());
  return slice;
}

bool Field::all_finite() const {
  return std::ranges::all_of(values_, [](double v) { return std::isfinite(v); });
}

namespace {
void require_same(const Field& a, const Field& b, const char* op) {
  if (!a.same_shape(b)) throw InvalidInput(std::string(op) + ": field shape/grid mismatch");
}
}  // namespace

Field& Field::operator+=(const Field& other) {
  require_same(*this, other, "operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same(*this, other, "operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

Field& Field::axpy(double c, const Field& other) {
  require_same(*this, other, "axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += c * other.values_[i];
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double c, Field a) { return a *= c; }

void require_finite(const Field& f, const char* what) {
  if (!f.all_finite()) throw InvalidInput(std::string(what) + ": field has non-finite entries");
}

double norm(const Field& f, NormKind which, Domain domain) {
  require_finite(f, "norm");
  const SpaceTimeGrid& g = f.grid();
  std::span<const double> vals;
  double weight = g.node_volume();
  if (domain == Domain::OmegaT) {
    vals = f.last_level();
  } else {
    if (f.is_slice()) throw InvalidInput("norm: Q-norm requested for a terminal slice");
    vals = f.values();
    weight *= g.dt();
  }
  switch (which) {
    case NormKind::L1: {
      double s = 0.0;
      for (double v : vals) s += std::abs(v);
      return weight * s;
    }
    case NormKind::L2: {
      double s = 0.0;
      for (double v : vals) s += v * v;
      return std::sqrt(weight * s);
    }
    case NormKind::Linf: {
      double m = 0.0;
      for (double v : vals) m = std::max(m, std::abs(v));
      return m;
    }
  }
  return 0.0;
}

double inner_Q(const Field& f, const Field& g) {
  if (!(f.grid() == g.grid()) || f.is_slice() || g.is_slice())
    throw InvalidInput("inner_Q: fields must be space-time fields on the same grid");
  auto a = f.values();
  auto b = g.values();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return f.grid().node_volume() * f.grid().dt() * s;
}

double inner_Omega(const Field& f, const Field& g) {
  if (!(f.grid() == g.grid())) throw InvalidInput("inner_Omega: grid mismatch");
  auto a = f.last_level();
  auto b = g.last_level();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return f.grid().node_volume() * s;
}

}  // namespace sparse_ocp
