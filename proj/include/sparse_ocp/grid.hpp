#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sparse_ocp {

/// Uniform tensor discretization of Q = (0,1)^d x (0,T).
///
/// Only interior spatial nodes are stored (homogeneous Dirichlet data on the
/// boundary). Time levels are numbered k = 1..nt; level 0 is the initial datum
/// and is never part of a space-time field.
class SpaceTimeGrid {
 public:
  SpaceTimeGrid(int dim, int nx, int nt, double final_time);

  int dim() const { return dim_; }
  int nx() const { return nx_; }
  int nt() const { return nt_; }
  double final_time() const { return final_time_; }
  double h() const { return h_; }
  double dt() const { return dt_; }

  /// Interior node count nx^d.
  std::size_t nodes() const { return nodes_; }
  /// Quadrature weight of one spatial node, h^d.
  double node_volume() const { return node_volume_; }
  /// Discrete measure |Omega|_h = h^d nx^d.
  double omega_measure() const { return node_volume_ * static_cast<double>(nodes_); }

  double time(int k) const { return k * dt_; }
  /// Coordinate of interior node index i along axis (0-based), i in [0, nx).
  double coord(int i) const { return (i + 1) * h_; }
  /// Axis indices of flattened node n (x fastest).
  int axis_index(std::size_t n, int axis) const {
    return axis == 0 ? static_cast<int>(n % nx_) : static_cast<int>(n / nx_);
  }

  bool operator==(const SpaceTimeGrid& other) const {
    return dim_ == other.dim_ && nx_ == other.nx_ && nt_ == other.nt_ &&
           final_time_ == other.final_time_;
  }

 private:
  int dim_;
  int nx_;
  int nt_;
  double final_time_;
  double h_;
  double dt_;
  std::size_t nodes_;
  double node_volume_;
};

enum class FieldKind { SpaceTime, TerminalSlice };

/// Nodal grid function. Space-time fields hold nt levels of nodes() values,
/// terminal slices a single level.
class Field {
 public:
  static Field space_time(const SpaceTimeGrid& grid, double fill = 0.0);
  static Field terminal_slice(const SpaceTimeGrid& grid, double fill = 0.0);

  const SpaceTimeGrid& grid() const { return grid_; }
  FieldKind kind() const { return kind_; }
  bool is_slice() const { return kind_ == FieldKind::TerminalSlice; }
  int levels() const { return is_slice() ? 1 : grid_.nt(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  /// Level k in 1..nt; a terminal slice only has level 1.
  std::span<double> level(int k);
  std::span<const double> level(int k) const;
  /// Level nt of a space-time field, or the slice itself.
  std::span<const double> last_level() const { return level(levels()); }

  double& operator[](std::size_t flat) { return values_[flat]; }
  double operator[](std::size_t flat) const { return values_[flat]; }
  double& at(int k, std::size_t node) { return values_[offset(k) + node]; }
  double at(int k, std::size_t node) const { return values_[offset(k) + node]; }

  /// Copy of the last time level as a terminal slice.
  Field terminal() const;

  bool all_finite() const;
  bool same_shape(const Field& other) const {
    return grid_ == other.grid_ && kind_ == other.kind_;
  }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double c);
  /// this += c * other
  Field& axpy(double c, const Field& other);

 private:
  Field(const SpaceTimeGrid& grid, FieldKind kind, double fill);
  std::size_t offset(int k) const { return static_cast<std::size_t>(k - 1) * grid_.nodes(); }

  SpaceTimeGrid grid_;
  FieldKind kind_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double c, Field a);

enum class NormKind { L1, L2, Linf };
enum class Domain { Q, OmegaT };

/// Mass-lumped discrete norms: weight h^d dt per space-time node, h^d per
/// slice node. Domain::OmegaT of a space-time field uses level nt.
double norm(const Field& f, NormKind which, Domain domain = Domain::Q);

/// Space-time pairing sum_k sum_i h^d dt f g.
double inner_Q(const Field& f, const Field& g);
/// Pairing on Omega of two slices (or the last levels of space-time fields).
double inner_Omega(const Field& f, const Field& g);

/// Throws InvalidInput unless the field is finite.
void require_finite(const Field& f, const char* what);

}  // namespace sparse_ocp
