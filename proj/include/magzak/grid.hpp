#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "magzak/kernels.hpp"

namespace magzak {

// Spectral coefficients c_k, normalized so that f(x) = sum_k c_k exp(i k.x).
// With this scaling ||f||_{L^2}^2 = P^d sum_k |c_k|^2.
using Field = std::vector<cplx>;

// A 3-vector field; in d = 2 the grid still carries three components.
struct VectorField {
  std::array<Field, 3> c;

  Field& operator[](std::size_t i) { return c[i]; }
  const Field& operator[](std::size_t i) const { return c[i]; }
};

// Periodic box [0, P)^d sampled with N points per axis. Modes are stored in
// row-major order (axis 0 slowest), index j maps to the signed wavenumber
// index m = j for j < N/2 and m = j - N otherwise, k = (2 pi / P) m.
//
// Immutable after construction; the transform methods are safe to call from
// several threads at once.
class TorusGrid {
 public:
  TorusGrid(int dim, int points, double period);
  ~TorusGrid();
  TorusGrid(const TorusGrid&) = delete;
  TorusGrid& operator=(const TorusGrid&) = delete;

  int dim() const { return dim_; }
  int points() const { return points_; }
  double period() const { return period_; }
  std::size_t size() const { return size_; }
  double dk() const { return dk_; }
  double kmax() const { return dk_ * (points_ / 2); }
  double volume() const { return volume_; }
  double cell_volume() const { return volume_ / static_cast<double>(size_); }

  std::span<const double> k2() const { return k2_; }
  std::span<const double> k(int axis) const { return kvec_[axis]; }
  std::span<const std::uint8_t> dealias_mask() const { return mask_; }
  bool is_nyquist(std::size_t i) const { return nyquist_[i] != 0; }

  std::array<int, 3> mode_index(std::size_t i) const;
  // Linear index of signed mode index m (components beyond dim ignored).
  std::size_t index_of(const std::array<int, 3>& m) const;
  std::array<double, 3> point(std::size_t i) const;

  // Components of E and B that may be nonzero: all three in d = 3; (E1, E2)
  // and B3 in d = 2.
  std::span<const int> e_components() const;
  std::span<const int> b_components() const;

  bool same_as(const TorusGrid& other) const {
    return dim_ == other.dim_ && points_ == other.points_ && period_ == other.period_;
  }

  Field zeros() const { return Field(size_, cplx{0.0, 0.0}); }
  VectorField zero_vector() const { return {{zeros(), zeros(), zeros()}}; }

  void to_physical(std::span<const cplx> coef, std::span<cplx> out) const;
  void to_spectral(std::span<const cplx> values, std::span<cplx> out) const;
  Field to_physical(const Field& coef) const;
  Field to_spectral(const Field& values) const;

 private:
  struct Plans;

  int dim_;
  int points_;
  double period_;
  std::size_t size_;
  double dk_;
  double volume_;
  std::vector<double> k2_;
  std::array<std::vector<double>, 3> kvec_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::uint8_t> nyquist_;
  std::unique_ptr<Plans> plans_;
};

using GridPtr = std::shared_ptr<const TorusGrid>;

GridPtr make_grid(int dim, int points, double period);

}  // namespace magzak
