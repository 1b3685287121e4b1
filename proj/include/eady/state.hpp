#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eady {

/// The five prognostic fields on the C-grid, stored in one contiguous buffer
/// so the implicit solver can treat a state as a flat vector.
///
/// Layout (each block column-contiguous, index i * rows + k):
///   u      x-faces   nx * nz        (face i is the west face of cell i)
///   w      z-faces   nx * (nz + 1)  (row 0 is z = 0, row nz is z = H)
///   v      centres   nx * nz
///   theta  centres   nx * nz
///   rho    centres   nx * nz        (density D)
class Fields {
 public:
  Fields() = default;
  Fields(int nx, int nz);

  int nx() const { return nx_; }
  int nz() const { return nz_; }
  std::size_t size() const { return data_.size(); }
  std::size_t cells() const { return static_cast<std::size_t>(nx_) * nz_; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  std::span<double> u() { return block(0, cells()); }
  std::span<double> w() { return block(w_offset(), w_size()); }
  std::span<double> v() { return block(v_offset(), cells()); }
  std::span<double> theta() { return block(v_offset() + cells(), cells()); }
  std::span<double> rho() { return block(v_offset() + 2 * cells(), cells()); }
  std::span<const double> u() const { return block(0, cells()); }
  std::span<const double> w() const { return block(w_offset(), w_size()); }
  std::span<const double> v() const { return block(v_offset(), cells()); }
  std::span<const double> theta() const { return block(v_offset() + cells(), cells()); }
  std::span<const double> rho() const { return block(v_offset() + 2 * cells(), cells()); }

  std::size_t c(int i, int k) const { return static_cast<std::size_t>(i) * nz_ + k; }
  std::size_t wf(int i, int k) const { return static_cast<std::size_t>(i) * (nz_ + 1) + k; }

  void fill(double value);
  bool operator==(const Fields& other) const = default;

 private:
  std::size_t w_offset() const { return cells(); }
  std::size_t w_size() const { return static_cast<std::size_t>(nx_) * (nz_ + 1); }
  std::size_t v_offset() const { return w_offset() + w_size(); }
  std::span<double> block(std::size_t off, std::size_t n) { return {data_.data() + off, n}; }
  std::span<const double> block(std::size_t off, std::size_t n) const {
    return {data_.data() + off, n};
  }

  int nx_ = 0;
  int nz_ = 0;
  std::vector<double> data_;
};

/// Prognostic state plus model time (s).
class State : public Fields {
 public:
  using Fields::Fields;
  double t = 0.0;
  bool operator==(const State& other) const = default;
};

/// Time derivative of every prognostic field, same layout as State.
class Tendency : public Fields {
 public:
  using Fields::Fields;
};

/// Zeroes w on the z = 0 and z = H face rows.
void zero_boundary_w(Fields& f);

}  // namespace eady
