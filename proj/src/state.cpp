#include "eady/state.hpp"

#include <algorithm>

namespace eady {

Fields::Fields(int nx, int nz)
    : nx_(nx), nz_(nz), data_(static_cast<std::size_t>(nx) * nz * 4 + static_cast<std::size_t>(nx) * (nz + 1), 0.0) {}

void Fields::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void zero_boundary_w(Fields& f) {
  auto w = f.w();
  for (int i = 0; i < f.nx(); ++i) {
    w[f.wf(i, 0)] = 0.0;
    w[f.wf(i, f.nz())] = 0.0;
  }
}

}  // namespace eady
