#include "sdnls/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "sdnls/errors.hpp"
#include "sdnls/spectral.hpp"

namespace sdnls {

TorusGrid::TorusGrid(int dim, std::vector<int> points_per_axis,
                     std::vector<double> axis_lengths)
    : dim_(dim),
      points_(std::move(points_per_axis)),
      lengths_(std::move(axis_lengths)) {
  if (dim_ < 1 || dim_ > 3) {
    throw ConfigError("grid dimension must be 1, 2 or 3, got " +
                      std::to_string(dim_));
  }
  if (points_.size() != static_cast<std::size_t>(dim_) ||
      lengths_.size() != static_cast<std::size_t>(dim_)) {
    std::ostringstream msg;
    msg << "grid dimension " << dim_ << " needs " << dim_
        << " point counts and lengths, got " << points_.size() << " and "
        << lengths_.size();
    throw ConfigError(msg.str());
  }
  for (int a = 0; a < dim_; ++a) {
    if (points_[a] < 4 || points_[a] % 2 != 0) {
      throw ConfigError("points per axis must be even and >= 4, got " +
                        std::to_string(points_[a]));
    }
    if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a])) {
      std::ostringstream msg;
      msg << "axis length must be positive, got " << lengths_[a];
      throw ConfigError(msg.str());
    }
    size_ *= static_cast<std::size_t>(points_[a]);
    volume_ *= lengths_[a];
  }
  cell_volume_ = volume_ / static_cast<double>(size_);

  k2_.assign(size_, 0.0);
  for (std::size_t flat = 0; flat < size_; ++flat) {
    const auto idx = unflatten(flat);
    double k2 = 0.0;
    for (int a = 0; a < dim_; ++a) {
      const double k =
          2.0 * std::numbers::pi * frequency_index(a, idx[a]) / lengths_[a];
      k2 += k * k;
    }
    k2_[flat] = k2;
  }
  plan_ = std::make_shared<const FftPlan>(points_);
}

int TorusGrid::frequency_index(int axis, int n) const {
  const int N = points_[axis];
  return n < N / 2 ? n : n - N;
}

std::array<int, 3> TorusGrid::unflatten(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(points_[a]));
    flat /= static_cast<std::size_t>(points_[a]);
  }
  return idx;
}

std::size_t TorusGrid::flatten(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) {
    const int N = points_[a];
    const int wrapped = ((idx[a] % N) + N) % N;
    flat = flat * static_cast<std::size_t>(N) + static_cast<std::size_t>(wrapped);
  }
  return flat;
}

double TorusGrid::coordinate(int axis, int n) const {
  return lengths_[axis] * n / points_[axis];
}

bool TorusGrid::operator==(const TorusGrid& other) const noexcept {
  return dim_ == other.dim_ && points_ == other.points_ &&
         lengths_ == other.lengths_;
}

GridPtr make_grid(int dim, const std::vector<int>& points_per_axis,
                  const std::vector<double>& axis_lengths) {
  return std::make_shared<const TorusGrid>(dim, points_per_axis, axis_lengths);
}

}  // namespace sdnls
