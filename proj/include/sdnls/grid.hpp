#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace sdnls {

class FftPlan;

/// Uniform grid on the flat torus T^d = prod_j R / L_j Z, d in {1, 2, 3}.
///
/// Cells are stored row-major with the last axis fastest. Frequency indices
/// follow the FFT ordering: storage index n maps to m = n for n < N/2 and
/// m = n - N otherwise, so the Nyquist index N/2 is assigned to -N/2.
class TorusGrid {
 public:
  TorusGrid(int dim, std::vector<int> points_per_axis,
            std::vector<double> axis_lengths);

  int dim() const noexcept { return dim_; }
  const std::vector<int>& points() const noexcept { return points_; }
  const std::vector<double>& lengths() const noexcept { return lengths_; }
  std::size_t size() const noexcept { return size_; }
  double volume() const noexcept { return volume_; }
  double cell_volume() const noexcept { return cell_volume_; }

  /// |k|^2 for every storage index of the spectral array.
  const std::vector<double>& wavenumber_sq() const noexcept { return k2_; }

  /// Signed integer frequency index along one axis for storage index n.
  int frequency_index(int axis, int n) const;
  /// Multi-index of a flat storage position.
  std::array<int, 3> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::array<int, 3>& idx) const;
  /// Physical coordinate of a cell centre along one axis.
  double coordinate(int axis, int n) const;

  const FftPlan& plan() const { return *plan_; }

  bool operator==(const TorusGrid& other) const noexcept;

 private:
  int dim_;
  std::vector<int> points_;
  std::vector<double> lengths_;
  std::size_t size_ = 1;
  double volume_ = 1.0;
  double cell_volume_ = 1.0;
  std::vector<double> k2_;
  std::shared_ptr<const FftPlan> plan_;
};

using GridPtr = std::shared_ptr<const TorusGrid>;

/// Validates the inputs and builds a shared grid. Throws ConfigError.
GridPtr make_grid(int dim, const std::vector<int>& points_per_axis,
                  const std::vector<double>& axis_lengths);

}  // namespace sdnls
