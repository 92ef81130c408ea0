#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace arnold {

using cplx = std::complex<double>;

/// Which coordinate a frame is sampled in: physical x at time t, or the
/// transformed kappa at time tau.
enum class Picture { position, kappa };

std::string_view to_string(Picture p);
Picture picture_from_string(std::string_view s);

/// Uniform 1-D grid of n >= 16 nodes on [x_min, x_max].
class Grid {
 public:
  Grid() = default;
  /// Throws InvalidArgument unless n >= 16 and x_min < x_max (both finite).
  Grid(double x_min, double x_max, std::size_t n);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return dx_; }
  double x(std::size_t i) const noexcept { return i + 1 == n_ ? x_max_ : x_min_ + dx_ * static_cast<double>(i); }
  std::vector<double> nodes() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double x_min_ = 0.0;
  double x_max_ = 1.0;
  std::size_t n_ = 0;
  double dx_ = 0.0;
};

/// Complex samples of a wavefunction on a grid at one time.
struct WaveFrame {
  Grid grid;
  std::vector<cplx> values;
  double time = 0.0;
  Picture picture = Picture::position;

  /// Throws GridError when the sample count does not match the grid.
  void validate() const;
};

/// Samples `fn(x)` on every node.
WaveFrame sample_frame(const Grid& grid, const std::function<cplx(double)>& fn, double time,
                       Picture picture = Picture::position);

/// Quadrature weights: composite Simpson for odd n; for even n, Simpson on the
/// first n-4 intervals and Simpson 3/8 on the last three.
std::vector<double> simpson_weights(std::size_t n, double h);

/// Integral of real samples on the grid with `simpson_weights`.
double integrate(const Grid& grid, std::span<const double> values);

/// <a, b> = integral of conj(a) b. Throws GridError unless grid, time and
/// picture agree.
cplx inner_product(const WaveFrame& a, const WaveFrame& b);
/// Same quadrature on raw samples (no metadata check beyond the size).
cplx inner_product(const Grid& grid, std::span<const cplx> a, std::span<const cplx> b);
double norm(const WaveFrame& a);
double norm(const Grid& grid, std::span<const cplx> a);
/// ||a - b|| / ||b|| on a shared grid.
double relative_l2(const WaveFrame& a, const WaveFrame& b);

/// Cubic-spline resampling of Re and Im separately. The spline is clamped with
/// fourth-order one-sided end slopes. Nodes outside the source grid's hull
/// receive 0; an identical target grid returns the values unchanged.
WaveFrame resample(const WaveFrame& frame, const Grid& new_grid);

/// Interpolator over one frame's samples, reusable for many evaluation points.
class ComplexSpline {
 public:
  explicit ComplexSpline(const WaveFrame& frame);
  /// 0 outside [x_min, x_max].
  cplx operator()(double x) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Five-point derivative stencils, O(h^4) in the interior, one-sided near the
/// ends.
std::vector<cplx> first_derivative(std::span<const cplx> v, double h);
std::vector<cplx> second_derivative(std::span<const cplx> v, double h);

/// Throws InvalidArgument when |psi| on the two outermost nodes at either end
/// exceeds `rel` times max |psi|.
void check_boundary_decay(const WaveFrame& frame, double rel = 1e-6);

/// Hamiltonian action psi -> H(t) psi on a frame's samples.
using HamiltonianApply = std::function<std::vector<cplx>(double t, const WaveFrame& frame)>;

/// ||i hbar (psi_+ - psi_-)/(2 dt) - H(t) psi_0|| / ||psi_0|| for frames at
/// t - dt, t, t + dt on one grid. Throws GridError on mismatched grids,
/// pictures or unevenly spaced times.
double schrodinger_residual(const std::array<WaveFrame, 3>& frames, const HamiltonianApply& h_apply,
                            double hbar = 1.0);

/// Frame CSV: `# t=<value>`, `# picture=<x|kappa>`, header `x,re,im`, then one
/// row per node with 17 significant digits.
void write_frame_csv(std::ostream& out, const WaveFrame& frame);
void write_frame_csv(const std::string& path, const WaveFrame& frame);
/// Throws Error on malformed input or a non-uniform node sequence.
WaveFrame read_frame_csv(std::istream& in);
WaveFrame read_frame_csv(const std::string& path);

}  // namespace arnold
