#include "arnold/wavefield.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "arnold/error.hpp"

namespace arnold {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_same(const WaveFrame& a, const WaveFrame& b, const char* what) {
  a.validate();
  b.validate();
  if (!(a.grid == b.grid)) throw GridError(std::string(what) + ": frames live on different grids");
  if (a.picture != b.picture) throw GridError(std::string(what) + ": frames are in different pictures");
}

}  // namespace

std::string_view to_string(Picture p) { return p == Picture::position ? "x" : "kappa"; }

Picture picture_from_string(std::string_view s) {
  if (s == "x" || s == "position") return Picture::position;
  if (s == "kappa") return Picture::kappa;
  throw InvalidArgument("unknown picture '" + std::string(s) + "' (expected x or kappa)");
}

Grid::Grid(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
  if (n < 16) throw InvalidArgument("Grid: at least 16 nodes required, got " + std::to_string(n));
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
    throw InvalidArgument("Grid: need finite x_min < x_max");
  }
  dx_ = (x_max - x_min) / static_cast<double>(n - 1);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = x(i);
  return out;
}

void WaveFrame::validate() const {
  if (values.size() != grid.size()) {
    throw GridError("frame has " + std::to_string(values.size()) + " samples for a grid of " +
                    std::to_string(grid.size()) + " nodes");
  }
}

WaveFrame sample_frame(const Grid& grid, const std::function<cplx(double)>& fn, double time, Picture picture) {
  WaveFrame f{grid, std::vector<cplx>(grid.size()), time, picture};
  for (std::size_t i = 0; i < grid.size(); ++i) f.values[i] = fn(grid.x(i));
  return f;
}

std::vector<double> simpson_weights(std::size_t n, double h) {
  if (n < 4) throw InvalidArgument("simpson_weights: need at least 4 nodes");
  std::vector<double> w(n, 0.0);
  // Composite Simpson over nodes [0, m] with m even.
  const std::size_t m = (n % 2 == 1) ? n - 1 : n - 4;
  for (std::size_t i = 0; i + 2 <= m; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (n % 2 == 0) {
    w[m] += 3.0 * h / 8.0;
    w[m + 1] += 9.0 * h / 8.0;
    w[m + 2] += 9.0 * h / 8.0;
    w[m + 3] += 3.0 * h / 8.0;
  }
  return w;
}

double integrate(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw GridError("integrate: sample count does not match the grid");
  const auto w = simpson_weights(grid.size(), grid.spacing());
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * values[i];
  return s;
}

cplx inner_product(const Grid& grid, std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != grid.size() || b.size() != grid.size()) {
    throw GridError("inner_product: sample count does not match the grid");
  }
  const auto w = simpson_weights(grid.size(), grid.spacing());
  cplx s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::conj(a[i]) * b[i];
  return s;
}

cplx inner_product(const WaveFrame& a, const WaveFrame& b) {
  require_same(a, b, "inner_product");
  if (a.time != b.time) throw GridError("inner_product: frames are at different times");
  return inner_product(a.grid, a.values, b.values);
}

double norm(const Grid& grid, std::span<const cplx> a) {
  return std::sqrt(std::max(0.0, inner_product(grid, a, a).real()));
}

double norm(const WaveFrame& a) {
  a.validate();
  return norm(a.grid, a.values);
}

double relative_l2(const WaveFrame& a, const WaveFrame& b) {
  require_same(a, b, "relative_l2");
  std::vector<cplx> d(a.values.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.values[i] - b.values[i];
  return norm(a.grid, d) / norm(b.grid, b.values);
}

struct ComplexSpline::Impl {
  using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
  Grid grid;
  Spline re, im;
};

ComplexSpline::ComplexSpline(const WaveFrame& frame) {
  frame.validate();
  const std::size_t n = frame.values.size();
  std::vector<double> re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = frame.values[i].real();
    im[i] = frame.values[i].imag();
  }
  const double a = frame.grid.x_min(), h = frame.grid.spacing();
  // End slopes passed explicitly: the library's own right-end estimate is
  // not fourth order in Boost 1.74.
  auto slope = [h](const std::vector<double>& v, bool left) {
    const std::size_t e = v.size() - 1;
    if (left) return (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
    return (25.0 * v[e] - 48.0 * v[e - 1] + 36.0 * v[e - 2] - 16.0 * v[e - 3] + 3.0 * v[e - 4]) / (12.0 * h);
  };
  impl_ = std::make_shared<const Impl>(Impl{frame.grid, Impl::Spline(re.data(), n, a, h, slope(re, true), slope(re, false)),
                                            Impl::Spline(im.data(), n, a, h, slope(im, true), slope(im, false))});
}

cplx ComplexSpline::operator()(double x) const {
  const Grid& g = impl_->grid;
  // Tolerate round-off at the hull edges.
  const double slack = 1e-12 * g.spacing();
  if (!(x >= g.x_min() - slack && x <= g.x_max() + slack)) return 0.0;
  x = std::clamp(x, g.x_min(), g.x_max());
  return {impl_->re(x), impl_->im(x)};
}

WaveFrame resample(const WaveFrame& frame, const Grid& new_grid) {
  frame.validate();
  if (frame.grid == new_grid) return frame;
  const ComplexSpline s(frame);
  WaveFrame out{new_grid, std::vector<cplx>(new_grid.size()), frame.time, frame.picture};
  for (std::size_t i = 0; i < new_grid.size(); ++i) out.values[i] = s(new_grid.x(i));
  return out;
}

std::vector<cplx> first_derivative(std::span<const cplx> v, double h) {
  const std::size_t n = v.size();
  if (n < 6) throw InvalidArgument("first_derivative: need at least 6 samples");
  std::vector<cplx> d(n);
  const double s = 1.0 / (12.0 * h);
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = s * (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]);
  d[0] = s * (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]);
  d[1] = s * (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]);
  const std::size_t e = n - 1;
  d[e] = s * (25.0 * v[e] - 48.0 * v[e - 1] + 36.0 * v[e - 2] - 16.0 * v[e - 3] + 3.0 * v[e - 4]);
  d[e - 1] = s * (3.0 * v[e] + 10.0 * v[e - 1] - 18.0 * v[e - 2] + 6.0 * v[e - 3] - v[e - 4]);
  return d;
}

std::vector<cplx> second_derivative(std::span<const cplx> v, double h) {
  const std::size_t n = v.size();
  if (n < 6) throw InvalidArgument("second_derivative: need at least 6 samples");
  std::vector<cplx> d(n);
  const double s = 1.0 / (12.0 * h * h);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = s * (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]);
  }
  auto edge0 = [&](std::size_t a, int dir) {
    auto at = [&](int k) { return v[static_cast<std::size_t>(static_cast<int>(a) + dir * k)]; };
    return s * (45.0 * at(0) - 154.0 * at(1) + 214.0 * at(2) - 156.0 * at(3) + 61.0 * at(4) - 10.0 * at(5));
  };
  auto edge1 = [&](std::size_t a, int dir) {
    auto at = [&](int k) { return v[static_cast<std::size_t>(static_cast<int>(a) + dir * k)]; };
    return s * (10.0 * at(-1) - 15.0 * at(0) - 4.0 * at(1) + 14.0 * at(2) - 6.0 * at(3) + at(4));
  };
  d[0] = edge0(0, 1);
  d[1] = edge1(1, 1);
  d[n - 1] = edge0(n - 1, -1);
  d[n - 2] = edge1(n - 2, -1);
  return d;
}

void check_boundary_decay(const WaveFrame& frame, double rel) {
  frame.validate();
  double peak = 0.0;
  for (const auto& v : frame.values) peak = std::max(peak, std::abs(v));
  const std::size_t n = frame.values.size();
  const double edge = std::max({std::abs(frame.values[0]), std::abs(frame.values[1]), std::abs(frame.values[n - 2]),
                                std::abs(frame.values[n - 1])});
  if (edge > rel * peak) {
    throw InvalidArgument("frame does not decay at the grid boundary: edge/peak = " + num(peak > 0 ? edge / peak : 0) +
                          " (limit " + num(rel) + "); widen the grid");
  }
}

double schrodinger_residual(const std::array<WaveFrame, 3>& f, const HamiltonianApply& h_apply, double hbar) {
  require_same(f[0], f[1], "schrodinger_residual");
  require_same(f[1], f[2], "schrodinger_residual");
  const double dt = 0.5 * (f[2].time - f[0].time);
  const double dt_a = f[1].time - f[0].time;
  const double dt_b = f[2].time - f[1].time;
  if (!(dt > 0.0) || std::abs(dt_a - dt_b) > 1e-9 * dt) {
    throw GridError("schrodinger_residual: frames must be at t-dt, t, t+dt");
  }
  const auto h = h_apply(f[1].time, f[1]);
  if (h.size() != f[1].values.size()) throw GridError("schrodinger_residual: H returned the wrong sample count");
  const cplx ih(0.0, hbar);
  std::vector<cplx> r(h.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = ih * (f[2].values[i] - f[0].values[i]) / (2.0 * dt) - h[i];
  }
  return norm(f[1].grid, r) / norm(f[1].grid, f[1].values);
}

void write_frame_csv(std::ostream& out, const WaveFrame& frame) {
  frame.validate();
  out << "# t=" << num(frame.time) << "\n# picture=" << to_string(frame.picture) << "\nx,re,im\n";
  for (std::size_t i = 0; i < frame.values.size(); ++i) {
    out << num(frame.grid.x(i)) << ',' << num(frame.values[i].real()) << ',' << num(frame.values[i].imag()) << '\n';
  }
}

void write_frame_csv(const std::string& path, const WaveFrame& frame) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_frame_csv(out, frame);
  if (!out) throw Error("write to '" + path + "' failed");
}

WaveFrame read_frame_csv(std::istream& in) {
  auto parse_num = [](std::string_view s, std::size_t line) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw Error("frame csv line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    }
    return v;
  };
  double time = 0.0;
  Picture picture = Picture::position;
  bool header = false;
  std::vector<double> xs;
  std::vector<cplx> vals;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string_view body(line);
      body.remove_prefix(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      if (body.rfind("t=", 0) == 0) time = parse_num(body.substr(2), lineno);
      if (body.rfind("picture=", 0) == 0) picture = picture_from_string(body.substr(8));
      continue;
    }
    if (!header) {
      if (line != "x,re,im") throw Error("frame csv line " + std::to_string(lineno) + ": expected header 'x,re,im'");
      header = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw Error("frame csv line " + std::to_string(lineno) + ": expected 3 columns");
    std::string_view sv(line);
    xs.push_back(parse_num(sv.substr(0, c1), lineno));
    vals.emplace_back(parse_num(sv.substr(c1 + 1, c2 - c1 - 1), lineno), parse_num(sv.substr(c2 + 1), lineno));
  }
  if (xs.size() < 16) throw Error("frame csv: need at least 16 rows");
  Grid grid(xs.front(), xs.back(), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - grid.x(i)) > 1e-9 * std::max(1.0, std::abs(grid.x(i)))) {
      throw Error("frame csv: nodes are not uniformly spaced (row " + std::to_string(i) + ")");
    }
  }
  return WaveFrame{grid, std::move(vals), time, picture};
}

WaveFrame read_frame_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open frame file '" + path + "'");
  return read_frame_csv(in);
}

}  // namespace arnold
