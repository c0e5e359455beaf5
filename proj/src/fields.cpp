#include "nsv/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace nsv {

namespace {

int wrap(int k, int m) { return k < 0 ? k + m : k; }

void require_same_domain(const DomainSpec& a, const DomainSpec& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different domains");
}

}  // namespace

// --- DomainSpec -------------------------------------------------------------

DomainSpec DomainSpec::cube(int n, int m, double length) {
  DomainSpec d;
  d.length = {length, length, length};
  d.modes = {n, n, n};
  const int grid = m > 0 ? m : 2 * n + 2;
  d.grid = {grid, grid, grid};
  d.validate();
  return d;
}

void DomainSpec::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (!(length[a] > 0) || !std::isfinite(length[a]))
      throw std::invalid_argument("box length must be positive");
    if (modes[a] < 1) throw std::invalid_argument("mode cutoff N must be >= 1");
    if (grid[a] < 2 * modes[a] + 1)
      throw std::invalid_argument("collocation grid M=" + std::to_string(grid[a]) +
                                  " cannot resolve cutoff N=" +
                                  std::to_string(modes[a]) + " (need M >= 2N+1)");
  }
}

std::size_t DomainSpec::coeff_count() const {
  return static_cast<std::size_t>(extent(0)) * extent(1) * extent(2);
}

std::size_t DomainSpec::grid_points() const {
  return static_cast<std::size_t>(grid[0]) * grid[1] * grid[2];
}

std::array<int, 3> DomainSpec::product_grid() const {
  std::array<int, 3> g{};
  for (int a = 0; a < 3; ++a)
    g[a] = detail::smooth_size(std::max(grid[a], 3 * modes[a] + 1));
  return g;
}

// --- SpectralField ------------------------------------------------------------

SpectralField::SpectralField(const DomainSpec& domain)
    : domain_(domain), coeffs_(domain.coeff_count(), Complex{}) {}

bool SpectralField::in_cutoff(int k1, int k2, int k3) const {
  return std::abs(k1) <= domain_.modes[0] && std::abs(k2) <= domain_.modes[1] &&
         std::abs(k3) <= domain_.modes[2];
}

Complex SpectralField::get(int k1, int k2, int k3) const {
  return in_cutoff(k1, k2, k3) ? at(k1, k2, k3) : Complex{};
}

void SpectralField::set_mode(int k1, int k2, int k3, Complex value) {
  if (!in_cutoff(k1, k2, k3)) throw std::out_of_range("mode outside cutoff");
  if (k1 == 0 && k2 == 0 && k3 == 0) {
    at(0, 0, 0) = value.real();
    return;
  }
  at(k1, k2, k3) = value;
  at(-k1, -k2, -k3) = std::conj(value);
}

void SpectralField::add_sin(int k1, int k2, int k3, double amplitude) {
  if (k1 == 0 && k2 == 0 && k3 == 0) return;
  if (!in_cutoff(k1, k2, k3)) throw std::out_of_range("mode outside cutoff");
  // A sin(k.x) = (A/2i) e^{ikx} - (A/2i) e^{-ikx}
  at(k1, k2, k3) += Complex(0, -0.5 * amplitude);
  at(-k1, -k2, -k3) += Complex(0, 0.5 * amplitude);
}

void SpectralField::add_cos(int k1, int k2, int k3, double amplitude) {
  if (!in_cutoff(k1, k2, k3)) throw std::out_of_range("mode outside cutoff");
  if (k1 == 0 && k2 == 0 && k3 == 0) {
    at(0, 0, 0) += amplitude;
    return;
  }
  at(k1, k2, k3) += 0.5 * amplitude;
  at(-k1, -k2, -k3) += 0.5 * amplitude;
}

void SpectralField::enforce_conjugate_symmetry() {
  const auto& n = domain_.modes;
  for (int a = -n[0]; a <= n[0]; ++a)
    for (int b = -n[1]; b <= n[1]; ++b)
      for (int c = -n[2]; c <= n[2]; ++c) {
        const std::size_t i = index(a, b, c), j = index(-a, -b, -c);
        if (j < i) continue;
        const Complex avg = 0.5 * (coeffs_[i] + std::conj(coeffs_[j]));
        coeffs_[i] = avg;
        coeffs_[j] = std::conj(avg);
      }
}

double SpectralField::conjugate_asymmetry() const {
  double worst = 0;
  const auto& n = domain_.modes;
  for (int a = -n[0]; a <= n[0]; ++a)
    for (int b = -n[1]; b <= n[1]; ++b)
      for (int c = -n[2]; c <= n[2]; ++c)
        worst = std::max(worst, std::abs(at(a, b, c) - std::conj(at(-a, -b, -c))));
  return worst;
}

double SpectralField::max_abs() const {
  double m = 0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_domain(domain_, other.domain_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_domain(domain_, other.domain_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

// --- vector / space-time containers -------------------------------------------

SpectralVectorField::SpectralVectorField(SpectralField a, SpectralField b,
                                         SpectralField c)
    : comp{std::move(a), std::move(b), std::move(c)} {
  require_same_domain(comp[0].domain(), comp[1].domain());
  require_same_domain(comp[0].domain(), comp[2].domain());
}

double SpectralVectorField::max_abs() const {
  return std::max({comp[0].max_abs(), comp[1].max_abs(), comp[2].max_abs()});
}

SpectralVectorField& SpectralVectorField::operator+=(const SpectralVectorField& o) {
  for (int i = 0; i < 3; ++i) comp[i] += o.comp[i];
  return *this;
}

SpectralVectorField& SpectralVectorField::operator-=(const SpectralVectorField& o) {
  for (int i = 0; i < 3; ++i) comp[i] -= o.comp[i];
  return *this;
}

SpectralVectorField& SpectralVectorField::operator*=(double s) {
  for (auto& c : comp) c *= s;
  return *this;
}

void TimeGrid::validate() const {
  if (!(horizon > 0) || !std::isfinite(horizon))
    throw std::invalid_argument("time horizon must be positive");
  if (steps < 1) throw std::invalid_argument("time grid needs at least one step");
}

SpaceTimeField::SpaceTimeField(const TimeGrid& g, const DomainSpec& d)
    : grid(g), snapshots(g.nodes(), SpectralVectorField(d)) {}

void SpaceTimeField::validate() const {
  grid.validate();
  if (static_cast<int>(snapshots.size()) != grid.nodes())
    throw std::invalid_argument("space-time field must hold Nt+1 snapshots");
  for (const auto& s : snapshots)
    for (const auto& c : s.comp) require_same_domain(c.domain(), domain());
}

SpaceTimeField& SpaceTimeField::operator+=(const SpaceTimeField& o) {
  if (!(grid == o.grid)) throw std::invalid_argument("time grids differ");
  for (std::size_t n = 0; n < snapshots.size(); ++n) snapshots[n] += o.snapshots[n];
  return *this;
}

SpaceTimeField& SpaceTimeField::operator-=(const SpaceTimeField& o) {
  if (!(grid == o.grid)) throw std::invalid_argument("time grids differ");
  for (std::size_t n = 0; n < snapshots.size(); ++n) snapshots[n] -= o.snapshots[n];
  return *this;
}

SpaceTimeField& SpaceTimeField::operator*=(double s) {
  for (auto& v : snapshots) v *= s;
  return *this;
}

ScalarSpaceTimeField::ScalarSpaceTimeField(const TimeGrid& g, const DomainSpec& d)
    : grid(g), snapshots(g.nodes(), SpectralField(d)) {}

TimeSeries::TimeSeries(const TimeGrid& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
  validate();
}

void TimeSeries::validate() const {
  grid.validate();
  if (static_cast<int>(values.size()) != grid.nodes())
    throw std::invalid_argument("time series length must be Nt+1");
  for (double x : values)
    if (!std::isfinite(x)) throw std::invalid_argument("time series value not finite");
}

// --- transforms -----------------------------------------------------------------

GridSamples to_physical(const SpectralField& field) {
  return to_physical(field, field.domain().grid);
}

GridSamples to_physical(const SpectralField& field, std::array<int, 3> dims) {
  const DomainSpec& d = field.domain();
  for (int a = 0; a < 3; ++a)
    if (dims[a] < 2 * d.modes[a] + 1)
      throw std::invalid_argument("sample grid too coarse for the mode cutoff");
  const std::size_t total = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  std::vector<Complex> buf(total);
  const auto& n = d.modes;
  for (int a = -n[0]; a <= n[0]; ++a)
    for (int b = -n[1]; b <= n[1]; ++b)
      for (int c = -n[2]; c <= n[2]; ++c) {
        const std::size_t dst =
            (static_cast<std::size_t>(wrap(a, dims[0])) * dims[1] + wrap(b, dims[1])) *
                dims[2] +
            wrap(c, dims[2]);
        buf[dst] = field.at(a, b, c);
      }
  detail::fft3d(buf.data(), dims, +1);
  GridSamples out{d, dims, std::vector<double>(total)};
  for (std::size_t i = 0; i < total; ++i) out.values[i] = buf[i].real();
  return out;
}

SpectralField to_spectral(const GridSamples& samples, const DomainSpec& domain) {
  const auto& dims = samples.dims;
  const std::size_t total = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  if (samples.values.size() != total)
    throw std::invalid_argument("sample count does not match grid dimensions");
  if (samples.domain.length != domain.length)
    throw std::invalid_argument("samples belong to a different box");
  for (int a = 0; a < 3; ++a)
    if (dims[a] < 2 * domain.modes[a] + 1)
      throw std::invalid_argument("grid size mismatch: sample grid cannot resolve cutoff");
  std::vector<Complex> buf(samples.values.begin(), samples.values.end());
  detail::fft3d(buf.data(), dims, -1);
  const double scale = 1.0 / static_cast<double>(total);
  SpectralField out(domain);
  const auto& n = domain.modes;
  for (int a = -n[0]; a <= n[0]; ++a)
    for (int b = -n[1]; b <= n[1]; ++b)
      for (int c = -n[2]; c <= n[2]; ++c) {
        const std::size_t src =
            (static_cast<std::size_t>(wrap(a, dims[0])) * dims[1] + wrap(b, dims[1])) *
                dims[2] +
            wrap(c, dims[2]);
        out.at(a, b, c) = buf[src] * scale;
      }
  out.enforce_conjugate_symmetry();
  return out;
}

// --- differential operators -------------------------------------------------------

SpectralField derivative(const SpectralField& field, Axis axis) {
  const int ax = static_cast<int>(axis);
  if (ax < 0 || ax > 2) throw std::invalid_argument("axis must be x1, x2 or x3");
  const DomainSpec& d = field.domain();
  SpectralField out(d);
  const auto& n = d.modes;
  for (int a = -n[0]; a <= n[0]; ++a)
    for (int b = -n[1]; b <= n[1]; ++b)
      for (int c = -n[2]; c <= n[2]; ++c) {
        const int k = ax == 0 ? a : (ax == 1 ? b : c);
        out.at(a, b, c) = Complex(0, d.wavenumber(ax, k)) * field.at(a, b, c);
      }
  return out;
}

SpectralVectorField gradient(const SpectralField& field) {
  return {derivative(field, Axis::x1), derivative(field, Axis::x2),
          derivative(field, Axis::x3)};
}

SpectralField divergence(const SpectralVectorField& v) {
  SpectralField out = derivative(v[0], Axis::x1);
  out += derivative(v[1], Axis::x2);
  out += derivative(v[2], Axis::x3);
  return out;
}

SpectralField laplacian(const SpectralField& field) {
  const DomainSpec& d = field.domain();
  SpectralField out(d);
  const auto& n = d.modes;
  for (int a = -n[0]; a <= n[0]; ++a)
    for (int b = -n[1]; b <= n[1]; ++b)
      for (int c = -n[2]; c <= n[2]; ++c) {
        const double k2 = std::pow(d.wavenumber(0, a), 2) +
                          std::pow(d.wavenumber(1, b), 2) +
                          std::pow(d.wavenumber(2, c), 2);
        out.at(a, b, c) = -k2 * field.at(a, b, c);
      }
  return out;
}

SpectralField pointwise_product(const SpectralField& a, const SpectralField& b) {
  require_same_domain(a.domain(), b.domain());
  const auto dims = a.domain().product_grid();
  GridSamples pa = to_physical(a, dims);
  const GridSamples pb = to_physical(b, dims);
  for (std::size_t i = 0; i < pa.values.size(); ++i) pa.values[i] *= pb.values[i];
  return to_spectral(pa, a.domain());
}

// --- norms ---------------------------------------------------------------------------

double component_norm(const SpectralField& f, double p) {
  if (!(p >= 1)) throw std::invalid_argument("norm exponent p must be >= 1");
  const GridSamples s = to_physical(f);
  double sum = 0;
  for (double v : s.values) sum += std::pow(std::abs(v), p);
  const double integral = sum * f.domain().volume() / static_cast<double>(s.values.size());
  return std::pow(integral, 1.0 / p);
}

double parseval_norm(const SpectralField& f) {
  double sum = 0;
  for (const auto& c : f.coeffs()) sum += std::norm(c);
  return std::sqrt(sum * f.domain().volume());
}

double l2_inner(const SpectralField& a, const SpectralField& b) {
  require_same_domain(a.domain(), b.domain());
  double sum = 0;
  auto ca = a.coeffs();
  auto cb = b.coeffs();
  for (std::size_t i = 0; i < ca.size(); ++i) sum += (ca[i] * std::conj(cb[i])).real();
  return sum * a.domain().volume();
}

double l2_inner(const SpectralVectorField& a, const SpectralVectorField& b) {
  return l2_inner(a[0], b[0]) + l2_inner(a[1], b[1]) + l2_inner(a[2], b[2]);
}

double spatial_norm(const SpectralVectorField& v, double p) {
  return component_norm(v[0], p) + component_norm(v[1], p) + component_norm(v[2], p);
}

double l2_norm(const SpectralVectorField& v) { return std::sqrt(l2_inner(v, v)); }

namespace {

double trapezoid(const std::vector<double>& f, double h) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) s += 0.5 * h * (f[i] + f[i + 1]);
  return s;
}

}  // namespace

double mixed_norm(const SpaceTimeField& u, double p, double r) {
  if (!(p >= 1) || !(r >= 1)) throw std::invalid_argument("mixed norm needs p, r >= 1");
  double total = 0;
  for (int i = 0; i < 3; ++i) {
    std::vector<double> slab(u.snapshots.size());
    for (std::size_t n = 0; n < slab.size(); ++n)
      slab[n] = std::pow(component_norm(u.snapshots[n][i], p), r);
    total += std::pow(trapezoid(slab, u.grid.step()), 1.0 / r);
  }
  return total;
}

double mixed_norm(const ScalarSpaceTimeField& u, double p, double r) {
  if (!(p >= 1) || !(r >= 1)) throw std::invalid_argument("mixed norm needs p, r >= 1");
  std::vector<double> slab(u.snapshots.size());
  for (std::size_t n = 0; n < slab.size(); ++n)
    slab[n] = std::pow(component_norm(u.snapshots[n], p), r);
  return std::pow(trapezoid(slab, u.grid.step()), 1.0 / r);
}

double l2_norm(const SpaceTimeField& u) {
  std::vector<double> sq(u.snapshots.size());
  for (std::size_t n = 0; n < sq.size(); ++n) sq[n] = l2_inner(u.snapshots[n], u.snapshots[n]);
  return std::sqrt(trapezoid(sq, u.grid.step()));
}

std::vector<SpectralVectorField> time_derivative(const SpaceTimeField& u, int stride) {
  const int nt = u.grid.steps;
  if (stride < 1 || nt < 2 * stride)
    throw std::invalid_argument("time derivative needs Nt >= 2*stride");
  const double h = stride * u.grid.step();
  std::vector<SpectralVectorField> out;
  out.reserve(u.snapshots.size());
  for (int n = 0; n <= nt; ++n) {
    SpectralVectorField d(u.domain());
    if (n - stride >= 0 && n + stride <= nt) {
      d = u[n + stride] - u[n - stride];
      d *= 1.0 / (2 * h);
    } else if (n + 2 * stride <= nt) {
      d = 4.0 * u[n + stride] - 3.0 * u[n] - u[n + 2 * stride];
      d *= 1.0 / (2 * h);
    } else {
      d = 3.0 * u[n] - 4.0 * u[n - stride] + u[n - 2 * stride];
      d *= 1.0 / (2 * h);
    }
    out.push_back(std::move(d));
  }
  return out;
}

double norm_W21(const SpaceTimeField& u) {
  if (u.grid.steps < 2) throw std::invalid_argument("W21 norm needs Nt >= 2");
  const auto ut = time_derivative(u, 1);
  const DomainSpec& d = u.domain();
  const auto& n = d.modes;
  double total = 0;
  for (int i = 0; i < 3; ++i) {
    std::vector<double> slab(u.snapshots.size());
    for (std::size_t t = 0; t < slab.size(); ++t) {
      const SpectralField& f = u.snapshots[t][i];
      double s = 0;
      for (int a = -n[0]; a <= n[0]; ++a)
        for (int b = -n[1]; b <= n[1]; ++b)
          for (int c = -n[2]; c <= n[2]; ++c) {
            const double k2 = std::pow(d.wavenumber(0, a), 2) +
                              std::pow(d.wavenumber(1, b), 2) +
                              std::pow(d.wavenumber(2, c), 2);
            // |u|^2 + |u_x|^2 + |u_xx|^2 with sum_{j,l} k_j^2 k_l^2 = |k|^4
            s += std::norm(f.at(a, b, c)) * (1 + k2 + k2 * k2);
          }
      s *= d.volume();
      s += l2_inner(ut[t][i], ut[t][i]);
      slab[t] = s;
    }
    total += std::sqrt(trapezoid(slab, u.grid.step()));
  }
  return total;
}

TimeSeries norm_series(const SpaceTimeField& u) {
  TimeSeries out(u.grid);
  for (int n = 0; n < u.grid.nodes(); ++n) {
    const auto& s = u[n];
    out[n] = parseval_norm(s[0]) + parseval_norm(s[1]) + parseval_norm(s[2]);
  }
  return out;
}

double time_lp_norm(const TimeSeries& u, double p) {
  std::vector<double> v(u.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(std::abs(u.values[i]), p);
  return std::pow(trapezoid(v, u.grid.step()), 1.0 / p);
}

TimeSeries cumulative_trapezoid(const TimeSeries& u) {
  TimeSeries out(u.grid);
  const double h = u.grid.step();
  for (int n = 1; n < u.size(); ++n) out[n] = out[n - 1] + 0.5 * h * (u[n - 1] + u[n]);
  return out;
}

}  // namespace nsv
