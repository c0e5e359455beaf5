#pragma once

// Spectral and physical representation of scalar and vector fields on a
// periodic box, space-time sequences of them, and the norms used by the
// estimate harnesses.

#include <array>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace nsv {

using Complex = std::complex<double>;

/// Execution policy for the data-parallel kernels. `serial` selects the
/// plain reference loops kept for testing; `parallel` the OpenMP version.
enum class Exec { serial, parallel };

enum class Axis : int { x1 = 0, x2 = 1, x3 = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::x1, Axis::x2, Axis::x3};

/// Periodic box [0, L1) x [0, L2) x [0, L3) with modes |k_i| <= N_i and an
/// M_i-point collocation grid per axis.
struct DomainSpec {
  std::array<double, 3> length{2 * std::numbers::pi, 2 * std::numbers::pi,
                               2 * std::numbers::pi};
  std::array<int, 3> modes{4, 4, 4};
  std::array<int, 3> grid{10, 10, 10};

  /// Cubic box; `grid <= 0` picks the smallest even M >= 2N+1.
  static DomainSpec cube(int modes, int grid = 0,
                         double length = 2 * std::numbers::pi);

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  int extent(int axis) const { return 2 * modes[axis] + 1; }
  std::size_t coeff_count() const;
  std::size_t grid_points() const;
  double volume() const { return length[0] * length[1] * length[2]; }
  /// Physical wavenumber 2*pi*k/L along `axis`.
  double wavenumber(int axis, int k) const {
    return 2 * std::numbers::pi * k / length[axis];
  }
  /// Grid for alias-free quadratic products: M_p >= 3N+1 per axis.
  std::array<int, 3> product_grid() const;

  bool operator==(const DomainSpec&) const = default;
};

/// Real scalar field stored as Fourier coefficients c(k), |k_i| <= N_i,
/// with u(x) = sum_k c(k) exp(i k.x).
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const DomainSpec& domain);

  const DomainSpec& domain() const { return domain_; }

  std::size_t index(int k1, int k2, int k3) const {
    return (static_cast<std::size_t>(k1 + domain_.modes[0]) * domain_.extent(1) +
            static_cast<std::size_t>(k2 + domain_.modes[1])) *
               domain_.extent(2) +
           static_cast<std::size_t>(k3 + domain_.modes[2]);
  }
  bool in_cutoff(int k1, int k2, int k3) const;

  Complex& at(int k1, int k2, int k3) { return coeffs_[index(k1, k2, k3)]; }
  const Complex& at(int k1, int k2, int k3) const {
    return coeffs_[index(k1, k2, k3)];
  }
  /// Zero if (k1,k2,k3) is outside the cutoff.
  Complex get(int k1, int k2, int k3) const;

  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }

  /// Sets c(k) and c(-k) = conj(c(k)) for a real-valued field.
  void set_mode(int k1, int k2, int k3, Complex value);
  /// Adds A*sin(k.x) (integer wave vector k).
  void add_sin(int k1, int k2, int k3, double amplitude);
  /// Adds A*cos(k.x).
  void add_cos(int k1, int k2, int k3, double amplitude);

  /// Replaces c by (c(k) + conj(c(-k)))/2.
  void enforce_conjugate_symmetry();
  double conjugate_asymmetry() const;
  double max_abs() const;
  Complex mean() const { return at(0, 0, 0); }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) {
    return a += b;
  }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) {
    return a -= b;
  }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  DomainSpec domain_{};
  std::vector<Complex> coeffs_;
};

struct SpectralVectorField {
  std::array<SpectralField, 3> comp;

  SpectralVectorField() = default;
  explicit SpectralVectorField(const DomainSpec& domain)
      : comp{SpectralField(domain), SpectralField(domain),
             SpectralField(domain)} {}
  SpectralVectorField(SpectralField a, SpectralField b, SpectralField c);

  const DomainSpec& domain() const { return comp[0].domain(); }
  SpectralField& operator[](int i) { return comp[i]; }
  const SpectralField& operator[](int i) const { return comp[i]; }
  double max_abs() const;

  SpectralVectorField& operator+=(const SpectralVectorField& o);
  SpectralVectorField& operator-=(const SpectralVectorField& o);
  SpectralVectorField& operator*=(double s);
  friend SpectralVectorField operator+(SpectralVectorField a,
                                       const SpectralVectorField& b) {
    return a += b;
  }
  friend SpectralVectorField operator-(SpectralVectorField a,
                                       const SpectralVectorField& b) {
    return a -= b;
  }
  friend SpectralVectorField operator*(double s, SpectralVectorField a) {
    return a *= s;
  }
};

/// Real samples on a collocation grid of the box, x_j = j L / M, stored
/// row-major with the last axis fastest.
struct GridSamples {
  DomainSpec domain;
  std::array<int, 3> dims{};
  std::vector<double> values;

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dims[1] + j) * dims[2] + k;
  }
  double coord(int axis, int j) const {
    return domain.length[axis] * j / dims[axis];
  }
};

struct TimeGrid {
  double horizon = 1.0;
  int steps = 1;

  void validate() const;
  double step() const { return horizon / steps; }
  double time(int n) const { return horizon * n / steps; }
  int nodes() const { return steps + 1; }
  bool operator==(const TimeGrid&) const = default;
};

struct SpaceTimeField {
  TimeGrid grid;
  std::vector<SpectralVectorField> snapshots;

  SpaceTimeField() = default;
  SpaceTimeField(const TimeGrid& g, const DomainSpec& d);

  const DomainSpec& domain() const { return snapshots.front().domain(); }
  SpectralVectorField& operator[](int n) { return snapshots[n]; }
  const SpectralVectorField& operator[](int n) const { return snapshots[n]; }
  void validate() const;

  SpaceTimeField& operator+=(const SpaceTimeField& o);
  SpaceTimeField& operator-=(const SpaceTimeField& o);
  SpaceTimeField& operator*=(double s);
  friend SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b) {
    return a += b;
  }
  friend SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b) {
    return a -= b;
  }
  friend SpaceTimeField operator*(double s, SpaceTimeField a) { return a *= s; }
};

struct ScalarSpaceTimeField {
  TimeGrid grid;
  std::vector<SpectralField> snapshots;

  ScalarSpaceTimeField() = default;
  ScalarSpaceTimeField(const TimeGrid& g, const DomainSpec& d);
};

struct TimeSeries {
  TimeGrid grid;
  std::vector<double> values;

  TimeSeries() = default;
  explicit TimeSeries(const TimeGrid& g) : grid(g), values(g.nodes(), 0.0) {}
  TimeSeries(const TimeGrid& g, std::vector<double> v);

  double operator[](int n) const { return values[n]; }
  double& operator[](int n) { return values[n]; }
  int size() const { return static_cast<int>(values.size()); }
  /// Throws when the length does not match the grid or a value is not finite.
  void validate() const;
};

// --- transforms -----------------------------------------------------------

GridSamples to_physical(const SpectralField& field);
/// Samples on an arbitrary grid with M_i >= 2N_i + 1 (used for padding).
GridSamples to_physical(const SpectralField& field, std::array<int, 3> dims);
/// Coefficients |k_i| <= N_i of the trigonometric interpolant; throws when
/// the sample grid cannot resolve the cutoff of `domain`.
SpectralField to_spectral(const GridSamples& samples, const DomainSpec& domain);

// --- differential operators ----------------------------------------------

SpectralField derivative(const SpectralField& field, Axis axis);
SpectralVectorField gradient(const SpectralField& field);
SpectralField divergence(const SpectralVectorField& v);
SpectralField laplacian(const SpectralField& field);

/// Dealiased product: evaluated on the padded product grid and truncated to
/// the cutoff, i.e. the exact truncated convolution of the coefficients.
SpectralField pointwise_product(const SpectralField& a, const SpectralField& b);

// --- norms ------------------------------------------------------------------

/// (int |f|^p dx)^(1/p) by equal-weight collocation quadrature.
double component_norm(const SpectralField& f, double p);
/// sqrt(int f^2 dx) from the Parseval sum.
double parseval_norm(const SpectralField& f);
double l2_inner(const SpectralField& a, const SpectralField& b);
double l2_inner(const SpectralVectorField& a, const SpectralVectorField& b);
/// sum_i (int |v_i|^p dx)^(1/p).
double spatial_norm(const SpectralVectorField& v, double p);
/// Hilbert norm sqrt(sum_i int v_i^2 dx).
double l2_norm(const SpectralVectorField& v);

/// L_{p,r}(Q_T) vector norm sum_i ||v_i||_{p,r}; trapezoid rule in time.
double mixed_norm(const SpaceTimeField& u, double p, double r);
double mixed_norm(const ScalarSpaceTimeField& u, double p, double r);
/// Hilbert L2(Q_T) norm, trapezoid in time.
double l2_norm(const SpaceTimeField& u);
/// W^{2,1}_2(Q_T) norm (vector convention: sum over components). The time
/// derivative uses second-order finite differences; requires Nt >= 2.
double norm_W21(const SpaceTimeField& u);

/// Per-node spatial_norm(v, 2), the w(t) of the a priori chain.
TimeSeries norm_series(const SpaceTimeField& u);

// --- time-series helpers ------------------------------------------------------

/// (int_0^T |u|^p dt)^(1/p), trapezoid rule.
double time_lp_norm(const TimeSeries& u, double p);
/// int_0^{t_n} u dt for each node, trapezoid rule.
TimeSeries cumulative_trapezoid(const TimeSeries& u);
/// Time derivative: central differences inside, second-order one-sided at
/// the end nodes (needs Nt >= 2).
std::vector<SpectralVectorField> time_derivative(const SpaceTimeField& u,
                                                 int stride = 1);

}  // namespace nsv
