#pragma once

// Periodic grids and d-component complex fields with a physical / spectral
// dual representation. Layout: component-major, each component row-major
// (axis 0 slowest). Spectral coefficients are in FFT order and carry the
// 1/n^d factor, so a constant field c has coefficient c at mode 0.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace qdnls {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Default torus period per axis: 20 pi in one dimension, 10 pi in two.
double default_period(int dim) noexcept;

/// True when x == 2^m for some integer m (m may be negative).
bool is_power_of_two(double x) noexcept;

class TorusGrid {
 public:
  /// Throws InvalidArgument unless dim is 1 or 2, n is a power of two
  /// >= 16, and period is positive and finite.
  TorusGrid(int dim, int n, double period);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double period() const noexcept { return period_; }
  std::size_t size() const noexcept { return size_; }  ///< n^dim

  /// Signed index k in [-n/2, n/2) of FFT-ordered position i.
  int signed_index(int i) const noexcept { return i < n_ / 2 ? i : i - n_; }
  /// 2 pi k / period for FFT-ordered position i along any axis.
  double wavenumber(int i) const noexcept { return axis_xi_[i]; }
  /// Wavenumber with the Nyquist entry zeroed, used by first derivatives.
  double derivative_wavenumber(int i) const noexcept { return i == n_ / 2 ? 0.0 : axis_xi_[i]; }
  /// |xi|^2 at flat mode index m.
  double xi_sq(std::size_t m) const noexcept { return (*xi_sq_)[m]; }
  std::span<const double> xi_sq_table() const noexcept { return *xi_sq_; }
  /// Wavenumber of flat mode m along `axis`.
  double xi(std::size_t m, int axis) const noexcept;

  /// Largest resolved |xi_k| along one axis, pi n / period.
  double nyquist() const noexcept { return kPi * n_ / period_; }
  /// Grid point coordinate along one axis.
  double x(int i) const noexcept { return period_ * i / n_; }
  /// Measure of the torus, period^dim.
  double volume() const noexcept;

  bool operator==(const TorusGrid& o) const noexcept {
    return dim_ == o.dim_ && n_ == o.n_ && period_ == o.period_;
  }

 private:
  int dim_;
  int n_;
  double period_;
  std::size_t size_;
  std::vector<double> axis_xi_;
  std::shared_ptr<const std::vector<double>> xi_sq_;
};

enum class Repr : std::uint8_t { physical = 0, spectral = 1 };

class SpectralField {
 public:
  /// Zero field with grid.dim() components.
  explicit SpectralField(const TorusGrid& grid, Repr repr = Repr::physical);
  /// Takes ownership of dim * n^dim values; throws on size mismatch.
  SpectralField(const TorusGrid& grid, Repr repr, std::vector<cplx> values);

  const TorusGrid& grid() const noexcept { return grid_; }
  Repr repr() const noexcept { return repr_; }
  int components() const noexcept { return grid_.dim(); }

  std::span<cplx> component(int j) noexcept;
  std::span<const cplx> component(int j) const noexcept;
  std::span<cplx> values() noexcept { return data_; }
  std::span<const cplx> values() const noexcept { return data_; }

  /// In-place change of representation; no-op if already there.
  void make_spectral();
  void make_physical();

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(cplx a);

 private:
  void require_same(const SpectralField& o) const;

  TorusGrid grid_;
  Repr repr_;
  std::vector<cplx> data_;
};

SpectralField to_spectral(SpectralField f);
SpectralField to_physical(SpectralField f);

/// sqrt(period^d sum_modes w^{2s} |f_k|^2) over all components, with
/// w = |xi| (mode 0 dropped) if homogeneous else <xi>. A homogeneous norm
/// with s < 0 of a field with nonzero mean is +infinity.
double sobolev_norm(const SpectralField& f, double s, bool homogeneous = false);
double l2_norm(const SpectralField& f);
/// Same as above for one already-spectral scalar array on `grid`.
double sobolev_norm(const TorusGrid& grid, std::span<const cplx> coeffs, double s,
                    bool homogeneous);

/// The smooth even cutoff: 1 on [-1, 1], 0 outside (-2, 2), quintic
/// smoothstep in between.
double lp_cutoff(double t) noexcept;
/// psi_N(|xi|) = cutoff(|xi| / N) - cutoff(2 |xi| / N).
double lp_symbol(double xi_abs, double N) noexcept;

/// Multiplies every coefficient by psi_N(|xi|). N must be a power of two.
SpectralField lp_project(const SpectralField& f, double N);
/// The remainder below N: multiplier cutoff(2 |xi| / N). Together with
/// lp_project over N, 2N, ..., up to the grid, this sums back to f.
SpectralField lp_low(const SpectralField& f, double N);

/// Multiplies every coefficient by exp(-i t sigma |xi|^2).
SpectralField free_evolve(const SpectralField& f, double sigma, double t);
/// Raw variant on one spectral scalar array.
void free_evolve_inplace(const TorusGrid& grid, std::span<cplx> coeffs, double sigma, double t);

/// Standard complex Gaussian coefficients on the modes where psi_N > 0,
/// normalized to unit L2 norm. Requires 2N < pi n / period.
SpectralField random_band_limited(const TorusGrid& grid, double N, std::uint64_t seed);

struct StateTriple {
  SpectralField u, v, w;

  explicit StateTriple(const TorusGrid& grid, Repr repr = Repr::spectral);
  StateTriple(SpectralField u, SpectralField v, SpectralField w);

  const TorusGrid& grid() const noexcept { return u.grid(); }
  SpectralField& operator[](int i) noexcept { return i == 0 ? u : (i == 1 ? v : w); }
  const SpectralField& operator[](int i) const noexcept { return i == 0 ? u : (i == 1 ? v : w); }

  void make_spectral();
  void make_physical();
};

/// A state at one time.
struct Snapshot {
  double t;
  StateTriple state;
};

/// Sum of the three components' Sobolev norms in the l2 sense.
double sobolev_norm(const StateTriple& s, double sigma_s, bool homogeneous = false);
/// Sobolev norm of the componentwise difference a - b.
double sobolev_distance(const StateTriple& a, const StateTriple& b, double s,
                        bool homogeneous = false);

/// t = 0 slice of lambda^-1 A(lambda^-2 t, lambda^-1 x): values divided by
/// lambda on a grid of period lambda * period with the same n. Mode k keeps
/// index k. lambda must be a power of two.
StateTriple scaling_transform(const StateTriple& s, double lambda);
SpectralField scaling_transform(const SpectralField& f, double lambda);

}  // namespace qdnls
