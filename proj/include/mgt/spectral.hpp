#ifndef MGT_SPECTRAL_HPP
#define MGT_SPECTRAL_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace mgt {

using cplx = std::complex<double>;

// Uniform periodic box [-L/2, L/2)^n with N points per axis and frequency
// lattice xi_k = 2 pi k / L, k in {-N/2, ..., N/2-1}.
class SpectralGrid {
public:
    SpectralGrid(int dim, int points, double box_length);

    int dim() const { return dim_; }
    int points() const { return points_; }
    double box_length() const { return box_length_; }

    std::size_t total() const { return total_; }
    double dx() const { return box_length_ / points_; }
    double dxi() const { return two_pi_ / box_length_; }
    double cell_measure() const;   // (2 pi / L)^n
    double volume_element() const; // (L/N)^n

    // Signed integer mode number of an FFTW-ordered axis index.
    int mode_number(int axis_index) const {
        return axis_index < points_ / 2 ? axis_index : axis_index - points_;
    }
    double axis_freq(int axis_index) const { return dxi() * mode_number(axis_index); }
    bool is_nyquist(int axis_index) const { return axis_index == points_ / 2; }

    // Decomposes a flat row-major index into per-axis indices (unused axes 0).
    std::array<int, 3> unflatten(std::size_t flat) const;
    double xi_squared(std::size_t flat) const;
    std::array<double, 3> xi_vector(std::size_t flat) const;
    // Physical coordinate of a flat index.
    std::array<double, 3> x_vector(std::size_t flat) const;

    bool operator==(const SpectralGrid& o) const {
        return dim_ == o.dim_ && points_ == o.points_ && box_length_ == o.box_length_;
    }

private:
    static constexpr double two_pi_ = 6.283185307179586476925286766559;
    int dim_;
    int points_;
    double box_length_;
    std::size_t total_;
};

// Scalar field stored as complex spectral coefficients under the convention
//   fhat(xi) = integral exp(-i x.xi) f(x) dx,
// approximated by the scaled DFT of the physical samples.
class Field {
public:
    explicit Field(const SpectralGrid& grid);

    static Field from_physical(const SpectralGrid& grid, const std::vector<double>& samples);
    std::vector<double> to_physical() const; // real part of the inverse transform
    std::vector<cplx> to_physical_complex() const;

    const SpectralGrid& grid() const { return grid_; }
    const std::vector<cplx>& coeffs() const { return coef_; }
    std::vector<cplx>& coeffs() { return coef_; }
    cplx coeff(std::size_t i) const { return coef_[i]; }
    cplx& coeff(std::size_t i) { return coef_[i]; }
    cplx zero_mode() const { return coef_[0]; }

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double a);
    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double a, Field f) { return f *= a; }

    // Max relative deviation from conjugate symmetry fhat(-xi) = conj(fhat(xi)).
    double conjugate_symmetry_defect() const;

private:
    SpectralGrid grid_;
    std::vector<cplx> coef_;
};

enum class NormSpace { HomogeneousSobolev, InhomogeneousSobolev, Lp };

struct NormSpec {
    NormSpace space = NormSpace::HomogeneousSobolev;
    double order = 0.0; // s for Sobolev spaces, p for Lp
    int j = 0;          // time-derivative index, bookkeeping only
    double sigma = 0.0; // profile order, bookkeeping only

    static NormSpec hdot(double s) { return {NormSpace::HomogeneousSobolev, s, 0, 0.0}; }
    static NormSpec h(double s) { return {NormSpace::InhomogeneousSobolev, s, 0, 0.0}; }
    static NormSpec lp(double p) { return {NormSpace::Lp, p, 0, 0.0}; }
    std::string id() const;
};

// Parseval-consistent norm: (2 pi)^{-n/2} times the cell-weighted l2 norm of
// w(xi) fhat with w = |xi|^s or <xi>^s. Lp norms evaluate on physical samples.
// Throws NormUndefined when s <= -n/2 and the zero mode is non-negligible.
double sobolev_norm(const Field& f, const NormSpec& spec);

// fhat(0), i.e. the integral of f over the box.
double moment(const Field& f);

// Pointwise product with a symbol in frequency space. The symbol receives the
// frequency vector and its magnitude; it must be finite on every lattice
// point (NaN/Inf values throw).
using Symbol = std::function<cplx(const std::array<double, 3>& xi, double xi_mag)>;
Field apply_multiplier(const Field& f, const Symbol& symbol);
// Radial fast path used by the propagators and profiles.
Field apply_radial_multiplier(const Field& f, const std::function<cplx(double xi_mag)>& symbol);

// Derivative d/dx_axis (symbol i xi_axis, Nyquist mode zeroed).
Field derivative(const Field& f, int axis);
// Laplacian (symbol -|xi|^2).
Field laplacian(const Field& f);

// a * exp(-|x - c|^2 / (2 w^2)); throws BoxTooSmall when the tail at the
// nearest box face exceeds 1e-12 of the peak.
Field synthesize_gaussian(const SpectralGrid& grid, double amplitude, double width,
                          const std::array<double, 3>& center = {0.0, 0.0, 0.0});

// Smooth radial bump in frequency space supported on r0 <= |xi| <= r1.
Field synthesize_annulus(const SpectralGrid& grid, double r0, double r1, double amplitude = 1.0);

// a * (x_1/w) exp(-|x|^2/(2 w^2)); odd in x_1, so the moment vanishes.
Field synthesize_antisymmetric(const SpectralGrid& grid, double amplitude, double width);

// Binary snapshot: 32-byte header (magic "MGTF", version, dim, N, L) followed
// by little-endian float64 physical samples in row-major order.
void write_snapshot(const Field& f, const std::string& path);
Field read_snapshot(const std::string& path);

// Diffusion width + wave radius budget against box wrap-around; returns the
// fraction of L/4 consumed at time t (>1 means the budget is exceeded).
double no_wrap_budget(const SpectralGrid& grid, double tau, double delta, double gamma, double t);

} // namespace mgt

#endif
