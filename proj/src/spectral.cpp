#include "mgt/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "mgt/errors.hpp"

namespace mgt {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// FFTW plan cache. Plans are created once per (dim, N) with FFTW_ESTIMATE
// (deterministic) and FFTW_UNALIGNED so they can run on any buffer.
class FftCache {
public:
    static FftCache& instance() {
        static FftCache c;
        return c;
    }

    void forward(const SpectralGrid& g, std::vector<cplx>& inout) {
        execute(g, inout, FFTW_FORWARD);
    }
    void backward(const SpectralGrid& g, std::vector<cplx>& inout) {
        execute(g, inout, FFTW_BACKWARD);
    }

private:
    struct Key {
        int dim, n, sign;
        bool operator<(const Key& o) const {
            return std::tie(dim, n, sign) < std::tie(o.dim, o.n, o.sign);
        }
    };

    void execute(const SpectralGrid& g, std::vector<cplx>& inout, int sign) {
        fftw_plan plan = nullptr;
        {
            std::lock_guard<std::mutex> lock(mu_);
            Key key{g.dim(), g.points(), sign};
            auto it = plans_.find(key);
            if (it == plans_.end()) {
                std::vector<cplx> probe(g.total());
                int n[3] = {g.points(), g.points(), g.points()};
                plan = fftw_plan_dft(g.dim(), n,
                                     reinterpret_cast<fftw_complex*>(probe.data()),
                                     reinterpret_cast<fftw_complex*>(probe.data()),
                                     sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
                plans_.emplace(key, plan);
            } else {
                plan = it->second;
            }
        }
        auto* p = reinterpret_cast<fftw_complex*>(inout.data());
        fftw_execute_dft(plan, p, p);
    }

    std::mutex mu_;
    std::map<Key, fftw_plan> plans_;
};

// Per-axis alternating sign (-1)^k translating between the FFTW origin at
// x = 0 and the box origin at x = -L/2.
inline double center_phase(const std::array<int, 3>& idx, int dim) {
    int parity = 0;
    for (int a = 0; a < dim; ++a) parity ^= (idx[a] & 1);
    return parity ? -1.0 : 1.0;
}

} // namespace

SpectralGrid::SpectralGrid(int dim, int points, double box_length)
    : dim_(dim), points_(points), box_length_(box_length) {
    if (dim < 1 || dim > 3) throw InvalidParameter("grid dim must be 1, 2, or 3");
    if (points < 16 || !power_of_two(points))
        throw InvalidParameter("grid points must be a power of two >= 16");
    if (!(box_length > 0.0)) throw InvalidParameter("box length must be > 0");
    total_ = 1;
    for (int a = 0; a < dim; ++a) total_ *= static_cast<std::size_t>(points);
}

double SpectralGrid::cell_measure() const {
    double m = 1.0;
    for (int a = 0; a < dim_; ++a) m *= dxi();
    return m;
}

double SpectralGrid::volume_element() const {
    double m = 1.0;
    for (int a = 0; a < dim_; ++a) m *= dx();
    return m;
}

std::array<int, 3> SpectralGrid::unflatten(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % points_);
        flat /= points_;
    }
    return idx;
}

double SpectralGrid::xi_squared(std::size_t flat) const {
    auto idx = unflatten(flat);
    double s = 0.0;
    for (int a = 0; a < dim_; ++a) {
        const double f = axis_freq(idx[a]);
        s += f * f;
    }
    return s;
}

std::array<double, 3> SpectralGrid::xi_vector(std::size_t flat) const {
    auto idx = unflatten(flat);
    std::array<double, 3> v{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) v[a] = axis_freq(idx[a]);
    return v;
}

std::array<double, 3> SpectralGrid::x_vector(std::size_t flat) const {
    auto idx = unflatten(flat);
    std::array<double, 3> v{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) v[a] = -0.5 * box_length_ + idx[a] * dx();
    return v;
}

Field::Field(const SpectralGrid& grid) : grid_(grid), coef_(grid.total(), cplx{0.0, 0.0}) {}

Field Field::from_physical(const SpectralGrid& grid, const std::vector<double>& samples) {
    if (samples.size() != grid.total())
        throw ShapeMismatch("physical sample count does not match grid");
    Field f(grid);
    for (std::size_t i = 0; i < samples.size(); ++i) f.coef_[i] = cplx(samples[i], 0.0);
    FftCache::instance().forward(grid, f.coef_);
    const double scale = grid.volume_element();
    for (std::size_t i = 0; i < f.coef_.size(); ++i)
        f.coef_[i] *= scale * center_phase(grid.unflatten(i), grid.dim());
    return f;
}

std::vector<cplx> Field::to_physical_complex() const {
    std::vector<cplx> buf(coef_);
    const double scale = 1.0;
    (void)scale;
    for (std::size_t i = 0; i < buf.size(); ++i)
        buf[i] *= center_phase(grid_.unflatten(i), grid_.dim());
    FftCache::instance().backward(grid_, buf);
    double vol = 1.0;
    for (int a = 0; a < grid_.dim(); ++a) vol *= grid_.box_length();
    const double inv = 1.0 / vol;
    for (auto& v : buf) v *= inv;
    return buf;
}

std::vector<double> Field::to_physical() const {
    auto buf = to_physical_complex();
    std::vector<double> out(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
    return out;
}

Field& Field::operator+=(const Field& o) {
    if (!(grid_ == o.grid_)) throw ShapeMismatch("field grids differ");
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += o.coef_[i];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    if (!(grid_ == o.grid_)) throw ShapeMismatch("field grids differ");
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] -= o.coef_[i];
    return *this;
}

Field& Field::operator*=(double a) {
    for (auto& v : coef_) v *= a;
    return *this;
}

double Field::conjugate_symmetry_defect() const {
    const int n = grid_.points();
    double max_abs = 0.0;
    for (const auto& v : coef_) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < coef_.size(); ++i) {
        auto idx = grid_.unflatten(i);
        std::array<int, 3> mirror = idx;
        for (int a = 0; a < grid_.dim(); ++a) mirror[a] = (n - idx[a]) % n;
        std::size_t flat = 0;
        for (int a = 0; a < grid_.dim(); ++a) flat = flat * n + mirror[a];
        worst = std::max(worst, std::abs(coef_[i] - std::conj(coef_[flat])) / max_abs);
    }
    return worst;
}

std::string NormSpec::id() const {
    std::ostringstream os;
    switch (space) {
        case NormSpace::HomogeneousSobolev: os << "Hdot" << order; break;
        case NormSpace::InhomogeneousSobolev: os << "H" << order; break;
        case NormSpace::Lp: os << "L" << order; break;
    }
    return os.str();
}

double sobolev_norm(const Field& f, const NormSpec& spec) {
    const SpectralGrid& g = f.grid();
    const int n = g.dim();
    if (spec.space == NormSpace::Lp) {
        const double p = spec.order;
        auto phys = f.to_physical();
        if (p == std::numeric_limits<double>::infinity()) {
            double m = 0.0;
            for (double v : phys) m = std::max(m, std::abs(v));
            return m;
        }
        if (!(p >= 1.0)) throw InvalidParameter("Lp norm requires p >= 1");
        double acc = 0.0;
        for (double v : phys) acc += std::pow(std::abs(v), p);
        return std::pow(acc * g.volume_element(), 1.0 / p);
    }

    const double s = spec.order;
    const bool homogeneous = spec.space == NormSpace::HomogeneousSobolev;
    double max_abs = 0.0;
    for (const auto& v : f.coeffs()) max_abs = std::max(max_abs, std::abs(v));
    double acc = 0.0;
    for (std::size_t i = 0; i < g.total(); ++i) {
        const double xi2 = g.xi_squared(i);
        double w;
        if (homogeneous) {
            if (xi2 == 0.0) {
                if (s > 0.0) continue; // weight 0
                if (s == 0.0) {
                    w = 1.0;
                } else {
                    // s < 0: the zero mode carries an infinite weight; skip it
                    // when the coefficient is negligible, otherwise the norm
                    // is undefined for s <= -n/2.
                    if (std::abs(f.coeff(i)) <= 1e-12 * max_abs) continue;
                    if (s <= -0.5 * n)
                        throw NormUndefined("Hdot norm with s <= -n/2 on mean-nonzero field");
                    continue; // cell around 0 contributes o(1); drop it
                }
            } else {
                w = std::pow(xi2, s);
            }
        } else {
            w = std::pow(1.0 + xi2, s);
        }
        const double mag = std::abs(f.coeff(i));
        acc += w * mag * mag;
    }
    const double cell = g.cell_measure();
    const double two_pi_pow = std::pow(2.0 * kPi, -0.5 * n);
    return two_pi_pow * std::sqrt(acc * cell);
}

double moment(const Field& f) { return f.zero_mode().real(); }

Field apply_multiplier(const Field& f, const Symbol& symbol) {
    Field out(f.grid());
    for (std::size_t i = 0; i < f.grid().total(); ++i) {
        auto xi = f.grid().xi_vector(i);
        const double mag = std::sqrt(f.grid().xi_squared(i));
        const cplx s = symbol(xi, mag);
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            std::ostringstream os;
            os << "multiplier symbol not finite at |xi|=" << mag;
            throw InvalidParameter(os.str());
        }
        out.coeff(i) = s * f.coeff(i);
    }
    return out;
}

Field apply_radial_multiplier(const Field& f, const std::function<cplx(double)>& symbol) {
    Field out(f.grid());
    for (std::size_t i = 0; i < f.grid().total(); ++i) {
        const double mag = std::sqrt(f.grid().xi_squared(i));
        const cplx s = symbol(mag);
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            std::ostringstream os;
            os << "multiplier symbol not finite at |xi|=" << mag;
            throw InvalidParameter(os.str());
        }
        out.coeff(i) = s * f.coeff(i);
    }
    return out;
}

Field derivative(const Field& f, int axis) {
    if (axis < 0 || axis >= f.grid().dim()) throw InvalidParameter("derivative axis out of range");
    const SpectralGrid& g = f.grid();
    Field out(g);
    for (std::size_t i = 0; i < g.total(); ++i) {
        auto idx = g.unflatten(i);
        if (g.is_nyquist(idx[axis])) {
            out.coeff(i) = 0.0; // odd symbol: drop the sign-ambiguous mode
        } else {
            out.coeff(i) = cplx(0.0, g.axis_freq(idx[axis])) * f.coeff(i);
        }
    }
    return out;
}

Field laplacian(const Field& f) {
    Field out(f.grid());
    for (std::size_t i = 0; i < f.grid().total(); ++i)
        out.coeff(i) = -f.grid().xi_squared(i) * f.coeff(i);
    return out;
}

Field synthesize_gaussian(const SpectralGrid& grid, double amplitude, double width,
                          const std::array<double, 3>& center) {
    if (!(width > 0.0)) throw InvalidParameter("gaussian width must be > 0");
    const double half = 0.5 * grid.box_length();
    double nearest_face = half;
    for (int a = 0; a < grid.dim(); ++a)
        nearest_face = std::min(nearest_face, half - std::abs(center[a]));
    if (nearest_face <= 0.0 || std::exp(-nearest_face * nearest_face / (2.0 * width * width)) > 1e-12)
        throw BoxTooSmall("gaussian tail exceeds 1e-12 of peak at box face");

    std::vector<double> phys(grid.total());
    for (std::size_t i = 0; i < grid.total(); ++i) {
        auto x = grid.x_vector(i);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const double d = x[a] - center[a];
            r2 += d * d;
        }
        phys[i] = amplitude * std::exp(-r2 / (2.0 * width * width));
    }
    return Field::from_physical(grid, phys);
}

namespace {
double smooth_step01(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}
} // namespace

Field synthesize_annulus(const SpectralGrid& grid, double r0, double r1, double amplitude) {
    if (!(0.0 < r0 && r0 < r1)) throw InvalidParameter("annulus requires 0 < r0 < r1");
    Field f(grid);
    for (std::size_t i = 0; i < grid.total(); ++i) {
        const double r = std::sqrt(grid.xi_squared(i));
        const double u = (r - r0) / (r1 - r0);
        f.coeff(i) = amplitude * smooth_step01(2.0 * u) * smooth_step01(2.0 * (1.0 - u));
    }
    return f;
}

Field synthesize_antisymmetric(const SpectralGrid& grid, double amplitude, double width) {
    if (!(width > 0.0)) throw InvalidParameter("width must be > 0");
    std::vector<double> phys(grid.total());
    for (std::size_t i = 0; i < grid.total(); ++i) {
        auto x = grid.x_vector(i);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) r2 += x[a] * x[a];
        phys[i] = amplitude * (x[0] / width) * std::exp(-r2 / (2.0 * width * width));
    }
    return Field::from_physical(grid, phys);
}

void write_snapshot(const Field& f, const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "snapshot writer assumes a little-endian host");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open snapshot for writing: " + path);
    const char magic[4] = {'M', 'G', 'T', 'F'};
    const std::uint32_t version = 1;
    const std::uint32_t dim = static_cast<std::uint32_t>(f.grid().dim());
    const std::uint32_t n = static_cast<std::uint32_t>(f.grid().points());
    const double L = f.grid().box_length();
    const std::uint64_t reserved = 0;
    os.write(magic, 4);
    os.write(reinterpret_cast<const char*>(&version), 4);
    os.write(reinterpret_cast<const char*>(&dim), 4);
    os.write(reinterpret_cast<const char*>(&n), 4);
    os.write(reinterpret_cast<const char*>(&L), 8);
    os.write(reinterpret_cast<const char*>(&reserved), 8);
    auto phys = f.to_physical();
    os.write(reinterpret_cast<const char*>(phys.data()),
             static_cast<std::streamsize>(phys.size() * sizeof(double)));
    if (!os) throw IoError("snapshot write failed: " + path);
}

Field read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open snapshot: " + path);
    char magic[4];
    std::uint32_t version, dim, n;
    double L;
    std::uint64_t reserved;
    is.read(magic, 4);
    is.read(reinterpret_cast<char*>(&version), 4);
    is.read(reinterpret_cast<char*>(&dim), 4);
    is.read(reinterpret_cast<char*>(&n), 4);
    is.read(reinterpret_cast<char*>(&L), 8);
    is.read(reinterpret_cast<char*>(&reserved), 8);
    if (!is || std::memcmp(magic, "MGTF", 4) != 0)
        throw IoError("bad snapshot header: " + path);
    if (version != 1) throw IoError("unsupported snapshot version");
    SpectralGrid grid(static_cast<int>(dim), static_cast<int>(n), L);
    std::vector<double> phys(grid.total());
    is.read(reinterpret_cast<char*>(phys.data()),
            static_cast<std::streamsize>(phys.size() * sizeof(double)));
    if (!is) throw IoError("snapshot truncated: " + path);
    return Field::from_physical(grid, phys);
}

double no_wrap_budget(const SpectralGrid& grid, double tau, double delta, double gamma, double t) {
    const double diffusion = std::sqrt(std::max(0.0, 4.0 * t / gamma));
    const double wave = t * std::sqrt(std::max(0.0, delta / tau + 1.0));
    return (diffusion + wave) / (0.25 * grid.box_length());
}

} // namespace mgt
