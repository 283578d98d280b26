#pragma once

// Periodic uniform lattices in d*m dimensions and complex fields over them,
// with the h^{dm}-weighted discrete L2 convention and FFT-based spectral
// transforms. Everything else in the library is built on top of these.

#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

namespace fewbody {

using cplx = std::complex<double>;

struct Grid {
    int dim_per_particle = 1;   // d
    int num_particles = 1;      // m particle blocks, grid covers (R^d)^m
    double box_half_length = 1; // L, each axis is [-L, L) periodic
    int points_per_axis = 2;    // n, even
    double offset = 0.5;        // nodes at -L + (j+offset)*h

    int ndim() const { return dim_per_particle * num_particles; }
    double spacing() const { return 2.0 * box_half_length / points_per_axis; }
    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < ndim(); ++a) s *= static_cast<std::size_t>(points_per_axis);
        return s;
    }
    // cell volume in the discrete L2 inner product
    double cell_volume() const {
        double v = 1;
        for (int a = 0; a < ndim(); ++a) v *= spacing();
        return v;
    }
    double coord(int j) const { return -box_half_length + (j + offset) * spacing(); }
    // FFT-ordered wavenumber, k in (pi/L) * {-n/2, ..., n/2-1}
    double wavenumber(int j) const {
        const int n = points_per_axis;
        const int kk = (j <= n / 2 - 1) ? j : j - n;
        return M_PI / box_half_length * kk;
    }

    bool operator==(const Grid& o) const {
        return dim_per_particle == o.dim_per_particle && num_particles == o.num_particles &&
               box_half_length == o.box_half_length && points_per_axis == o.points_per_axis &&
               offset == o.offset;
    }
};

inline Grid make_grid(int d, int m, double L, int n, double offset = 0.5) {
    if (d < 1 || d > 3) throw std::invalid_argument("grid: dim_per_particle must be in {1,2,3}");
    if (m < 1) throw std::invalid_argument("grid: num_particles must be >= 1");
    if (d * m > 6) throw std::invalid_argument("grid: total dimension d*m exceeds 6");
    if (L <= 0) throw std::invalid_argument("grid: box_half_length must be positive");
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("grid: points_per_axis must be even and >= 2");
    if (offset < 0 || offset >= 1) throw std::invalid_argument("grid: offset must be in [0,1)");
    Grid g{d, m, L, n, offset};
    // guard against absurd allocations before they happen
    double total = 1;
    for (int a = 0; a < g.ndim(); ++a) total *= n;
    if (total > 6.9e7) throw std::length_error("grid: node count exceeds memory cap");
    return g;
}

struct Field {
    Grid grid;
    std::vector<cplx> values;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), values(g.size(), cplx{0, 0}) {}
    Field(const Grid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
        if (values.size() != g.size()) throw std::invalid_argument("field: size mismatch");
    }
    std::size_t size() const { return values.size(); }
};

// ---- elementwise algebra ----------------------------------------------------

inline Field& operator+=(Field& a, const Field& b) {
    for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] += b.values[i];
    return a;
}
inline Field& operator-=(Field& a, const Field& b) {
    for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] -= b.values[i];
    return a;
}
inline Field& operator*=(Field& a, cplx s) {
    for (auto& v : a.values) v *= s;
    return a;
}
inline Field operator+(Field a, const Field& b) { return a += b; }
inline Field operator-(Field a, const Field& b) { return a -= b; }
inline Field operator*(cplx s, Field a) { return a *= s; }

inline void axpy(cplx alpha, const Field& x, Field& y) {
    for (std::size_t i = 0; i < x.values.size(); ++i) y.values[i] += alpha * x.values[i];
}

inline cplx inner(const Field& f, const Field& g) {
    cplx s{0, 0};
    for (std::size_t i = 0; i < f.values.size(); ++i) s += std::conj(f.values[i]) * g.values[i];
    return f.grid.cell_volume() * s;
}
inline double norm(const Field& f) { return std::sqrt(std::abs(inner(f, f))); }

// ---- multi-index helpers (row-major, last axis fastest) ---------------------

inline void decode_index(const Grid& g, std::size_t idx, int* j) {
    const int n = g.points_per_axis;
    for (int a = g.ndim() - 1; a >= 0; --a) {
        j[a] = static_cast<int>(idx % n);
        idx /= n;
    }
}
inline std::size_t encode_index(const Grid& g, const int* j) {
    const int n = g.points_per_axis;
    std::size_t idx = 0;
    for (int a = 0; a < g.ndim(); ++a) idx = idx * n + static_cast<std::size_t>(j[a]);
    return idx;
}

// Fill field from a pointwise function of the node coordinates.
template <typename F>
Field sample(const Grid& g, F&& fn) {
    Field out(g);
    std::vector<int> j(g.ndim());
    std::vector<double> x(g.ndim());
    for (std::size_t i = 0; i < out.size(); ++i) {
        decode_index(g, i, j.data());
        for (int a = 0; a < g.ndim(); ++a) x[a] = g.coord(j[a]);
        out.values[i] = fn(x.data());
    }
    return out;
}

// ---- FFT --------------------------------------------------------------------
// Plans are cached per (rank, n, sign); planning is serialized, execution via
// the new-array interface is re-entrant.

namespace detail {

inline fftw_plan fft_plan(int rank, int n, int sign) {
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    static std::mutex mtx;
    std::lock_guard lock(mtx);
    auto key = std::make_tuple(rank, n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::size_t total = 1;
    for (int a = 0; a < rank; ++a) total *= static_cast<std::size_t>(n);
    std::vector<int> dims(rank, n);
    fftw_complex* buf_in = fftw_alloc_complex(total);
    fftw_complex* buf_out = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(rank, dims.data(), buf_in, buf_out, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf_in);
    fftw_free(buf_out);
    cache[key] = p;
    return p;
}

inline void fft_execute(const Grid& g, const cplx* in, cplx* out, int sign) {
    fftw_plan p = fft_plan(g.ndim(), g.points_per_axis, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

} // namespace detail

// Unnormalized forward/backward DFTs between node values and Fourier
// coefficients. apply_multiplier keeps the pair normalized so a unit
// multiplier is the identity.
inline std::vector<cplx> fft_forward(const Field& f) {
    std::vector<cplx> out(f.size());
    detail::fft_execute(f.grid, f.values.data(), out.data(), FFTW_FORWARD);
    return out;
}
inline Field fft_backward(const Grid& g, const std::vector<cplx>& coeffs) {
    Field out(g);
    detail::fft_execute(g, coeffs.data(), out.values.data(), FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(g.size());
    for (auto& v : out.values) v *= scale;
    return out;
}

// Apply a Fourier multiplier m(k) given as a function of the wavevector.
template <typename M>
Field apply_multiplier(const Field& f, M&& mult) {
    const Grid& g = f.grid;
    std::vector<cplx> coeffs = fft_forward(f);
    std::vector<int> j(g.ndim());
    std::vector<double> k(g.ndim());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        decode_index(g, i, j.data());
        for (int a = 0; a < g.ndim(); ++a) k[a] = g.wavenumber(j[a]);
        coeffs[i] *= mult(k.data());
    }
    return fft_backward(g, coeffs);
}

// ---- random fields ----------------------------------------------------------

inline Field random_field(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Field f(g);
    for (auto& v : f.values) v = cplx{nd(rng), nd(rng)};
    return f;
}

// Random field with Gaussian spectral decay; useful where a continuum-like
// (H^2-regular) test function is needed rather than white noise.
inline Field random_smooth_field(const Grid& g, std::uint64_t seed, double corr_length = 0.5) {
    Field noise = random_field(g, seed);
    return apply_multiplier(noise, [&](const double* k) {
        double k2 = 0;
        for (int a = 0; a < g.ndim(); ++a) k2 += k[a] * k[a];
        return std::exp(-0.5 * corr_length * corr_length * k2);
    });
}

} // namespace fewbody
