#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace autochemo {

using cplx = std::complex<double>;

struct Mesh1D {
  int n = 0;
  double ell = 1.0;

  Mesh1D() = default;
  Mesh1D(int n_, double ell_) : n(n_), ell(ell_) {
    if (n < 8) throw std::invalid_argument("mesh needs at least 8 points");
    if (!(ell > 0)) throw std::invalid_argument("mesh length must be > 0");
  }
  double spacing() const { return ell / n; }
  double x(int i) const { return i * spacing(); }
};

// Square periodic mesh, n x n points, row-major with x as the slow index.
struct Mesh2D {
  int n = 0;
  double ell = 1.0;

  Mesh2D() = default;
  Mesh2D(int n_, double ell_) : n(n_), ell(ell_) {
    if (n < 8) throw std::invalid_argument("mesh needs at least 8 points");
    if (!(ell > 0)) throw std::invalid_argument("mesh length must be > 0");
  }
  double spacing() const { return ell / n; }
  std::size_t size() const { return std::size_t(n) * n; }
  std::size_t at(int ix, int iy) const { return std::size_t(ix) * n + iy; }
};

struct Field1D {
  Mesh1D mesh;
  std::vector<double> values;

  Field1D() = default;
  explicit Field1D(Mesh1D m, double fill = 0.0) : mesh(m), values(m.n, fill) {}
  Field1D(Mesh1D m, std::vector<double> v) : mesh(m), values(std::move(v)) {
    if (int(values.size()) != mesh.n) throw std::invalid_argument("field size does not match mesh");
  }
  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
};

struct Field2D {
  Mesh2D mesh;
  std::vector<double> values;

  Field2D() = default;
  explicit Field2D(Mesh2D m, double fill = 0.0) : mesh(m), values(m.size(), fill) {}
  Field2D(Mesh2D m, std::vector<double> v) : mesh(m), values(std::move(v)) {
    if (values.size() != mesh.size()) throw std::invalid_argument("field size does not match mesh");
  }
  double& operator()(int ix, int iy) { return values[mesh.at(ix, iy)]; }
  double operator()(int ix, int iy) const { return values[mesh.at(ix, iy)]; }
};

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

// signed integer frequency of FFT bin i
inline int fft_index(int i, int n) { return i <= (n - 1) / 2 ? i : i - n; }

inline std::vector<double> wavenumbers(int n, double ell) {
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = 2.0 * M_PI * fft_index(i, n) / ell;
  return k;
}
inline std::vector<double> wavenumbers(const Mesh1D& m) { return wavenumbers(m.n, m.ell); }

namespace detail {
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct FftwBuffer {
  T* p = nullptr;
  explicit FftwBuffer(std::size_t n) : p(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)))) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};
}  // namespace detail

// Real <-> half-complex transform pair with owned buffers. Unnormalized
// forward; inverse divides by the point count.
class RealFft {
 public:
  // dims = {n} or {n, n}
  explicit RealFft(std::vector<int> dims)
      : dims_(std::move(dims)),
        nreal_(count(dims_, false)),
        ncplx_(count(dims_, true)),
        rbuf_(nreal_),
        cbuf_(ncplx_) {
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    int rank = int(dims_.size());
    fwd_ = fftw_plan_dft_r2c(rank, dims_.data(), rbuf_.p, cbuf_.p, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r(rank, dims_.data(), cbuf_.p, rbuf_.p, FFTW_ESTIMATE);
    if (!fwd_ || !inv_) throw std::runtime_error("FFTW planning failed");
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t real_size() const { return nreal_; }
  std::size_t complex_size() const { return ncplx_; }

  void forward(const double* in, cplx* out) {
    std::copy(in, in + nreal_, rbuf_.p);
    fftw_execute(fwd_);
    auto* c = reinterpret_cast<cplx*>(cbuf_.p);
    std::copy(c, c + ncplx_, out);
  }
  void inverse(const cplx* in, double* out) {
    std::copy(in, in + ncplx_, reinterpret_cast<cplx*>(cbuf_.p));
    fftw_execute(inv_);
    double s = 1.0 / double(nreal_);
    for (std::size_t i = 0; i < nreal_; ++i) out[i] = rbuf_.p[i] * s;
  }

 private:
  static std::size_t count(const std::vector<int>& d, bool half) {
    if (d.empty() || d.size() > 2) throw std::invalid_argument("RealFft supports 1D and 2D");
    std::size_t c = 1;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i] < 1) throw std::invalid_argument("bad transform size");
      c *= (half && i + 1 == d.size()) ? std::size_t(d[i] / 2 + 1) : std::size_t(d[i]);
    }
    return c;
  }

  std::vector<int> dims_;
  std::size_t nreal_, ncplx_;
  detail::FftwBuffer<double> rbuf_;
  detail::FftwBuffer<fftw_complex> cbuf_;
  fftw_plan fwd_ = nullptr, inv_ = nullptr;
};

struct SingularSymbol : std::domain_error {
  using std::domain_error::domain_error;
};

// Cached transforms and wavenumbers for one 1D mesh. Not shareable across
// threads; give each thread its own instance.
class Spectral1D {
 public:
  explicit Spectral1D(Mesh1D m) : mesh_(m), fft_({m.n}), hat_(fft_.complex_size()) {
    int nh = int(fft_.complex_size());
    k_.resize(nh);
    for (int i = 0; i < nh; ++i) k_[i] = 2.0 * M_PI * i / m.ell;
  }

  const Mesh1D& mesh() const { return mesh_; }
  // non-negative wavenumbers of the half spectrum
  const std::vector<double>& half_k() const { return k_; }
  bool has_nyquist() const { return mesh_.n % 2 == 0; }

  void forward(const std::vector<double>& u, std::vector<cplx>& uh) {
    uh.resize(fft_.complex_size());
    fft_.forward(u.data(), uh.data());
  }
  void inverse(const std::vector<cplx>& uh, std::vector<double>& u) {
    u.resize(mesh_.n);
    fft_.inverse(uh.data(), u.data());
  }

  void derivative(const std::vector<double>& u, int order, std::vector<double>& out) {
    if (order < 1) throw std::invalid_argument("derivative order must be >= 1");
    forward(u, hat_);
    apply_derivative(hat_, order);
    inverse(hat_, out);
  }
  std::vector<double> derivative(const std::vector<double>& u, int order) {
    std::vector<double> out;
    derivative(u, order, out);
    return out;
  }

  // multiply a half spectrum by (ik)^order in place
  void apply_derivative(std::vector<cplx>& uh, int order) const {
    int nh = int(uh.size());
    for (int i = 0; i < nh; ++i) {
      cplx ik(0.0, k_[i]);
      cplx m = 1.0;
      for (int o = 0; o < order; ++o) m *= ik;
      uh[i] *= m;
    }
    if (has_nyquist() && order % 2 == 1) uh[nh - 1] = 0.0;
  }

  // solves (a - b d^2/dx^2) u = rhs
  void helmholtz(const std::vector<double>& rhs, double a, double b, std::vector<double>& out) {
    forward(rhs, hat_);
    for (std::size_t i = 0; i < hat_.size(); ++i) {
      double sym = a + b * k_[i] * k_[i];
      if (sym == 0.0) throw SingularSymbol("Helmholtz symbol vanishes at k = " + std::to_string(k_[i]));
      hat_[i] /= sym;
    }
    inverse(hat_, out);
  }

  void dealias(std::vector<cplx>& uh) const {
    int cutoff = mesh_.n / 3;
    for (std::size_t i = 0; i < uh.size(); ++i)
      if (int(i) > cutoff) uh[i] = 0.0;
  }

 private:
  Mesh1D mesh_;
  RealFft fft_;
  std::vector<double> k_;
  std::vector<cplx> hat_;
};

class Spectral2D {
 public:
  explicit Spectral2D(Mesh2D m)
      : mesh_(m), fft_({m.n, m.n}), nh_(m.n / 2 + 1), hat_(fft_.complex_size()), tmp_(fft_.complex_size()) {
    kx_ = wavenumbers(m.n, m.ell);
    ky_.resize(nh_);
    for (int j = 0; j < nh_; ++j) ky_[j] = 2.0 * M_PI * j / m.ell;
  }

  const Mesh2D& mesh() const { return mesh_; }
  int half_n() const { return nh_; }
  double kx(int i) const { return kx_[i]; }
  double ky(int j) const { return ky_[j]; }
  double k2(int i, int j) const { return kx_[i] * kx_[i] + ky_[j] * ky_[j]; }
  std::size_t hidx(int i, int j) const { return std::size_t(i) * nh_ + j; }

  void forward(const std::vector<double>& u, std::vector<cplx>& uh) {
    uh.resize(fft_.complex_size());
    fft_.forward(u.data(), uh.data());
  }
  void inverse(const std::vector<cplx>& uh, std::vector<double>& u) {
    u.resize(mesh_.size());
    fft_.inverse(uh.data(), u.data());
  }

  void gradient(const std::vector<double>& u, std::vector<double>& gx, std::vector<double>& gy) {
    forward(u, hat_);
    int n = mesh_.n;
    bool even = n % 2 == 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < nh_; ++j) {
        cplx v = hat_[hidx(i, j)];
        bool nyq_x = even && i == n / 2;
        bool nyq_y = even && j == n / 2;
        tmp_[hidx(i, j)] = nyq_x ? cplx(0.0) : v * cplx(0.0, kx_[i]);
        hat_[hidx(i, j)] = nyq_y ? cplx(0.0) : v * cplx(0.0, ky_[j]);
      }
    inverse(tmp_, gx);
    inverse(hat_, gy);
  }

  void laplacian(const std::vector<double>& u, std::vector<double>& out) {
    forward(u, hat_);
    for (int i = 0; i < mesh_.n; ++i)
      for (int j = 0; j < nh_; ++j) hat_[hidx(i, j)] *= -k2(i, j);
    inverse(hat_, out);
  }

  // solves (a - b laplacian) u = rhs
  void helmholtz(const std::vector<double>& rhs, double a, double b, std::vector<double>& out) {
    forward(rhs, hat_);
    for (int i = 0; i < mesh_.n; ++i)
      for (int j = 0; j < nh_; ++j) {
        double sym = a + b * k2(i, j);
        if (sym == 0.0) throw SingularSymbol("Helmholtz symbol vanishes");
        hat_[hidx(i, j)] /= sym;
      }
    inverse(hat_, out);
  }

 private:
  Mesh2D mesh_;
  RealFft fft_;
  int nh_;
  std::vector<double> kx_, ky_;
  std::vector<cplx> hat_, tmp_;
};

// Free-function forms for one-off use; solvers keep a Spectral1D/2D around.
inline Field1D derivative(const Field1D& u, int order) {
  Spectral1D s(u.mesh);
  return Field1D(u.mesh, s.derivative(u.values, order));
}

inline Field1D helmholtz_solve(const Field1D& rhs, double a, double b) {
  Spectral1D s(rhs.mesh);
  std::vector<double> out;
  s.helmholtz(rhs.values, a, b, out);
  return Field1D(rhs.mesh, std::move(out));
}

inline Field2D helmholtz_solve(const Field2D& rhs, double a, double b) {
  Spectral2D s(rhs.mesh);
  std::vector<double> out;
  s.helmholtz(rhs.values, a, b, out);
  return Field2D(rhs.mesh, std::move(out));
}

inline std::pair<Field2D, Field2D> gradient(const Field2D& u) {
  Spectral2D s(u.mesh);
  std::vector<double> gx, gy;
  s.gradient(u.values, gx, gy);
  return {Field2D(u.mesh, std::move(gx)), Field2D(u.mesh, std::move(gy))};
}

// Full complex spectrum in FFT order (unnormalized forward transform).
inline std::vector<cplx> full_spectrum(const Field1D& u) {
  int n = u.mesh.n;
  RealFft fft({n});
  std::vector<cplx> half(fft.complex_size()), full(n);
  fft.forward(u.values.data(), half.data());
  for (int i = 0; i < n; ++i) full[i] = i < int(half.size()) ? half[i] : std::conj(half[n - i]);
  return full;
}

}  // namespace autochemo
