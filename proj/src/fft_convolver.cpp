#include "fft_convolver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>

namespace nlfb {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct FftwDeleter {
  void operator()(T* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <class T>
FftwBuffer<T> fftw_alloc(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

}  // namespace

struct FftConvolver::Plan {
  std::size_t n = 0;
  FftwBuffer<double> real;
  FftwBuffer<fftw_complex> spec;
  FftwBuffer<fftw_complex> kernel_spec;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Plan(std::size_t size)
      : n(size),
        real(fftw_alloc<double>(size)),
        spec(fftw_alloc<fftw_complex>(size / 2 + 1)),
        kernel_spec(fftw_alloc<fftw_complex>(size / 2 + 1)) {
    std::lock_guard lock(planner_mutex());
    const int len = static_cast<int>(size);
    forward = fftw_plan_dft_r2c_1d(len, real.get(), spec.get(), FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(len, spec.get(), real.get(), FFTW_ESTIMATE);
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
};

FftConvolver::FftConvolver() = default;
FftConvolver::~FftConvolver() = default;

std::size_t FftConvolver::good_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

FftConvolver::Plan& FftConvolver::plan_for(std::size_t n) {
  if (!plan_ || plan_->n != n) {
    plan_.reset();
    plan_ = std::make_unique<Plan>(n);
    spectrum_n_ = 0;
  }
  return *plan_;
}

void FftConvolver::convolve(std::span<const double> weights, std::int64_t reach, std::span<const double> src,
                            std::int64_t first, std::int64_t t0, std::int64_t t1, std::span<double> out) {
  const auto s = static_cast<std::int64_t>(src.size());
  // full linear convolution has s + 2R - 1 samples; c[n] sits at lattice index first + n - R
  const std::size_t need = static_cast<std::size_t>(s + 2 * reach);
  // round up in coarse steps so the cached stencil spectrum survives window growth
  std::size_t n = good_size(std::max<std::size_t>(need, 64));
  if (spectrum_n_ >= need && spectrum_n_ <= 2 * need + 64) n = spectrum_n_;
  Plan& plan = plan_for(n);
  const std::size_t nc = n / 2 + 1;

  if (spectrum_n_ != n || spectrum_reach_ != reach || spectrum_weights_ != weights.size()) {
    std::fill(plan.real.get(), plan.real.get() + n, 0.0);
    // stencil centered at index R: k[o + R] = w_|o|
    for (std::int64_t o = -reach; o <= reach; ++o)
      plan.real[static_cast<std::size_t>(o + reach)] = weights[static_cast<std::size_t>(std::abs(o))];
    fftw_execute_dft_r2c(plan.forward, plan.real.get(), plan.kernel_spec.get());
    spectrum_n_ = n;
    spectrum_reach_ = reach;
    spectrum_weights_ = weights.size();
  }

  std::fill(plan.real.get(), plan.real.get() + n, 0.0);
  std::copy(src.begin(), src.end(), plan.real.get());
  fftw_execute_dft_r2c(plan.forward, plan.real.get(), plan.spec.get());
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < nc; ++k) {
    const std::complex<double> a(plan.spec[k][0], plan.spec[k][1]);
    const std::complex<double> b(plan.kernel_spec[k][0], plan.kernel_spec[k][1]);
    const std::complex<double> c = a * b * scale;
    plan.spec[k][0] = c.real();
    plan.spec[k][1] = c.imag();
  }
  fftw_execute_dft_c2r(plan.backward, plan.spec.get(), plan.real.get());

  for (std::int64_t j = t0; j <= t1; ++j) {
    const std::int64_t idx = j - first + reach;
    out[static_cast<std::size_t>(j - t0)] =
        (idx >= 0 && idx < static_cast<std::int64_t>(need) - 1) ? plan.real[static_cast<std::size_t>(idx)] : 0.0;
  }
}

}  // namespace nlfb
