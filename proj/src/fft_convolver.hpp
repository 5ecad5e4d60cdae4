#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace nlfb {

/// Linear convolution of a lattice signal with a symmetric weight stencil
/// w_0..w_R through FFTW real transforms. The plan and stencil spectrum of
/// the last transform length are kept; a growing window replaces them.
class FftConvolver {
 public:
  FftConvolver();
  ~FftConvolver();
  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;

  /// out[j - t0] = sum_{|o| <= R} w_|o| src[j - o - first] for j in t0..t1.
  void convolve(std::span<const double> weights, std::int64_t reach, std::span<const double> src,
                std::int64_t first, std::int64_t t0, std::int64_t t1, std::span<double> out);

  /// Smallest 2^a 3^b 5^c 7^d >= n.
  static std::size_t good_size(std::size_t n);

 private:
  struct Plan;
  Plan& plan_for(std::size_t n);

  std::unique_ptr<Plan> plan_;
  std::size_t spectrum_n_ = 0;
  std::int64_t spectrum_reach_ = -1;
  std::size_t spectrum_weights_ = 0;
};

}  // namespace nlfb
