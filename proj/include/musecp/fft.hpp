#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace musecp {

/// Iterative radix-2 FFT with precomputed twiddles. Sizes must be powers of
/// two; all analysis windows in this library are.
class Fft {
public:
  explicit Fft(std::size_t size) : size_(size) {
    levels_ = 0;
    for (std::size_t s = size; s > 1; s >>= 1) ++levels_;
    twiddles_.resize(size / 2);
    for (std::size_t k = 0; k < size / 2; ++k) {
      double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                     static_cast<double>(size);
      twiddles_[k] = {std::cos(angle), std::sin(angle)};
    }
    bitrev_.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < levels_; ++b) r |= ((i >> b) & 1u) << (levels_ - 1 - b);
      bitrev_[i] = r;
    }
  }

  std::size_t size() const { return size_; }

  /// In-place forward transform. buf.size() must equal size().
  void forward(std::vector<std::complex<double>>& buf) const {
    for (std::size_t i = 0; i < size_; ++i) {
      std::size_t j = bitrev_[i];
      if (j > i) std::swap(buf[i], buf[j]);
    }
    for (std::size_t len = 2; len <= size_; len <<= 1) {
      std::size_t half = len / 2;
      std::size_t step = size_ / len;
      for (std::size_t start = 0; start < size_; start += len) {
        for (std::size_t k = 0; k < half; ++k) {
          auto w = twiddles_[k * step];
          auto u = buf[start + k];
          auto v = buf[start + k + half] * w;
          buf[start + k] = u + v;
          buf[start + k + half] = u - v;
        }
      }
    }
  }

private:
  std::size_t size_;
  std::size_t levels_;
  std::vector<std::complex<double>> twiddles_;
  std::vector<std::size_t> bitrev_;
};

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace musecp
