#include "relqm/fft.hpp"

#include <numbers>
#include <stdexcept>

namespace relqm::fft {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void transform(std::complex<double>* data, std::size_t n, bool inverse) {
  if (!is_power_of_two(n))
    throw std::invalid_argument("fft: length must be a power of two");

  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen = std::polar(1.0, angle);
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) data[i] *= scale;
  }
}

void transform_axis(std::vector<std::complex<double>>& data,
                    const std::vector<std::size_t>& shape, std::size_t axis,
                    bool inverse) {
  if (axis >= shape.size())
    throw std::invalid_argument("fft: axis out of range");
  const std::size_t n = shape[axis];

  std::size_t stride = 1;
  for (std::size_t a = axis + 1; a < shape.size(); ++a) stride *= shape[a];
  std::size_t outer = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= shape[a];

  std::vector<std::complex<double>> line(n);
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t block = o * n * stride;
    for (std::size_t s = 0; s < stride; ++s) {
      for (std::size_t k = 0; k < n; ++k) line[k] = data[block + k * stride + s];
      transform(line.data(), n, inverse);
      for (std::size_t k = 0; k < n; ++k) data[block + k * stride + s] = line[k];
    }
  }
}

void transform_all_axes(std::vector<std::complex<double>>& data,
                        const std::vector<std::size_t>& shape, bool inverse) {
  for (std::size_t a = 0; a < shape.size(); ++a)
    transform_axis(data, shape, a, inverse);
}

}  // namespace relqm::fft
