#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace relqm::fft {

/// In-place radix-2 transform; size must be a power of two. The inverse
/// applies the 1/n factor, so forward-then-inverse is the identity.
void transform(std::complex<double>* data, std::size_t n, bool inverse);

/// Transforms every line of a row-major D-dimensional array along one axis.
/// `shape` holds the extent of each axis (last axis fastest).
void transform_axis(std::vector<std::complex<double>>& data,
                    const std::vector<std::size_t>& shape, std::size_t axis,
                    bool inverse);

void transform_all_axes(std::vector<std::complex<double>>& data,
                        const std::vector<std::size_t>& shape, bool inverse);

}  // namespace relqm::fft
