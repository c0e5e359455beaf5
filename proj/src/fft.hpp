#pragma once

#include <array>
#include <complex>

namespace nsv::detail {

/// In-place unnormalised 3-D DFT on a row-major dims[0] x dims[1] x dims[2]
/// array. `sign` = -1 is the forward transform (exp(-i k.x)), +1 the
/// backward one. Plans are cached per (dims, sign); execution is reentrant.
void fft3d(std::complex<double>* data, const std::array<int, 3>& dims, int sign);

/// Smallest n >= lower whose only prime factors are 2, 3 and 5.
int smooth_size(int lower);

}  // namespace nsv::detail
