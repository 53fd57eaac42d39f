#pragma once

#include "nilfourier/grid.hpp"

namespace nilfourier {

/// DFT of a complex sequence, X_j = sum_n x_n e^{sign i 2 pi j n / N}
/// (unnormalized). Backed by FFTW.
CVec dft(const CVec& in, int sign);

}  // namespace nilfourier
