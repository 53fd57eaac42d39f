#include "nilfourier/fft.hpp"

#include <fftw3.h>

namespace nilfourier {

CVec dft(const CVec& in, int sign) {
  const int n = int(in.size());
  CVec out(n);
  // FFTW_FORWARD is e^{-i...}, FFTW_BACKWARD e^{+i...}
  fftw_plan plan = fftw_plan_dft_1d(
      n, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
      reinterpret_cast<fftw_complex*>(out.data()), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
      FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out;
}

}  // namespace nilfourier
