#pragma once

#include <complex>

namespace radmon::dsp {

// Forward unnormalized complex DFT of length n, out-of-place. Plans are
// cached per size; safe to call from multiple threads.
void fft_forward(int n, const std::complex<double>* in, std::complex<double>* out);

}  // namespace radmon::dsp
