#include "internal/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace radmon::dsp {

namespace {

// FFTW planning is not thread-safe and FFTW_ESTIMATE plans ignore the input
// buffer, so one shared plan per size plus per-call scratch is enough.
std::mutex plan_mutex;
std::map<int, fftw_plan>& plan_cache() {
  static std::map<int, fftw_plan> cache;
  return cache;
}

fftw_plan plan_for(int n) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<fftw_complex> tmp_in(n), tmp_out(n);
  fftw_plan p = fftw_plan_dft_1d(n, tmp_in.data(), tmp_out.data(), FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(n, p);
  return p;
}

}  // namespace

void fft_forward(int n, const std::complex<double>* in, std::complex<double>* out) {
  fftw_plan p = plan_for(n);
  // fftw_complex and std::complex<double> share layout per the C++ standard
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace radmon::dsp
