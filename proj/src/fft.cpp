#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace vsheet::detail {
namespace {

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex plan_mutex;

const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard lock(plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<fftw_complex> a(n), b(n);
  Plans p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.forward = fftw_plan_dft_1d(n, a.data(), b.data(), FFTW_FORWARD, flags);
  p.backward = fftw_plan_dft_1d(n, a.data(), b.data(), FFTW_BACKWARD, flags);
  return cache.emplace(n, p).first->second;
}

void run(fftw_plan plan, std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  // FFTW's new-array execute does not modify the input for out-of-place plans.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan, src, dst);
}

}  // namespace

void fft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  run(plans_for(static_cast<int>(in.size())).forward, in, out);
}

void fft_backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  run(plans_for(static_cast<int>(in.size())).backward, in, out);
}

}  // namespace vsheet::detail
