#include "hhg/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace hhg::fft {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<cplx> transform(std::span<const cplx> x, int sign) {
  const int n = static_cast<int>(x.size());
  std::vector<cplx> in(x.begin(), x.end());
  std::vector<cplx> out(x.size());
  if (n == 0) return out;
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

std::vector<cplx> forward(std::span<const cplx> x) { return transform(x, FFTW_FORWARD); }
std::vector<cplx> backward(std::span<const cplx> x) { return transform(x, FFTW_BACKWARD); }

}  // namespace hhg::fft
