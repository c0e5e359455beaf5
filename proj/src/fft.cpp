#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace nsv::detail {

namespace {

using PlanKey = std::tuple<int, int, int, int>;

struct PlanCache {
  std::mutex mutex;
  std::map<PlanKey, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(const std::array<int, 3>& dims, int sign) {
    const PlanKey key{dims[0], dims[1], dims[2], sign};
    std::lock_guard lock(mutex);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    // FFTW_ESTIMATE does not touch the buffer; UNALIGNED lets callers pass
    // std::vector storage to fftw_execute_dft.
    std::vector<fftw_complex> scratch(static_cast<std::size_t>(dims[0]) *
                                      dims[1] * dims[2]);
    fftw_plan plan = fftw_plan_dft_3d(
        dims[0], dims[1], dims[2], scratch.data(), scratch.data(),
        sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft3d(std::complex<double>* data, const std::array<int, 3>& dims,
           int sign) {
  fftw_plan plan = cache().get(dims, sign);
  auto* raw = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, raw, raw);
}

int smooth_size(int lower) {
  for (int n = lower < 1 ? 1 : lower;; ++n) {
    int m = n;
    for (int p : {2, 3, 5})
      while (m % p == 0) m /= p;
    if (m == 1) return n;
  }
}

}  // namespace nsv::detail
