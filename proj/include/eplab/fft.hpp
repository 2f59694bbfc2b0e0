#pragma once
// Process-wide cache of FFTW plans. All transforms are full complex-to-complex
// over the grid lattice. Plan creation is serialized behind a mutex; execution
// uses the new-array interface, which is safe from concurrent threads as long
// as every buffer comes from fftw_malloc (guaranteed by fftw_allocator below).

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <new>
#include <vector>

#include "eplab/grid.hpp"

namespace eplab {

template <class T>
struct fftw_allocator {
  using value_type = T;
  fftw_allocator() = default;
  template <class U>
  fftw_allocator(const fftw_allocator<U>&) {}
  T* allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) { fftw_free(p); }
  template <class U>
  bool operator==(const fftw_allocator<U>&) const {
    return true;
  }
  template <class U>
  bool operator!=(const fftw_allocator<U>&) const {
    return false;
  }
};

using CVec = std::vector<std::complex<double>, fftw_allocator<std::complex<double>>>;
using RVec = std::vector<double, fftw_allocator<double>>;

class FftEngine {
 public:
  static FftEngine& instance() {
    static FftEngine engine;
    return engine;
  }

  // Unnormalized transforms; in and out must be distinct fftw_malloc'd buffers.
  void forward(const Grid& g, const std::complex<double>* in, std::complex<double>* out) {
    execute(plans(g).fwd, in, out);
  }
  void backward(const Grid& g, const std::complex<double>* in, std::complex<double>* out) {
    execute(plans(g).bwd, in, out);
  }

  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

 private:
  struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
  };

  FftEngine() = default;
  ~FftEngine() {
    for (auto& [key, pp] : cache_) {
      fftw_destroy_plan(pp.fwd);
      fftw_destroy_plan(pp.bwd);
    }
  }

  static void execute(fftw_plan plan, const std::complex<double>* in, std::complex<double>* out) {
    fftw_execute_dft(plan,
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

  const PlanPair& plans(const Grid& g) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(g.points);
    if (it != cache_.end()) return it->second;
    CVec a(g.total), b(g.total);
    PlanPair pp;
    // FFTW_ESTIMATE keeps planning deterministic, so repeated runs of the
    // same configuration produce bitwise-identical reports. FFTW_MEASURE
    // selects plans by timing and may change the rounding pattern between
    // processes.
    pp.fwd = fftw_plan_dft(g.dim, g.points.data(), reinterpret_cast<fftw_complex*>(a.data()),
                           reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    pp.bwd = fftw_plan_dft(g.dim, g.points.data(), reinterpret_cast<fftw_complex*>(a.data()),
                           reinterpret_cast<fftw_complex*>(b.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
    if (pp.fwd == nullptr || pp.bwd == nullptr) throw error("FftEngine: plan creation failed");
    return cache_.emplace(g.points, pp).first->second;
  }

  std::mutex mutex_;
  std::map<std::vector<int>, PlanPair> cache_;
};

}  // namespace eplab
