#pragma once

#include <atomic>
#include <cstddef>
#include <optional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lpcheck {

// Every parallel kernel has a serial twin with the same result; tests
// compare the two and the bench target times them side by side.
enum class ExecMode { serial, parallel };

inline ExecMode default_exec_mode() {
#ifdef _OPENMP
  return ExecMode::parallel;
#else
  return ExecMode::serial;
#endif
}

inline int worker_count(ExecMode mode) {
#ifdef _OPENMP
  return mode == ExecMode::parallel ? omp_get_max_threads() : 1;
#else
  (void)mode;
  return 1;
#endif
}

// Least index in [0,n) satisfying pred, independent of scheduling: the
// parallel path races chunks but keeps an atomic minimum and never
// returns anything but the global least hit.
template <typename Pred>
std::optional<size_t> find_first_index(size_t n, ExecMode mode, Pred&& pred) {
  if (n == 0) return std::nullopt;
#ifdef _OPENMP
  if (mode == ExecMode::parallel && omp_get_max_threads() > 1) {
    std::atomic<size_t> best{n};
    const size_t chunk = std::max<size_t>(1024, n / (16 * (size_t)omp_get_max_threads() + 1));
    const size_t nchunks = (n + chunk - 1) / chunk;
#pragma omp parallel for schedule(dynamic, 1)
    for (size_t c = 0; c < nchunks; c++) {
      size_t lo = c * chunk;
      if (lo >= best.load(std::memory_order_relaxed)) continue;
      size_t hi = std::min(n, lo + chunk);
      for (size_t i = lo; i < hi; i++) {
        if (i >= best.load(std::memory_order_relaxed)) break;
        if (pred(i)) {
          size_t cur = best.load(std::memory_order_relaxed);
          while (i < cur && !best.compare_exchange_weak(cur, i)) {
          }
          break;
        }
      }
    }
    size_t r = best.load();
    if (r < n) return r;
    return std::nullopt;
  }
#else
  (void)mode;
#endif
  for (size_t i = 0; i < n; i++)
    if (pred(i)) return i;
  return std::nullopt;
}

// All indices in [0,n) satisfying pred, ascending. Used for witness
// collection where result order must not depend on worker timing.
template <typename Pred>
std::vector<size_t> collect_indices(size_t n, ExecMode mode, Pred&& pred) {
  std::vector<size_t> out;
#ifdef _OPENMP
  if (mode == ExecMode::parallel && omp_get_max_threads() > 1 && n >= 2048) {
    std::vector<uint8_t> hit(n, 0);
#pragma omp parallel for schedule(dynamic, 512)
    for (size_t i = 0; i < n; i++)
      if (pred(i)) hit[i] = 1;
    for (size_t i = 0; i < n; i++)
      if (hit[i]) out.push_back(i);
    return out;
  }
#else
  (void)mode;
#endif
  for (size_t i = 0; i < n; i++)
    if (pred(i)) out.push_back(i);
  return out;
}

// Per-worker accumulation: fn(worker, lo, hi) handles one slice. The
// caller merges worker results in worker order for determinism.
template <typename Fn>
void sliced_for(size_t n, ExecMode mode, int workers, Fn&& fn) {
  if (n == 0) return;
#ifdef _OPENMP
  if (mode == ExecMode::parallel && workers > 1) {
    size_t per = (n + workers - 1) / workers;
#pragma omp parallel for schedule(static, 1)
    for (int w = 0; w < workers; w++) {
      size_t lo = (size_t)w * per;
      size_t hi = std::min(n, lo + per);
      if (lo < hi) fn(w, lo, hi);
    }
    return;
  }
#else
  (void)mode;
  (void)workers;
#endif
  fn(0, 0, n);
}

}  // namespace lpcheck
