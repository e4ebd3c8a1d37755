#ifndef ATOMWAVE_SWEEP_HPP
#define ATOMWAVE_SWEEP_HPP

// Deterministic parallel sweep over independent cells. Workers pull cell
// indices from a shared counter; results land in a slot per index, so the
// merged output never depends on the worker count or completion order.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "atomwave/error.hpp"

namespace atomwave {

template <class T>
struct CellResult {
  std::size_t index = 0;
  std::optional<T> value;  // empty when the cell failed
  std::string error;       // diagnostic of a failed cell

  bool ok() const { return value.has_value(); }
};

/// Worker count from ATOMWAVE_WORKERS, else the hardware concurrency.
inline int default_workers() {
  if (const char* env = std::getenv("ATOMWAVE_WORKERS")) {
    char* end = nullptr;
    const long w = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && w > 0) return static_cast<int>(w);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Runs fn(i) for i in [0, cells). A throwing cell is recorded as failed and
/// the sweep carries on.
template <class T>
std::vector<CellResult<T>> run_sweep(std::size_t cells, int workers,
                                     const std::function<T(std::size_t)>& fn) {
  if (workers < 1) fail(ErrorKind::InvalidArgument, "run_sweep: workers must be >= 1");
  std::vector<CellResult<T>> out(cells);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      out[i].index = i;
      try {
        out[i].value.emplace(fn(i));
      } catch (const std::exception& e) {
        out[i].error = e.what();
      } catch (...) {
        out[i].error = "unknown failure";
      }
    }
  };
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), cells);
  if (n_threads <= 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace atomwave

#endif  // ATOMWAVE_SWEEP_HPP
