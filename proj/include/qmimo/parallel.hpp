#pragma once

#include <exception>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace qmimo {

// Run body(trial) for trial in [0, trials) across the given number of worker
// threads. Callers must write results into per-trial slots: scheduling order
// is unspecified, so any cross-trial reduction happens after the join, in
// trial order. The first exception thrown by a body is rethrown here.
inline void parallel_trials(int trials, int threads, const std::function<void(int)>& body) {
  if (trials < 0) throw std::invalid_argument("parallel_trials: negative trial count");
  if (threads < 1) threads = 1;
  if (threads == 1 || trials <= 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  if (threads > trials) threads = trials;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int t = w; t < trials; t += threads) body(t);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace qmimo
