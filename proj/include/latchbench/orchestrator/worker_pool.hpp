#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

namespace latchbench::orchestrator {

/// Runs work(i) for i in [0, n) on at most `parallelism` threads. Results are
/// handed to on_result on the calling thread (the single writer), in
/// completion order. on_result returning false stops dispatch; results still
/// in flight are dropped. An exception escaping work() is rethrown here after
/// all workers have stopped. Returns the number of results delivered.
template <typename Result>
std::size_t run_bounded(std::size_t n, std::size_t parallelism, const std::function<Result(std::size_t)>& work,
                        const std::function<bool(std::size_t, Result&&)>& on_result) {
  if (n == 0) return 0;
  parallelism = std::max<std::size_t>(1, std::min(parallelism, n));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::pair<std::size_t, Result>> ready;
  std::exception_ptr failure;
  std::size_t finished_workers = 0;

  auto worker = [&] {
    for (;;) {
      if (stop.load()) break;
      const auto i = next.fetch_add(1);
      if (i >= n) break;
      try {
        auto r = work(i);
        std::lock_guard lock(mu);
        ready.emplace_back(i, std::move(r));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
      cv.notify_one();
    }
    std::lock_guard lock(mu);
    ++finished_workers;
    cv.notify_one();
  };

  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < parallelism; ++t) threads.emplace_back(worker);

  std::size_t delivered = 0;
  {
    std::unique_lock lock(mu);
    for (;;) {
      cv.wait(lock, [&] { return !ready.empty() || finished_workers == parallelism; });
      if (ready.empty() && finished_workers == parallelism) break;
      auto item = std::move(ready.front());
      ready.pop_front();
      if (stop.load()) continue;
      lock.unlock();
      bool keep_going = false;
      try {
        keep_going = on_result(item.first, std::move(item.second));
        ++delivered;
      } catch (...) {
        std::lock_guard guard(mu);
        if (!failure) failure = std::current_exception();
      }
      lock.lock();
      if (!keep_going) stop = true;
    }
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return delivered;
}

}  // namespace latchbench::orchestrator
