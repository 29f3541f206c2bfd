#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dislokit {

/// Neumaier-compensated accumulator. Unlike plain Kahan it stays accurate
/// when an addend exceeds the running sum.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }

  double value() const { return sum + comp; }
};

// Partial sums are formed over fixed-size chunks of the index range and then
// merged in chunk order. Each chunk result is a pure function of its inputs,
// so the total is independent of the thread count and of scheduling.
inline constexpr std::size_t kSumChunkSize = 8192;

/// Sum term(i) for i in [0, n) with compensated accumulation and a
/// deterministic chunked reduction. `threads <= 1` runs serially; any thread
/// count yields bit-identical results. If term() throws, the exception from
/// the lowest-indexed failing chunk is rethrown.
template <class Term>
double deterministic_sum(std::size_t n, Term&& term, int threads = 1) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + kSumChunkSize - 1) / kSumChunkSize;

  std::vector<NeumaierSum> partial(nchunks);
  std::vector<std::exception_ptr> errors(nchunks);

  auto run_chunk = [&](std::size_t c) {
    const std::size_t lo = c * kSumChunkSize;
    const std::size_t hi = std::min(n, lo + kSumChunkSize);
    try {
      NeumaierSum acc;
      for (std::size_t i = lo; i < hi; ++i) acc.add(term(i));
      partial[c] = acc;
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };

  const int nthreads =
      static_cast<int>(std::min<std::size_t>(std::max(threads, 1), nchunks));
  if (nthreads <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t c = next.fetch_add(1); c < nchunks;
             c = next.fetch_add(1))
          run_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t c = 0; c < nchunks; ++c)
    if (errors[c]) std::rethrow_exception(errors[c]);

  NeumaierSum total;
  for (const auto& p : partial) {
    total.add(p.sum);
    total.add(p.comp);
  }
  return total.value();
}

}  // namespace dislokit
