#pragma once

// Deterministic parallel reduction for Monte-Carlo sums.
//
// Samples are cut into fixed-size blocks. Each block is accumulated
// sequentially (Welford) and the block results are merged in block order
// (Chan et al. pairwise update), so the floating-point result depends only on
// the block size, never on the number of workers or on scheduling.

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "fraclen/errors.hpp"

namespace fraclen {

inline constexpr std::uint64_t kDefaultBlockSize = 4096;

/// Running mean and centered second moment of a scalar stream.
struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) noexcept {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(count + o.count);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.count) / n;
    m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
    count += o.count;
  }

  double variance() const noexcept { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double std_error() const noexcept {
    return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

/// Componentwise Moments for a fixed-length vector stream.
struct VectorMoments {
  std::uint64_t count = 0;
  Eigen::VectorXd mean;
  Eigen::VectorXd m2;

  VectorMoments() = default;
  explicit VectorMoments(Eigen::Index k) : mean(Eigen::VectorXd::Zero(k)), m2(Eigen::VectorXd::Zero(k)) {}

  template <class V>
  void add(const V& x) {
    ++count;
    const Eigen::VectorXd d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d.cwiseProduct(x - mean);
  }

  void merge(const VectorMoments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(count + o.count);
    const Eigen::VectorXd d = o.mean - mean;
    mean += d * (static_cast<double>(o.count) / n);
    m2 += o.m2 + d.cwiseProduct(d) * (static_cast<double>(count) * static_cast<double>(o.count) / n);
    count += o.count;
  }

  Eigen::VectorXd std_error() const {
    if (count < 2) return Eigen::VectorXd::Zero(mean.size());
    const double c = static_cast<double>(count);
    return (m2 / ((c - 1.0) * c)).cwiseSqrt();
  }
};

/// Resolve a worker-count request; 0 means "use the hardware concurrency".
inline int resolve_workers(int requested) {
  if (requested < 0) throw ConfigError("worker count must be >= 0");
  if (requested == 0) return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return requested;
}

/// Evaluate `block_fn(begin, end)` over [0, n) in blocks of `block_size` and
/// merge the returned accumulators in block order. `Acc` needs a `merge`
/// member. The first exception thrown by any block is rethrown.
template <class Acc, class BlockFn>
Acc reduce_blocks(std::uint64_t n, int workers, BlockFn&& block_fn, Acc init,
                  std::uint64_t block_size = kDefaultBlockSize) {
  if (block_size == 0) throw ConfigError("block size must be positive");
  const std::uint64_t blocks = (n + block_size - 1) / block_size;
  std::vector<Acc> partial(blocks, init);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t k = next.fetch_add(1);
      if (k >= blocks) return;
      try {
        partial[k] = block_fn(k * block_size, std::min(n, (k + 1) * block_size));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(blocks);
        return;
      }
    }
  };

  const int w = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(resolve_workers(workers)),
                                                         std::max<std::uint64_t>(blocks, 1)));
  if (w <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  Acc total = std::move(init);
  for (const Acc& p : partial) total.merge(p);
  return total;
}

}  // namespace fraclen
