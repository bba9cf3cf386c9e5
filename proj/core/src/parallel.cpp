#include "ninput/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace ninput {
namespace {

std::atomic<int>& configured_threads() {
  static std::atomic<int> threads{
      static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))};
  return threads;
}

// Nested parallel_for calls run serially on the calling worker.
thread_local bool in_parallel_region = false;

double tree_sum(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n == 1) return v[0];
  const std::size_t half = n / 2;
  return tree_sum(v, half) + tree_sum(v + half, n - half);
}

MomentAccumulator tree_merge(const MomentAccumulator* v, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return v[0];
  const std::size_t half = n / 2;
  MomentAccumulator left = tree_merge(v, half);
  left.merge(tree_merge(v + half, n - half));
  return left;
}

}  // namespace

int thread_count() { return configured_threads().load(); }

void set_thread_count(int threads) { configured_threads() = std::max(1, threads); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
  if (workers <= 1 || in_parallel_region) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    in_parallel_region = true;
    struct Reset {
      ~Reset() { in_parallel_region = false; }
    } reset;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over a combination of both inputs
  std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ull * (stream + 1));
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double pairwise_sum(const std::vector<double>& values) {
  return tree_sum(values.data(), values.size());
}

double deterministic_sum(std::size_t count, std::size_t block,
                         const std::function<double(std::size_t)>& term) {
  block = std::max<std::size_t>(block, 1);
  const std::size_t blocks = (count + block - 1) / block;
  std::vector<double> partial(blocks, 0.0);
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t lo = b * block;
    const std::size_t hi = std::min(count, lo + block);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[b] = s;
  });
  return pairwise_sum(partial);
}

void MomentAccumulator::add(double x) {
  count += 1.0;
  const double delta = x - mean;
  mean += delta / count;
  m2 += delta * (x - mean);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count == 0.0) return;
  if (count == 0.0) {
    *this = other;
    return;
  }
  const double total = count + other.count;
  const double delta = other.mean - mean;
  mean += delta * other.count / total;
  m2 += other.m2 + delta * delta * count * other.count / total;
  count = total;
}

double MomentAccumulator::variance() const {
  return count > 1.0 ? m2 / (count - 1.0) : 0.0;
}

MomentAccumulator pairwise_merge(const std::vector<MomentAccumulator>& parts) {
  return tree_merge(parts.data(), parts.size());
}

}  // namespace ninput
