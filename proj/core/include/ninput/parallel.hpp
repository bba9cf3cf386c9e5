#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace ninput {

/// Number of worker threads used by the parallel reductions (>= 1).
int thread_count();
void set_thread_count(int threads);

/// Runs body(i) for i in [0, count) on up to thread_count() threads. Calls
/// for distinct i must be independent; results are written by index, never
/// accumulated. Nested calls run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Independent, well-mixed seed for sub-stream `stream` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Pairwise (balanced binary tree) sum of values in index order.
/// The tree depends only on values.size(), never on the thread count.
double pairwise_sum(const std::vector<double>& values);

/// Sum of term(i) over [0, count). Terms are grouped in fixed blocks of
/// `block` consecutive indices, each block summed sequentially, block sums
/// combined with pairwise_sum. Bit-identical for any thread count.
double deterministic_sum(std::size_t count, std::size_t block,
                         const std::function<double(std::size_t)>& term);

/// Running mean/variance (Welford) with a deterministic merge.
struct MomentAccumulator {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const MomentAccumulator& other);
  double variance() const;  // unbiased sample variance
};

MomentAccumulator pairwise_merge(const std::vector<MomentAccumulator>& parts);

}  // namespace ninput
