#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "isgd/network.hpp"

namespace isgd {

// Balanced contiguous partition of a batch across workers. Shards are
// disjoint, ordered, cover the batch, and differ in size by at most one.
struct ShardPlan {
  int workers = 1;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;  // offset, count
};

ShardPlan shard(std::size_t batch_size, int workers);

// Data-parallel forward/backward: every worker reads the same weight
// snapshot, computes the data term of its shard, and the coordinator
// reduces the partial sums in rank order before normalizing and adding
// the weight-decay term once. A failing worker aborts the whole pass.
LossAndGrad parallel_forward_backward(const ParameterVector& w,
                                      const Batch& batch,
                                      const NetworkSpec& spec, int workers);

}  // namespace isgd
