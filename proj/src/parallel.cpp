#include "isgd/parallel.hpp"

#include <exception>
#include <stdexcept>
#include <thread>

namespace isgd {

ShardPlan shard(std::size_t batch_size, int workers) {
  if (workers < 1) {
    throw std::invalid_argument("worker count must be positive");
  }
  if (static_cast<std::size_t>(workers) > batch_size) {
    throw std::invalid_argument("more workers than batch examples");
  }
  ShardPlan plan;
  plan.workers = workers;
  const std::size_t base = batch_size / workers;
  const std::size_t extra = batch_size % workers;
  std::size_t off = 0;
  for (int r = 0; r < workers; ++r) {
    const std::size_t count = base + (static_cast<std::size_t>(r) < extra ? 1 : 0);
    plan.ranges.emplace_back(off, count);
    off += count;
  }
  return plan;
}

LossAndGrad parallel_forward_backward(const ParameterVector& w,
                                      const Batch& batch,
                                      const NetworkSpec& spec, int workers) {
  if (workers == 1) {
    return forward_backward(w, batch, spec);
  }
  const ShardPlan plan = shard(batch.count, workers);

  std::vector<detail::DataPass> partials(workers);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> lanes;
    lanes.reserve(workers);
    for (int r = 0; r < workers; ++r) {
      lanes.emplace_back([&, r] {
        try {
          const auto [off, count] = plan.ranges[r];
          partials[r] = detail::data_pass(w, *batch.data, batch.offset + off,
                                          count, spec);
        } catch (...) {
          errors[r] = std::current_exception();
        }
      });
    }
  }
  for (const auto& err : errors) {
    if (err) {
      std::rethrow_exception(err);
    }
  }

  // rank-order reduction keeps the result deterministic for a fixed W
  detail::DataPass combined = std::move(partials[0]);
  for (int r = 1; r < workers; ++r) {
    combined.loss_sum += partials[r].loss_sum;
    for (std::size_t p = 0; p < combined.grad_sum.size(); ++p) {
      combined.grad_sum[p] += partials[r].grad_sum[p];
    }
  }
  return detail::finalize(combined, batch.count, w, spec);
}

}  // namespace isgd
