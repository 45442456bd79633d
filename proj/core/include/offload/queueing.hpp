#pragma once

// Per-node, per-commodity FIFO job queues and their slot-start snapshots.
//
// A "commodity" is whatever the active scheme routes on: task types for
// joint offloading, destination indices for separated schemes, next hops for
// the static LP policy. Virtual sinks never hold a queue.

#include <deque>
#include <span>
#include <vector>

#include "offload/types.hpp"

namespace offload {

/// Immutable backlog snapshot Q_i^(c) of one queue bank.
class QueueState {
 public:
  QueueState() = default;
  QueueState(std::size_t num_nodes, std::size_t num_commodities, std::vector<int> lengths);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_commodities() const { return num_commodities_; }
  int operator()(NodeId node, int commodity) const {
    return lengths_[static_cast<std::size_t>(node) * num_commodities_ + static_cast<std::size_t>(commodity)];
  }
  std::span<const int> of_node(NodeId node) const {
    return std::span<const int>(lengths_).subspan(static_cast<std::size_t>(node) * num_commodities_,
                                                  num_commodities_);
  }
  long long total() const;

 private:
  std::size_t num_nodes_ = 0;
  std::size_t num_commodities_ = 0;
  std::vector<int> lengths_;
};

class QueueBank {
 public:
  QueueBank(std::size_t num_nodes, std::size_t num_commodities);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_commodities() const { return num_commodities_; }

  void enqueue(NodeId node, int commodity, JobId job);
  void enqueue(NodeId node, int commodity, std::span<const JobId> jobs);

  /// Removes and returns the min(n, backlog) oldest jobs.
  std::vector<JobId> dequeue_up_to(NodeId node, int commodity, int n);

  int size(NodeId node, int commodity) const { return static_cast<int>(queue(node, commodity).size()); }
  const std::deque<JobId>& queue(NodeId node, int commodity) const;
  long long total() const { return total_; }

  QueueState snapshot() const;

 private:
  std::size_t index(NodeId node, int commodity) const;

  std::size_t num_nodes_;
  std::size_t num_commodities_;
  std::vector<std::deque<JobId>> queues_;
  long long total_ = 0;
};

}  // namespace offload
