#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace mopc {

struct StageSpec {
  double process_time = 1.0;       // seconds per package
  std::int64_t buffer_capacity = 1;  // input buffer, packages
  double link_transfer_time = 0.0;   // seconds per package to the next hop
};

struct SessionSpec {
  std::vector<StageSpec> stages;  // worker 1 .. worker n
  std::int64_t n_packages = 1;
  double initial_feed_interval = 1.0;
  double timeout = 1.0;  // max idle wait of a worker before it aborts
  double rate_backoff_factor = 2.0;

  double feed_transfer_time = 0.0;  // requester -> worker 1
  double control_delay = 0.0;       // overflow signal latency to the requester
  // When set, a worker's own outgoing transfer occupies it (no overlap of
  // sending with processing the next package).
  bool serialize_transfer = false;
  // Process times are scaled by 1 + jitter * U(-1, 1); 0 disables.
  double jitter = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

// Requester: Feeding <-> AdjustingRate, Feeding -> Collecting -> Done, and
// any non-terminal state -> Aborted.
enum class RequesterState { Feeding, AdjustingRate, Collecting, Done, Aborted };
// Worker states are recomputed after every event from the worker's buffers
// and servers. TimedOut is entered only from Idle and is terminal.
enum class WorkerState { Idle, Receiving, Processing, Sending, OverflowSignaled, TimedOut };

std::string_view to_string(RequesterState s);
std::string_view to_string(WorkerState s);

enum class EventKind {
  Feed,
  Arrive,
  ProcessStart,
  ProcessDone,
  TransferStart,
  TransferDone,
  Collect,
  Overflow,
  RateAdjust,
  Timeout,
};

std::string_view to_string(EventKind k);

struct SessionEvent {
  double time;
  EventKind kind;
  int stage;  // -1 for the requester
  std::int64_t package;  // -1 if not package related
  RequesterState requester;
  WorkerState worker;  // state of `stage` after the event (Idle for the requester)
};

struct SessionTrace {
  double completion_time = 0.0;  // last collection, or abort time
  std::vector<double> latencies;       // per collected package, in collection order
  std::vector<std::int64_t> collected;  // package ids in collection order
  std::vector<double> collect_times;
  std::int64_t overflow_events = 0;
  bool timeout_aborted = false;
  double final_feed_interval = 0.0;
  std::int64_t packages_fed = 0;
  std::int64_t packages_dropped = 0;  // in flight when the session aborted
  RequesterState final_state = RequesterState::Feeding;
  std::vector<SessionEvent> events;

  std::int64_t packages_completed() const { return static_cast<std::int64_t>(collected.size()); }
  // Completions per second between the first and last collection.
  double steady_state_throughput() const;
};

// Deterministic discrete-event run of one pipeline session.
SessionTrace run_session(const SessionSpec& spec);

// Per-package service time of the slowest hop: max over stages of
// max(process, transfer), or process + transfer when transfers are
// serialized; the requester's feed link counts as a hop.
double bottleneck_service_time(const SessionSpec& spec);

struct PartitionRow {
  std::size_t workers;
  double completion_time;
  double relative_throughput;  // monolithic_time / completion_time
  bool aborted;
};

std::vector<PartitionRow> compare_partitions(double monolithic_time,
                                             const std::vector<SessionSpec>& specs);

}  // namespace mopc
