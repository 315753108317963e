#include "mopc/session_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <string>

#include "mopc/errors.hpp"
#include "mopc/random.hpp"

namespace mopc {

void SessionSpec::validate() const {
  if (stages.empty()) throw ValidationError("stages", "at least one stage is required");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const std::string field = "stages[" + std::to_string(i) + "]";
    if (!(stages[i].process_time > 0.0)) throw ValidationError(field + ".process_time", "must be positive");
    if (stages[i].buffer_capacity < 1) throw ValidationError(field + ".buffer_capacity", "must be >= 1");
    if (!(stages[i].link_transfer_time >= 0.0)) {
      throw ValidationError(field + ".link_transfer_time", "must be non-negative");
    }
  }
  if (n_packages < 1) throw ValidationError("n_packages", "must be >= 1");
  if (!(initial_feed_interval > 0.0)) throw ValidationError("initial_feed_interval", "must be positive");
  if (!(timeout > 0.0)) throw ValidationError("timeout", "must be positive");
  if (!(rate_backoff_factor > 1.0)) throw ValidationError("rate_backoff_factor", "must be > 1");
  if (!(feed_transfer_time >= 0.0)) throw ValidationError("feed_transfer_time", "must be non-negative");
  if (!(control_delay >= 0.0)) throw ValidationError("control_delay", "must be non-negative");
  if (!(jitter >= 0.0 && jitter < 1.0)) throw ValidationError("jitter", "must lie in [0,1)");
}

std::string_view to_string(RequesterState s) {
  switch (s) {
    case RequesterState::Feeding: return "Feeding";
    case RequesterState::AdjustingRate: return "AdjustingRate";
    case RequesterState::Collecting: return "Collecting";
    case RequesterState::Done: return "Done";
    case RequesterState::Aborted: return "Aborted";
  }
  return "?";
}

std::string_view to_string(WorkerState s) {
  switch (s) {
    case WorkerState::Idle: return "Idle";
    case WorkerState::Receiving: return "Receiving";
    case WorkerState::Processing: return "Processing";
    case WorkerState::Sending: return "Sending";
    case WorkerState::OverflowSignaled: return "OverflowSignaled";
    case WorkerState::TimedOut: return "TimedOut";
  }
  return "?";
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Feed: return "feed";
    case EventKind::Arrive: return "arrive";
    case EventKind::ProcessStart: return "process_start";
    case EventKind::ProcessDone: return "process_done";
    case EventKind::TransferStart: return "transfer_start";
    case EventKind::TransferDone: return "transfer_done";
    case EventKind::Collect: return "collect";
    case EventKind::Overflow: return "overflow";
    case EventKind::RateAdjust: return "rate_adjust";
    case EventKind::Timeout: return "timeout";
  }
  return "?";
}

double SessionTrace::steady_state_throughput() const {
  if (collect_times.size() < 2) return 0.0;
  const double span = collect_times.back() - collect_times.front();
  return span > 0.0 ? static_cast<double>(collect_times.size() - 1) / span : 0.0;
}

double bottleneck_service_time(const SessionSpec& spec) {
  double worst = spec.feed_transfer_time;
  for (const StageSpec& s : spec.stages) {
    worst = std::max(worst, spec.serialize_transfer ? s.process_time + s.link_transfer_time
                                                    : std::max(s.process_time, s.link_transfer_time));
  }
  return worst;
}

namespace {

enum class Action { FeedTick, FeedLinkDone, ProcessDone, LinkDone, OverflowNotice, TimeoutCheck };

struct Pending {
  double time;
  std::uint64_t seq;
  Action action;
  int stage;
  std::int64_t package;
  std::uint64_t token;

  bool operator>(const Pending& o) const { return time != o.time ? time > o.time : seq > o.seq; }
};

struct Worker {
  std::deque<std::int64_t> input;
  std::deque<std::int64_t> output;
  bool processing = false;
  bool link_busy = false;
  bool sending_serialized = false;
  int incoming = 0;
  std::int64_t handled = 0;  // packages that finished processing here
  std::uint64_t idle_epoch = 0;
  bool timed_out = false;
};

class Session {
 public:
  explicit Session(const SessionSpec& spec)
      : spec_(spec), workers_(spec.stages.size()), rng_(spec.seed) {
    trace_.final_feed_interval = spec.initial_feed_interval;
    feed_interval_ = spec.initial_feed_interval;
    feed_times_.resize(static_cast<std::size_t>(spec.n_packages), 0.0);
  }

  SessionTrace run() {
    schedule(0.0, Action::FeedTick, -1, -1, feed_epoch_);
    for (int k = 0; k < stage_count(); ++k) arm_idle_timer(k);

    while (!queue_.empty() && !finished()) {
      const Pending ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      dispatch(ev);
    }
    trace_.final_state = requester_;
    trace_.final_feed_interval = feed_interval_;
    trace_.packages_fed = fed_;
    if (requester_ == RequesterState::Aborted) {
      trace_.packages_dropped = fed_ - trace_.packages_completed();
    }
    return std::move(trace_);
  }

 private:
  int stage_count() const { return static_cast<int>(workers_.size()); }
  bool finished() const {
    return requester_ == RequesterState::Done || requester_ == RequesterState::Aborted;
  }

  void schedule(double t, Action a, int stage, std::int64_t pkg, std::uint64_t token = 0) {
    queue_.push({t, seq_++, a, stage, pkg, token});
  }

  WorkerState state_of(int k) const {
    const Worker& w = workers_[static_cast<std::size_t>(k)];
    if (w.timed_out) return WorkerState::TimedOut;
    if (static_cast<std::int64_t>(w.input.size()) >= spec_.stages[static_cast<std::size_t>(k)].buffer_capacity) {
      return WorkerState::OverflowSignaled;
    }
    if (w.sending_serialized) return WorkerState::Sending;
    if (w.processing) return WorkerState::Processing;
    if (w.link_busy) return WorkerState::Sending;
    if (w.incoming > 0) return WorkerState::Receiving;
    return WorkerState::Idle;
  }

  void log(EventKind kind, int stage, std::int64_t pkg) {
    trace_.events.push_back({now_, kind, stage, pkg, requester_,
                             stage >= 0 ? state_of(stage) : WorkerState::Idle});
  }

  bool idle(int k) const {
    const Worker& w = workers_[static_cast<std::size_t>(k)];
    return !w.processing && !w.sending_serialized && w.input.empty();
  }

  void arm_idle_timer(int k) {
    Worker& w = workers_[static_cast<std::size_t>(k)];
    ++w.idle_epoch;
    if (w.handled < spec_.n_packages && idle(k)) {
      schedule(now_ + spec_.timeout, Action::TimeoutCheck, k, -1, w.idle_epoch);
    }
  }

  double process_time(int k) {
    double p = spec_.stages[static_cast<std::size_t>(k)].process_time;
    if (spec_.jitter > 0.0) p *= 1.0 + spec_.jitter * (2.0 * uniform01(rng_) - 1.0);
    return p;
  }

  void dispatch(const Pending& ev) {
    switch (ev.action) {
      case Action::FeedTick: on_feed_tick(ev.token); break;
      case Action::FeedLinkDone: on_feed_link_done(ev.package); break;
      case Action::ProcessDone: on_process_done(ev.stage, ev.package); break;
      case Action::LinkDone: on_link_done(ev.stage, ev.package); break;
      case Action::OverflowNotice: on_overflow_notice(); break;
      case Action::TimeoutCheck: on_timeout_check(ev.stage, ev.token); break;
    }
  }

  // Requester side.

  void on_feed_tick(std::uint64_t epoch) {
    if (epoch != feed_epoch_ || fed_ >= spec_.n_packages) return;
    const std::int64_t pkg = fed_++;
    feed_times_[static_cast<std::size_t>(pkg)] = now_;
    last_feed_time_ = now_;
    feed_queue_.push_back(pkg);
    if (fed_ == spec_.n_packages) requester_ = RequesterState::Collecting;
    log(EventKind::Feed, -1, pkg);
    start_feed_link();
    if (fed_ < spec_.n_packages) schedule(now_ + feed_interval_, Action::FeedTick, -1, -1, feed_epoch_);
  }

  void start_feed_link() {
    if (feed_link_busy_ || feed_queue_.empty()) return;
    feed_link_busy_ = true;
    const std::int64_t pkg = feed_queue_.front();
    feed_queue_.pop_front();
    ++workers_[0].incoming;
    schedule(now_ + spec_.feed_transfer_time, Action::FeedLinkDone, -1, pkg);
  }

  void on_feed_link_done(std::int64_t pkg) {
    feed_link_busy_ = false;
    arrive(0, pkg);
    start_feed_link();
  }

  void on_overflow_notice() {
    // One adjustment per fed package; notices after the last feed are moot.
    if (requester_ != RequesterState::Feeding || fed_ <= last_adjust_fed_) return;
    requester_ = RequesterState::AdjustingRate;
    feed_interval_ *= spec_.rate_backoff_factor;
    last_adjust_fed_ = fed_;
    log(EventKind::RateAdjust, -1, -1);
    // Reschedule the pending tick at the slower rate.
    ++feed_epoch_;
    schedule(std::max(now_, last_feed_time_ + feed_interval_), Action::FeedTick, -1, -1, feed_epoch_);
    requester_ = RequesterState::Feeding;
  }

  void collect(std::int64_t pkg) {
    trace_.collected.push_back(pkg);
    trace_.collect_times.push_back(now_);
    trace_.latencies.push_back(now_ - feed_times_[static_cast<std::size_t>(pkg)]);
    trace_.completion_time = now_;
    if (trace_.packages_completed() == spec_.n_packages) requester_ = RequesterState::Done;
    log(EventKind::Collect, -1, pkg);
  }

  // Worker side.

  void arrive(int k, std::int64_t pkg) {
    Worker& w = workers_[static_cast<std::size_t>(k)];
    --w.incoming;
    if (static_cast<std::int64_t>(w.input.size()) >= spec_.stages[static_cast<std::size_t>(k)].buffer_capacity) {
      // Soft capacity: the package is kept and the requester is told to slow down.
      ++trace_.overflow_events;
      log(EventKind::Overflow, k, pkg);
      schedule(now_ + spec_.control_delay, Action::OverflowNotice, k, pkg);
    }
    w.input.push_back(pkg);
    log(EventKind::Arrive, k, pkg);
    try_process(k);
  }

  void try_process(int k) {
    Worker& w = workers_[static_cast<std::size_t>(k)];
    if (w.processing || w.sending_serialized || w.input.empty() || w.timed_out) return;
    const std::int64_t pkg = w.input.front();
    w.input.pop_front();
    w.processing = true;
    ++w.idle_epoch;  // cancels any pending idle timer
    log(EventKind::ProcessStart, k, pkg);
    schedule(now_ + process_time(k), Action::ProcessDone, k, pkg);
  }

  void on_process_done(int k, std::int64_t pkg) {
    Worker& w = workers_[static_cast<std::size_t>(k)];
    w.processing = false;
    ++w.handled;
    log(EventKind::ProcessDone, k, pkg);
    if (spec_.serialize_transfer) {
      w.sending_serialized = true;
      begin_transfer(k, pkg);
      return;
    }
    w.output.push_back(pkg);
    try_send(k);
    try_process(k);
    if (idle(k)) arm_idle_timer(k);
  }

  void try_send(int k) {
    Worker& w = workers_[static_cast<std::size_t>(k)];
    if (w.link_busy || w.output.empty()) return;
    const std::int64_t pkg = w.output.front();
    w.output.pop_front();
    w.link_busy = true;
    begin_transfer(k, pkg);
  }

  void begin_transfer(int k, std::int64_t pkg) {
    if (k + 1 < stage_count()) ++workers_[static_cast<std::size_t>(k + 1)].incoming;
    log(EventKind::TransferStart, k, pkg);
    schedule(now_ + spec_.stages[static_cast<std::size_t>(k)].link_transfer_time, Action::LinkDone, k,
             pkg);
  }

  void on_link_done(int k, std::int64_t pkg) {
    Worker& w = workers_[static_cast<std::size_t>(k)];
    log(EventKind::TransferDone, k, pkg);
    if (spec_.serialize_transfer) {
      w.sending_serialized = false;
    } else {
      w.link_busy = false;
    }
    if (k + 1 < stage_count()) {
      arrive(k + 1, pkg);
    } else {
      collect(pkg);
    }
    if (finished()) return;
    if (spec_.serialize_transfer) {
      try_process(k);
    } else {
      try_send(k);
    }
    if (idle(k)) arm_idle_timer(k);
  }

  void on_timeout_check(int k, std::uint64_t epoch) {
    Worker& w = workers_[static_cast<std::size_t>(k)];
    if (epoch != w.idle_epoch || !idle(k) || w.handled >= spec_.n_packages) return;
    w.timed_out = true;
    requester_ = RequesterState::Aborted;
    trace_.timeout_aborted = true;
    trace_.completion_time = now_;
    log(EventKind::Timeout, k, -1);
  }

  const SessionSpec& spec_;
  std::vector<Worker> workers_;
  Rng rng_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;

  RequesterState requester_ = RequesterState::Feeding;
  double feed_interval_;
  std::uint64_t feed_epoch_ = 0;
  double last_feed_time_ = 0.0;
  std::int64_t fed_ = 0;
  std::int64_t last_adjust_fed_ = 0;
  std::deque<std::int64_t> feed_queue_;
  bool feed_link_busy_ = false;
  std::vector<double> feed_times_;

  SessionTrace trace_;
};

}  // namespace

SessionTrace run_session(const SessionSpec& spec) {
  spec.validate();
  return Session(spec).run();
}

std::vector<PartitionRow> compare_partitions(double monolithic_time,
                                             const std::vector<SessionSpec>& specs) {
  if (!(monolithic_time > 0.0)) throw ValidationError("monolithic_time", "must be positive");
  std::vector<PartitionRow> rows;
  for (const SessionSpec& spec : specs) {
    const SessionTrace trace = run_session(spec);
    rows.push_back({spec.stages.size(), trace.completion_time,
                    trace.timeout_aborted ? 0.0 : monolithic_time / trace.completion_time,
                    trace.timeout_aborted});
  }
  return rows;
}

}  // namespace mopc
