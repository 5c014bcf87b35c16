#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <queue>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace edgefed {

/// Virtual seconds since scenario start.
struct SimTime {
  double seconds = 0.0;

  constexpr SimTime() = default;
  constexpr explicit SimTime(double s) : seconds(s) {}

  constexpr auto operator<=>(const SimTime&) const = default;
  constexpr SimTime operator+(double ds) const { return SimTime{seconds + ds}; }
  constexpr double hours() const { return seconds / 3600.0; }
};

struct SessionStart {
  std::uint64_t session_id = 0;
};
struct SessionEnd {
  std::uint64_t session_id = 0;
};
struct SamplerTick {};
struct CustomPayload {
  std::string tag;
  double value = 0.0;
};

using Payload = std::variant<SessionStart, SessionEnd, SamplerTick, CustomPayload>;

/// Short lowercase name of a payload alternative, as written to traces.
std::string payload_kind(const Payload& payload);

using EventId = std::uint64_t;

struct Event {
  SimTime time;
  std::uint64_t seq = 0;
  std::string target;
  Payload payload;
};

/// Event calendar ordered by (time, seq). seq is the insertion counter, so
/// simultaneous events leave in the order they were scheduled.
class EventQueue {
 public:
  /// Throws SchedulingInPast if `t` precedes the current time.
  EventId schedule(SimTime t, std::string target, Payload payload);

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  const Event& top() const { return heap_.top(); }

  /// Removes the earliest event and advances `now()` to its time.
  Event pop();

  SimTime now() const { return now_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
  SimTime now_{};
};

struct KernelConfig {
  SimTime horizon{86400.0};
  double sample_step = 60.0;
  std::uint64_t seed = 1;

  /// Throws InvalidConfig unless sample_step > 0 and divides the horizon.
  void validate() const;
  std::size_t tick_count() const;
};

/// Handle through which transitions schedule outputs.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual EventId schedule(SimTime t, std::string target, Payload payload) = 0;
  virtual SimTime now() const = 0;
};

/// State reported by a continuous component right after its sampler tick.
/// power_w is held constant over [t, t + sample_step).
struct Observation {
  double power_w = 0.0;
  std::vector<double> values;
};

/// A simulated entity. Transitions are (state, input event) -> new state
/// plus scheduled outputs.
class Component {
 public:
  virtual ~Component() = default;

  virtual const std::string& id() const = 0;

  /// Continuous components get a SamplerTick at every sample boundary.
  virtual bool continuous() const { return false; }

  /// Called once before the first event with the component's own RNG seed.
  virtual void initialize(Scheduler& /*out*/, std::uint64_t /*stream_seed*/) {}

  virtual void transition(const Event& event, Scheduler& out) = 0;

  virtual Observation observe(SimTime /*t*/) const { return {}; }
};

struct DeliveredEvent {
  double time_s = 0.0;
  std::uint64_t seq = 0;
  std::string target;
  std::string kind;
};

struct SampleRecord {
  double time_s = 0.0;
  std::string component;
  double power_w = 0.0;
  std::vector<double> values;
};

struct RunTrace {
  std::vector<DeliveredEvent> events;
  std::vector<SampleRecord> samples;
  /// Left-endpoint integral of each continuous component's power.
  std::map<std::string, double> energy_kwh;
  std::size_t ticks = 0;

  /// Two CSV sections: `t_s,seq,target,kind` then `t_s,component,power_w,values...`.
  void write_csv(std::ostream& os) const;
};

/// Runs the components until the horizon. Events at or after the horizon
/// are left undelivered. Exceptions thrown inside a component are rethrown
/// as ComponentFault with the component id and the current time.
RunTrace run(const KernelConfig& config, std::span<Component* const> components);

}  // namespace edgefed
