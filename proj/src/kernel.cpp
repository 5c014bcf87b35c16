#include "edgefed/kernel.hpp"

#include <cmath>
#include <ostream>
#include <unordered_map>

#include "edgefed/csv.hpp"
#include "edgefed/error.hpp"
#include "edgefed/random.hpp"

namespace edgefed {

std::string payload_kind(const Payload& payload) {
  struct Visitor {
    std::string operator()(const SessionStart&) const { return "session-start"; }
    std::string operator()(const SessionEnd&) const { return "session-end"; }
    std::string operator()(const SamplerTick&) const { return "sampler-tick"; }
    std::string operator()(const CustomPayload& c) const { return "custom:" + c.tag; }
  };
  return std::visit(Visitor{}, payload);
}

EventId EventQueue::schedule(SimTime t, std::string target, Payload payload) {
  if (!std::isfinite(t.seconds) || t < now_) {
    throw SchedulingInPast("cannot schedule at t=" + std::to_string(t.seconds) +
                           "s, now=" + std::to_string(now_.seconds) + "s");
  }
  const EventId id = next_seq_++;
  heap_.push(Event{t, id, std::move(target), std::move(payload)});
  return id;
}

Event EventQueue::pop() {
  Event ev = heap_.top();
  heap_.pop();
  now_ = ev.time;
  return ev;
}

void KernelConfig::validate() const {
  if (!(sample_step > 0.0) || !std::isfinite(sample_step)) throw InvalidConfig("sample_step must be > 0");
  if (!(horizon.seconds > 0.0) || !std::isfinite(horizon.seconds)) throw InvalidConfig("horizon must be > 0");
  const double ratio = horizon.seconds / sample_step;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * n) {
    throw InvalidConfig("sample_step must divide horizon evenly");
  }
}

std::size_t KernelConfig::tick_count() const {
  return static_cast<std::size_t>(std::round(horizon.seconds / sample_step));
}

void RunTrace::write_csv(std::ostream& os) const {
  os << "t_s,seq,target,kind\n";
  for (const auto& e : events) {
    os << csv::num(e.time_s) << ',' << e.seq << ',' << e.target << ',' << e.kind << '\n';
  }
  os << "t_s,component,power_w,values\n";
  for (const auto& s : samples) {
    os << csv::num(s.time_s) << ',' << s.component << ',' << csv::num(s.power_w);
    for (double v : s.values) os << ',' << csv::num(v);
    os << '\n';
  }
  os << "component,energy_kwh\n";
  for (const auto& [id, kwh] : energy_kwh) os << id << ',' << csv::num(kwh) << '\n';
}

namespace {

class QueueScheduler final : public Scheduler {
 public:
  explicit QueueScheduler(EventQueue& queue) : queue_(queue) {}
  EventId schedule(SimTime t, std::string target, Payload payload) override {
    return queue_.schedule(t, std::move(target), std::move(payload));
  }
  SimTime now() const override { return queue_.now(); }

 private:
  EventQueue& queue_;
};

template <typename F>
void guarded(const Component& c, SimTime t, F&& f) {
  try {
    f();
  } catch (const ComponentFault&) {
    throw;
  } catch (const std::exception& e) {
    throw ComponentFault(c.id(), t.seconds, e.what());
  }
}

}  // namespace

RunTrace run(const KernelConfig& config, std::span<Component* const> components) {
  config.validate();
  std::unordered_map<std::string, Component*> by_id;
  std::vector<Component*> continuous;
  for (Component* c : components) {
    if (!by_id.emplace(c->id(), c).second) throw InvalidConfig("duplicate component id '" + c->id() + "'");
    if (c->continuous()) continuous.push_back(c);
  }

  EventQueue queue;
  QueueScheduler scheduler(queue);
  for (Component* c : components) {
    guarded(*c, SimTime{}, [&] { c->initialize(scheduler, derive_seed(config.seed, c->id())); });
  }

  RunTrace trace;
  std::unordered_map<std::string, double> joules;
  const std::size_t ticks = config.tick_count();
  std::size_t next_tick = 0;
  // Ticks are enqueued once every event already pending at the tick time has
  // been delivered, so the sample sees the post-event state.
  auto tick_time = [&](std::size_t k) { return SimTime{static_cast<double>(k) * config.sample_step}; };

  while (true) {
    if (next_tick < ticks && (queue.empty() || queue.top().time > tick_time(next_tick))) {
      for (Component* c : continuous) queue.schedule(tick_time(next_tick), c->id(), SamplerTick{});
      ++next_tick;
    }
    if (queue.empty()) break;
    if (queue.top().time >= config.horizon) {
      if (next_tick >= ticks) break;
      continue;
    }
    Event ev = queue.pop();
    auto it = by_id.find(ev.target);
    if (it == by_id.end()) throw ComponentFault(ev.target, ev.time.seconds, "event for unregistered component");
    Component& c = *it->second;
    trace.events.push_back(DeliveredEvent{ev.time.seconds, ev.seq, ev.target, payload_kind(ev.payload)});
    guarded(c, ev.time, [&] { c.transition(ev, scheduler); });
    if (std::holds_alternative<SamplerTick>(ev.payload)) {
      Observation obs;
      guarded(c, ev.time, [&] { obs = c.observe(ev.time); });
      joules[c.id()] += obs.power_w * config.sample_step;
      trace.samples.push_back(SampleRecord{ev.time.seconds, c.id(), obs.power_w, std::move(obs.values)});
    }
  }
  trace.ticks = ticks;
  for (Component* c : continuous) trace.energy_kwh[c->id()] = joules[c->id()] / 3.6e6;
  return trace;
}

}  // namespace edgefed
