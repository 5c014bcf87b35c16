#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "edgefed/error.hpp"
#include "edgefed/kernel.hpp"
#include "edgefed/random.hpp"

using namespace edgefed;

namespace {

// Records every delivery; optionally reports a constant power.
class Probe final : public Component {
 public:
  Probe(std::string id, bool continuous, double power_w = 0.0)
      : id_(std::move(id)), continuous_(continuous), power_w_(power_w) {}

  const std::string& id() const override { return id_; }
  bool continuous() const override { return continuous_; }
  void transition(const Event& ev, Scheduler& out) override {
    seen.push_back(ev);
    if (const auto* c = std::get_if<CustomPayload>(&ev.payload); c && c->tag == "echo") {
      out.schedule(ev.time + c->value, id_, CustomPayload{"echoed", 0.0});
    }
    if (const auto* c = std::get_if<CustomPayload>(&ev.payload); c && c->tag == "boom") {
      throw std::runtime_error("exploded");
    }
  }
  Observation observe(SimTime) const override { return {power_w_, {power_w_}}; }

  std::vector<Event> seen;
  std::vector<std::pair<double, std::string>> initial;

  void initialize(Scheduler& out, std::uint64_t) override {
    for (const auto& [t, tag] : initial) out.schedule(SimTime{t}, id_, CustomPayload{tag, 0.0});
  }

 private:
  std::string id_;
  bool continuous_;
  double power_w_;
};

}  // namespace

TEST(EventQueue, OrdersByTime) {
  EventQueue q;
  q.schedule(SimTime{10.0}, "A", CustomPayload{"x"});
  q.schedule(SimTime{5.0}, "B", CustomPayload{"y"});
  EXPECT_EQ(q.pop().target, "B");
  EXPECT_EQ(q.pop().target, "A");
}

TEST(EventQueue, TiesLeaveInInsertionOrder) {
  EventQueue q;
  q.schedule(SimTime{5.0}, "A", CustomPayload{"x"});
  q.schedule(SimTime{5.0}, "B", CustomPayload{"y"});
  EXPECT_EQ(q.pop().target, "A");
  EXPECT_EQ(q.pop().target, "B");
}

TEST(EventQueue, RejectsPast) {
  EventQueue q;
  q.schedule(SimTime{5.0}, "A", SamplerTick{});
  q.pop();
  EXPECT_THROW(q.schedule(SimTime{4.0}, "A", SamplerTick{}), SchedulingInPast);
  EXPECT_NO_THROW(q.schedule(SimTime{5.0}, "A", SamplerTick{}));
}

TEST(EventQueue, RandomizedSetsDequeueSorted) {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    EventQueue q;
    std::vector<std::pair<double, std::uint64_t>> expected;
    for (int i = 0; i < 200; ++i) {
      // Coarse times force plenty of ties.
      const double t = std::floor(rng.uniform() * 20.0);
      expected.emplace_back(t, q.schedule(SimTime{t}, "c", SamplerTick{}));
    }
    std::sort(expected.begin(), expected.end());
    for (const auto& [t, seq] : expected) {
      const auto ev = q.pop();
      ASSERT_EQ(ev.time.seconds, t);
      ASSERT_EQ(ev.seq, seq);
    }
  }
}

TEST(KernelConfig, Validation) {
  KernelConfig c;
  c.horizon = SimTime{3600.0};
  c.sample_step = 60.0;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.tick_count(), 60u);
  c.sample_step = 7.0;
  EXPECT_THROW(c.validate(), InvalidConfig);
  c.sample_step = 0.0;
  EXPECT_THROW(c.validate(), InvalidConfig);
  c.sample_step = -60.0;
  EXPECT_THROW(c.validate(), InvalidConfig);
}

TEST(Kernel, SixtyTicksPerHour) {
  Probe p("p", true, 100.0);
  KernelConfig c{SimTime{3600.0}, 60.0, 1};
  std::vector<Component*> comps{&p};
  const auto trace = run(c, comps);
  EXPECT_EQ(p.seen.size(), 60u);
  EXPECT_EQ(trace.ticks, 60u);
  EXPECT_EQ(trace.samples.size(), 60u);
  EXPECT_DOUBLE_EQ(p.seen.front().time.seconds, 0.0);
  EXPECT_DOUBLE_EQ(p.seen.back().time.seconds, 3540.0);
}

TEST(Kernel, ConstantPowerIntegratesExactly) {
  Probe p("p", true, 100.0);
  KernelConfig c{SimTime{3600.0}, 60.0, 1};
  std::vector<Component*> comps{&p};
  const auto trace = run(c, comps);
  EXPECT_EQ(trace.energy_kwh.at("p"), 0.1);
}

TEST(Kernel, TicksFollowEventsAtTheSameInstant) {
  Probe p("p", true);
  p.initial = {{60.0, "arrival"}, {30.0, "early"}};
  KernelConfig c{SimTime{120.0}, 60.0, 1};
  std::vector<Component*> comps{&p};
  run(c, comps);
  std::vector<std::string> kinds;
  for (const auto& e : p.seen) kinds.push_back(payload_kind(e.payload));
  EXPECT_EQ(kinds, (std::vector<std::string>{"sampler-tick", "custom:early", "custom:arrival", "sampler-tick"}));
}

TEST(Kernel, DeliveryOrderIsSortedByTimeThenSeq) {
  Rng rng(9);
  Probe a("a", false), b("b", true, 5.0);
  for (int i = 0; i < 300; ++i) a.initial.emplace_back(std::floor(rng.uniform() * 600.0), "echo");
  KernelConfig c{SimTime{600.0}, 60.0, 3};
  std::vector<Component*> comps{&a, &b};
  const auto trace = run(c, comps);
  ASSERT_FALSE(trace.events.empty());
  for (std::size_t i = 1; i < trace.events.size(); ++i) {
    const auto& prev = trace.events[i - 1];
    const auto& cur = trace.events[i];
    ASSERT_TRUE(prev.time_s < cur.time_s || (prev.time_s == cur.time_s && prev.seq < cur.seq));
  }
}

TEST(Kernel, EventsAtHorizonAreNotDelivered) {
  Probe p("p", false);
  p.initial = {{100.0, "late"}, {99.0, "ok"}};
  KernelConfig c{SimTime{100.0}, 50.0, 1};
  std::vector<Component*> comps{&p};
  run(c, comps);
  ASSERT_EQ(p.seen.size(), 1u);
  EXPECT_EQ(payload_kind(p.seen[0].payload), "custom:ok");
}

TEST(Kernel, ReplayIsByteIdentical) {
  auto once = [] {
    Probe a("a", true, 12.5), b("b", true, 3.0);
    for (int i = 0; i < 20; ++i) a.initial.emplace_back(i * 17.0, "echo");
    KernelConfig c{SimTime{1200.0}, 60.0, 77};
    std::vector<Component*> comps{&a, &b};
    std::ostringstream os;
    run(c, comps).write_csv(os);
    return os.str();
  };
  EXPECT_EQ(once(), once());
}

TEST(Kernel, FaultCarriesComponentAndTime) {
  Probe p("exploder", false);
  p.initial = {{42.0, "boom"}};
  KernelConfig c{SimTime{120.0}, 60.0, 1};
  std::vector<Component*> comps{&p};
  try {
    run(c, comps);
    FAIL() << "expected ComponentFault";
  } catch (const ComponentFault& f) {
    EXPECT_EQ(f.component(), "exploder");
    EXPECT_DOUBLE_EQ(f.time_s(), 42.0);
  }
}

TEST(Kernel, DuplicateIdsRejected) {
  Probe a("x", false), b("x", false);
  KernelConfig c{SimTime{60.0}, 60.0, 1};
  std::vector<Component*> comps{&a, &b};
  EXPECT_THROW(run(c, comps), InvalidConfig);
}

TEST(Random, SubstreamsIndependentOfOtherNames) {
  EXPECT_EQ(derive_seed(5, "edc/1"), derive_seed(5, "edc/1"));
  EXPECT_NE(derive_seed(5, "edc/1"), derive_seed(5, "edc/2"));
  EXPECT_NE(derive_seed(5, "edc/1"), derive_seed(6, "edc/1"));
}

TEST(Random, NormalMoments) {
  Rng rng(123);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.02);
}
