#include <gtest/gtest.h>

#include "edgefed/alloc.hpp"
#include "edgefed/error.hpp"
#include "oracles.hpp"

using namespace edgefed;

namespace {

EdcSpec immersion(std::uint32_t id, int slots = 10, double p_max = 10000.0) {
  EdcSpec s;
  s.id = id;
  s.slots = slots;
  s.it_model = {p_max, 0.0};
  ImmersionCoolingSpec imm;
  imm.capacity = p_max;
  s.cooling = imm;
  return s;
}

EdcSpec air(std::uint32_t id, int slots = 10, double p_max = 10000.0) {
  EdcSpec s;
  s.id = id;
  s.slots = slots;
  s.it_model = {p_max, 0.0};
  s.cooling = AirCoolingSpec{};
  return s;
}

// One AP (id 0) with the given distances to each EDC.
FederationView view_of(const std::vector<EdcSpec>& specs, const std::vector<int>& occupied,
                       const std::vector<double>& distances) {
  FederationView v;
  v.ap_ids = {0};
  v.distance_m = {distances};
  for (std::size_t i = 0; i < specs.size(); ++i) {
    EdcSnapshot s;
    s.spec = &specs[i];
    s.occupied = occupied[i];
    s.t_amb = 20.0;
    s.power = edc_power(specs[i], occupied[i], s.t_amb);
    s.price = 0.25;
    v.edcs.push_back(s);
  }
  return v;
}

const DelayModel kDelay{};
const PlacementRequest kReq{1, 0, 1};

}  // namespace

TEST(Nearest, SingleEdc) {
  const std::vector specs{air(4)};
  EXPECT_EQ(allocate_nearest(kReq, view_of(specs, {0}, {100.0}), kDelay).edc_id, 4u);
}

TEST(Nearest, FallsBackWhenNearestFull) {
  const std::vector specs{air(0), air(1), air(2)};
  const auto d = allocate_nearest(kReq, view_of(specs, {10, 3, 0}, {100.0, 500.0, 900.0}), kDelay);
  EXPECT_EQ(d.edc_id, 1u);
  EXPECT_DOUBLE_EQ(d.est_delay_ms, 2.0 + 0.005 * 500.0);
}

TEST(Nearest, AllFullBlocks) {
  const std::vector specs{air(0), air(1)};
  EXPECT_TRUE(allocate_nearest(kReq, view_of(specs, {10, 10}, {1.0, 2.0}), kDelay).blocked());
}

TEST(Nearest, EqualDelayPrefersLowerId) {
  const std::vector specs{air(9), air(3)};
  EXPECT_EQ(allocate_nearest(kReq, view_of(specs, {0, 0}, {50.0, 50.0}), kDelay).edc_id, 3u);
}

TEST(EnergyAware, PrefersRunningImmersionPump) {
  const std::vector specs{air(0), immersion(1)};
  const auto view = view_of(specs, {2, 2}, {100.0, 2000.0});
  const auto d = allocate_energy_aware(kReq, view, kDelay, 1000.0);
  EXPECT_EQ(d.edc_id, 1u);
  EXPECT_DOUBLE_EQ(d.est_marginal_power_w, 1000.0);
  EXPECT_EQ(d.edc_id, oracle::brute_force(kReq, view, kDelay, 1000.0, oracle::Objective::Energy));
}

TEST(EnergyAware, FullImmersionFallsBackToAir) {
  const std::vector specs{air(0), immersion(1)};
  const auto view = view_of(specs, {2, 10}, {100.0, 2000.0});
  EXPECT_EQ(allocate_energy_aware(kReq, view, kDelay, 1000.0).edc_id, 0u);
}

TEST(EnergyAware, DelayBoundBlocks) {
  const std::vector specs{air(0), immersion(1)};
  const auto view = view_of(specs, {0, 0}, {5000.0, 6000.0});
  EXPECT_TRUE(allocate_energy_aware(kReq, view, kDelay, 10.0).blocked());
  EXPECT_THROW(allocate_energy_aware(kReq, view, kDelay, 0.0), DomainError);
}

TEST(EnergyAware, ColdImmersionPaysThePump) {
  // An idle immersion site must start its pump; a warm air site may be cheaper.
  const std::vector specs{air(0, 10, 1000.0), immersion(1, 10, 1000.0)};
  const auto view = view_of(specs, {1, 0}, {0.0, 0.0});
  EXPECT_EQ(allocate_energy_aware(kReq, view, kDelay, 1000.0).edc_id, 0u);
}

TEST(CostAware, FreeSolarBeatsPeakTariff) {
  const std::vector specs{air(0), air(1)};
  auto view = view_of(specs, {0, 0}, {3000.0, 100.0});
  view.edcs[0].free_power_w = 5000.0;
  view.edcs[0].price = 0.30;
  view.edcs[1].price = 0.10;
  EXPECT_EQ(allocate_cost_aware(kReq, view, kDelay, 1000.0).edc_id, 0u);
}

TEST(CostAware, ReducesToEnergyWithoutFreePower) {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    auto f = oracle::random_federation(rng, 6);
    for (auto& e : f.view.edcs) {
      e.free_power_w = 0.0;
      e.price = 0.2;
    }
    ASSERT_EQ(allocate_cost_aware(f.request, f.view, kDelay, 20.0).edc_id,
              allocate_energy_aware(f.request, f.view, kDelay, 20.0).edc_id);
  }
}

TEST(CostAware, AllInfeasibleBlocks) {
  const std::vector specs{air(0)};
  EXPECT_TRUE(allocate_cost_aware(kReq, view_of(specs, {10}, {0.0}), kDelay, 1000.0).blocked());
}

TEST(Policies, ParseAndFactory) {
  EXPECT_EQ(parse_policy("energy"), PolicyKind::Energy);
  EXPECT_EQ(policy_name(PolicyKind::Cost), "cost");
  EXPECT_THROW(parse_policy("greedy"), InvalidConfig);
  const std::vector specs{air(0), immersion(1)};
  const auto view = view_of(specs, {2, 2}, {100.0, 2000.0});
  EXPECT_EQ(make_policy(PolicyKind::Nearest, kDelay, 1000.0)->decide(kReq, view).edc_id, 0u);
  EXPECT_EQ(make_policy(PolicyKind::Energy, kDelay, 1000.0)->decide(kReq, view).edc_id, 1u);
}

TEST(Policies, MatchBruteForceOnRandomSnapshots) {
  Rng rng(2718);
  for (int i = 0; i < 2000; ++i) {
    const auto f = oracle::random_federation(rng, 6);
    const double max_delay = rng.uniform() < 0.3 ? 12.0 : 1000.0;
    ASSERT_EQ(allocate_nearest(f.request, f.view, kDelay).edc_id,
              oracle::brute_force(f.request, f.view, kDelay, max_delay, oracle::Objective::Delay))
        << "case " << i;
    ASSERT_EQ(allocate_energy_aware(f.request, f.view, kDelay, max_delay).edc_id,
              oracle::brute_force(f.request, f.view, kDelay, max_delay, oracle::Objective::Energy))
        << "case " << i;
    ASSERT_EQ(allocate_cost_aware(f.request, f.view, kDelay, max_delay).edc_id,
              oracle::brute_force(f.request, f.view, kDelay, max_delay, oracle::Objective::Cost))
        << "case " << i;
  }
}

TEST(Policies, ChosenSiteNeverOverfills) {
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    const auto f = oracle::random_federation(rng, 6);
    const auto d = allocate_energy_aware(f.request, f.view, kDelay, 1000.0);
    if (d.blocked()) continue;
    for (const auto& e : f.view.edcs) {
      if (e.spec->id == *d.edc_id) ASSERT_LE(e.occupied + f.request.slots, e.spec->slots);
    }
  }
}
