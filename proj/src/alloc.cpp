#include "edgefed/alloc.hpp"

#include <algorithm>
#include <cmath>

#include "edgefed/error.hpp"

namespace edgefed {

std::size_t FederationView::ap_row(std::uint32_t ap_id) const {
  auto it = std::find(ap_ids.begin(), ap_ids.end(), ap_id);
  if (it == ap_ids.end()) throw DomainError("unknown access point " + std::to_string(ap_id));
  return static_cast<std::size_t>(it - ap_ids.begin());
}

void DelayModel::validate() const {
  if (!(per_meter_latency_ms >= 0.0) || !(base_latency_ms >= 0.0)) {
    throw InvalidConfig("delay model latencies must be >= 0");
  }
}

double marginal_power(const EdcSnapshot& edc, int slots) {
  const auto before = edc_power(*edc.spec, edc.occupied, edc.t_amb);
  const auto after = edc_power(*edc.spec, edc.occupied + slots, edc.t_amb);
  return after.p_total - before.p_total;
}

namespace {

struct Candidate {
  std::size_t index = 0;
  double score = 0.0;
  double delay = 0.0;
  double marginal = 0.0;
};

AllocationDecision decision_for(const PlacementRequest& request, const FederationView& view,
                                const std::optional<Candidate>& best) {
  AllocationDecision d;
  d.session_id = request.session_id;
  if (best) {
    d.edc_id = view.edcs[best->index].spec->id;
    d.est_delay_ms = best->delay;
    d.est_marginal_power_w = best->marginal;
  }
  return d;
}

// Single pass keeping the minimum of (score, delay, id) over feasible EDCs.
template <typename Score>
AllocationDecision pick_min(const PlacementRequest& request, const FederationView& view, const DelayModel& delay,
                            double max_delay_ms, Score&& score) {
  const auto& row = view.distance_m[view.ap_row(request.serving_ap)];
  std::optional<Candidate> best;
  for (std::size_t i = 0; i < view.edcs.size(); ++i) {
    const auto& edc = view.edcs[i];
    if (!admit(*edc.spec, edc.occupied, request.slots)) continue;
    const double d = delay.delay_ms(row[i]);
    if (d > max_delay_ms) continue;
    const double m = marginal_power(edc, request.slots);
    Candidate c{i, score(edc, m), d, m};
    if (!best) {
      best = c;
      continue;
    }
    if (c.score != best->score) {
      if (c.score < best->score) best = c;
    } else if (c.delay != best->delay) {
      if (c.delay < best->delay) best = c;
    } else if (edc.spec->id < view.edcs[best->index].spec->id) {
      best = c;
    }
  }
  return decision_for(request, view, best);
}

}  // namespace

AllocationDecision allocate_nearest(const PlacementRequest& request, const FederationView& view,
                                    const DelayModel& delay) {
  return pick_min(request, view, delay, INFINITY, [](const EdcSnapshot&, double) { return 0.0; });
}

AllocationDecision allocate_energy_aware(const PlacementRequest& request, const FederationView& view,
                                         const DelayModel& delay, double max_delay_ms) {
  if (!(max_delay_ms > 0.0)) throw DomainError("max_delay must be > 0");
  return pick_min(request, view, delay, max_delay_ms, [](const EdcSnapshot&, double m) { return m; });
}

AllocationDecision allocate_cost_aware(const PlacementRequest& request, const FederationView& view,
                                       const DelayModel& delay, double max_delay_ms) {
  if (!(max_delay_ms > 0.0)) throw DomainError("max_delay must be > 0");
  return pick_min(request, view, delay, max_delay_ms, [](const EdcSnapshot& edc, double m) {
    const double effective_price = edc.free_power_w >= m ? 0.0 : edc.price;
    return m * effective_price;
  });
}

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Nearest: return "nearest";
    case PolicyKind::Energy: return "energy";
    case PolicyKind::Cost: return "cost";
  }
  return "nearest";
}

PolicyKind parse_policy(std::string_view name) {
  if (name == "nearest") return PolicyKind::Nearest;
  if (name == "energy") return PolicyKind::Energy;
  if (name == "cost") return PolicyKind::Cost;
  throw InvalidConfig("unknown policy '" + std::string(name) + "' (expected nearest|energy|cost)");
}

namespace {

class NearestPolicy final : public AllocationPolicy {
 public:
  explicit NearestPolicy(DelayModel delay) : delay_(delay) {}
  AllocationDecision decide(const PlacementRequest& r, const FederationView& v) const override {
    return allocate_nearest(r, v, delay_);
  }

 private:
  DelayModel delay_;
};

class EnergyPolicy final : public AllocationPolicy {
 public:
  EnergyPolicy(DelayModel delay, double max_delay) : delay_(delay), max_delay_(max_delay) {}
  AllocationDecision decide(const PlacementRequest& r, const FederationView& v) const override {
    return allocate_energy_aware(r, v, delay_, max_delay_);
  }

 private:
  DelayModel delay_;
  double max_delay_;
};

class CostPolicy final : public AllocationPolicy {
 public:
  CostPolicy(DelayModel delay, double max_delay) : delay_(delay), max_delay_(max_delay) {}
  AllocationDecision decide(const PlacementRequest& r, const FederationView& v) const override {
    return allocate_cost_aware(r, v, delay_, max_delay_);
  }

 private:
  DelayModel delay_;
  double max_delay_;
};

}  // namespace

std::unique_ptr<AllocationPolicy> make_policy(PolicyKind kind, DelayModel delay, double max_delay_ms) {
  switch (kind) {
    case PolicyKind::Nearest: return std::make_unique<NearestPolicy>(delay);
    case PolicyKind::Energy: return std::make_unique<EnergyPolicy>(delay, max_delay_ms);
    case PolicyKind::Cost: return std::make_unique<CostPolicy>(delay, max_delay_ms);
  }
  throw InvalidConfig("unknown policy");
}

}  // namespace edgefed
