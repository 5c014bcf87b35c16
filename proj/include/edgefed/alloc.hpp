#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgefed/edc.hpp"

namespace edgefed {

/// What a policy may know about one EDC at decision time.
struct EdcSnapshot {
  const EdcSpec* spec = nullptr;
  int occupied = 0;
  double t_amb = 20.0;
  PowerBreakdown power;
  double price = 0.0;          ///< current tier, EUR/kWh
  double p_solar = 0.0;
  double soc_wh = 0.0;
  double free_power_w = 0.0;   ///< load the site can absorb at zero grid cost
};

/// Consistent snapshot of the federation at one instant.
struct FederationView {
  SimTime t;
  std::vector<EdcSnapshot> edcs;
  std::vector<std::uint32_t> ap_ids;
  std::vector<std::vector<double>> distance_m;  ///< [ap row][edc column]

  /// Row of `ap_id` in distance_m; throws DomainError if unknown.
  std::size_t ap_row(std::uint32_t ap_id) const;
};

struct DelayModel {
  double per_meter_latency_ms = 0.005;
  double base_latency_ms = 2.0;
  double delay_ms(double meters) const { return base_latency_ms + per_meter_latency_ms * meters; }
  void validate() const;
};

struct PlacementRequest {
  std::uint64_t session_id = 0;
  std::uint32_t serving_ap = 0;
  int slots = 1;
};

struct AllocationDecision {
  std::uint64_t session_id = 0;
  std::optional<std::uint32_t> edc_id;  ///< empty when blocked
  double est_delay_ms = 0.0;
  double est_marginal_power_w = 0.0;
  bool blocked() const { return !edc_id.has_value(); }
};

/// Increase of p_it + p_cool from admitting `slots` more at the snapshot's ambient.
double marginal_power(const EdcSnapshot& edc, int slots);

AllocationDecision allocate_nearest(const PlacementRequest& request, const FederationView& view,
                                    const DelayModel& delay);
AllocationDecision allocate_energy_aware(const PlacementRequest& request, const FederationView& view,
                                         const DelayModel& delay, double max_delay_ms);
AllocationDecision allocate_cost_aware(const PlacementRequest& request, const FederationView& view,
                                       const DelayModel& delay, double max_delay_ms);

enum class PolicyKind { Nearest, Energy, Cost };

std::string_view policy_name(PolicyKind kind);
/// Accepts `nearest`, `energy`, `cost`; throws InvalidConfig otherwise.
PolicyKind parse_policy(std::string_view name);

/// Placement strategy seen by the runner. Learned policies can implement this too.
class AllocationPolicy {
 public:
  virtual ~AllocationPolicy() = default;
  virtual AllocationDecision decide(const PlacementRequest& request, const FederationView& view) const = 0;
};

std::unique_ptr<AllocationPolicy> make_policy(PolicyKind kind, DelayModel delay, double max_delay_ms);

}  // namespace edgefed
