#pragma once

#include <functional>
#include <iosfwd>
#include <optional>

#include "xfer/env/rideshare/demand.hpp"
#include "xfer/env/rideshare/network.hpp"
#include "xfer/net/dense_net.hpp"

namespace xfer::mod {

using net::Vec;

enum class ModAction { Park = 0, Dropoff = 1, Pickup1 = 2, Pickup2 = 3, Pickup3 = 4 };
constexpr int kModActionCount = 5;
constexpr int kSlotCount = 3;

/// Observation layout (see World::build_observation):
///   [veh_x, veh_y, free_seats, quickest_dest_x, quickest_dest_y, has_quickest]
///   + kSlotCount * [orig_x, orig_y, dest_x, dest_y, passengers,
///                   pickup_detour, dropoff_detour, feasible]
/// Coordinates are normalized to [0,1], detours are in minutes / 10,
/// absent slots carry -1 sentinels and feasible = 0.
constexpr int kObservationSize = 6 + kSlotCount * 8;

struct ModConfig {
  int seats = 5;
  int vehicle_count = 1;
  double park_duration_s = 30.0;
  double noop_tick_s = 5.0;
  double reeval_cooldown_s = 60.0;
  double max_sim_time_s = 500000.0;  // safety cap; exceeding it flags truncation
  std::vector<int> spawn_nodes;      // fixed spawns (cycled); random when empty
};

/// One completed decision-to-completion interaction of a vehicle.
struct ClosedTransition {
  int vehicle = 0;
  Vec state;
  int action = 0;
  double log_prob = 0.0;
  double reward = 0.0;
  Vec next_state;
  bool done = false;
  double decision_time = 0.0;
  double close_time = 0.0;
};

struct RequestOutcome {
  int id = 0;
  int origin = 0, dest = 0, passengers = 0;
  double issue_time = 0.0, expiry_time = 0.0;
  RideRequest::Status final_status = RideRequest::Status::pending;
  int vehicle = -1;
  double assign_time = -1.0, board_time = -1.0, alight_time = -1.0;
  double board_odometer_m = 0.0, alight_odometer_m = 0.0;
  double direct_distance_m = 0.0;
};

struct VehicleOutcome {
  int id = 0;
  int spawn_node = 0;
  double distance_m = 0.0;
  int served_requests = 0;
  int served_passengers = 0;
};

struct EpisodeTrace {
  std::vector<RequestOutcome> requests;
  std::vector<VehicleOutcome> vehicles;
  double end_time = 0.0;
  bool truncated = false;
  long decision_count = 0;
};

/// Event-driven MoD simulator with ride-sharing. Single-threaded by design:
/// all vehicles share one clock and decision requests are served FIFO by
/// (event time, vehicle id).
///
/// Action semantics at a decision point:
///  - Park: idle for park_duration_s.
///  - Dropoff: head for the committed stop servable the quickest (the next
///    stop of the quickest onboard/assigned request); infeasible when no
///    request is committed.
///  - Pickup i: commit observation slot i; its origin and destination join
///    the planned stop sequence by cheapest insertion; infeasible when the
///    slot is masked.
///  - Infeasible choices cost -1 and the vehicle re-decides after a no-op
///    tick.
/// Rewards close when the action's milestone completes; the next state of
/// a transition is the observation at that closing decision point.
class World {
 public:
  using PolicyFn =
      std::function<std::pair<int, double>(std::span<const double> obs, int vehicle,
                                           double time)>;
  using ClosureFn = std::function<void(const ClosedTransition&)>;

  World(const RoadNetwork& net, std::vector<RideRequest> demand, ModConfig config,
        std::uint64_t spawn_seed);

  /// Runs the episode to termination (no pending or committed requests
  /// left). `on_close` receives every completed transition in closing
  /// order; `trace_jsonl` optionally receives the event log.
  EpisodeTrace run(const PolicyFn& policy, const ClosureFn& on_close = nullptr,
                   std::ostream* trace_jsonl = nullptr);

  const RoadNetwork& network() const { return net_; }
  const ModConfig& config() const { return config_; }

 private:
  struct Stop {
    bool is_pickup = false;
    int request_id = -1;
    int node = -1;
  };

  struct OpenAction {
    enum class Kind { park, noop, pickup, dropoff };
    Kind kind = Kind::park;
    Vec state;
    int action = 0;
    double log_prob = 0.0;
    double decision_time = 0.0;
    // stop milestone (pickup/dropoff kinds): closes when this stop is serviced
    int request_id = -1;
    bool stop_is_pickup = false;
    bool first_request = false;  // pickup reward x selector
    bool serving_any = false;    // park reward x selector
    bool due = false;
  };

  struct VehicleSim {
    int id = 0;
    int node = 0;
    int spawn_node = 0;
    double odometer_m = 0.0;
    std::vector<Stop> itinerary;
    std::vector<int> onboard;   // request ids, boarded
    std::vector<int> assigned;  // request ids, committed but not boarded
    std::vector<OpenAction> open;
    double last_decision_time = -1.0e18;
    // scheduled event (exactly one per vehicle while the episode runs)
    enum class Next { decide, arrive, park_end, tick_end, none } next = Next::none;
    int drive_to = -1;          // hop target node
    double leg_length_m = 0.0;  // length of the current hop
  };

  struct Candidate {
    int request_id = -1;
    double pickup_detour_s = 0.0;
    double dropoff_detour_s = 0.0;
    std::size_t insert_origin = 0;  // position in itinerary for the origin
    std::size_t insert_dest = 0;    // position after origin insertion
  };

  const RoadNetwork& net_;
  ModConfig config_;
  std::vector<RideRequest> requests_;
  std::vector<RequestOutcome> outcome_;
  std::vector<VehicleSim> vehicles_;
  std::vector<int> pending_;  // issued, unexpired, unassigned; sorted by id
  long future_issues_ = 0;
  double now_ = 0.0;
  long decision_count_ = 0;
  std::ostream* trace_ = nullptr;
  const PolicyFn* policy_ = nullptr;
  const ClosureFn* on_close_ = nullptr;

  // event heap entries: (time, klass, id); klass 0=issue, 1=expiry, 2=vehicle
  struct Event {
    double time;
    int klass;
    int id;
    bool operator>(const Event& o) const {
      if (time != o.time) return time > o.time;
      if (klass != o.klass) return klass > o.klass;
      return id > o.id;
    }
  };

  std::vector<Event> heap_;
  void push_event(double t, int klass, int id);
  bool pop_event(Event& e);

  int committed_passengers(const VehicleSim& v) const;
  int onboard_passengers(const VehicleSim& v) const;
  bool terminated() const;

  std::vector<Candidate> rank_candidates(const VehicleSim& v) const;
  bool insertion_feasible(const VehicleSim& v, const RideRequest& req,
                          std::size_t origin_pos, std::size_t dest_pos,
                          double* pickup_detour_s, double* dropoff_detour_s) const;
  Vec build_observation(const VehicleSim& v, const std::vector<Candidate>& cands) const;

  void decide(VehicleSim& v);
  void close_due(VehicleSim& v, const Vec& next_obs, bool done);
  void start_driving(VehicleSim& v);
  void handle_arrival(VehicleSim& v);
  void service_stops(VehicleSim& v);
  EpisodeTrace finish(bool truncated);
};

}  // namespace xfer::mod
