#include "xfer/env/rideshare/world.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "xfer/env/rideshare/rewards.hpp"

namespace xfer::mod {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void erase_value(std::vector<int>& v, int value) {
  v.erase(std::remove(v.begin(), v.end(), value), v.end());
}
}  // namespace

World::World(const RoadNetwork& net, std::vector<RideRequest> demand, ModConfig config,
             std::uint64_t spawn_seed)
    : net_(net), config_(config), requests_(std::move(demand)) {
  if (config_.vehicle_count <= 0)
    throw std::invalid_argument("World: need at least one vehicle");

  // Requests are handled by dense index internally; RideRequest::id is kept
  // only for reporting, so residual pools with gaps are fine.
  outcome_.resize(requests_.size());
  for (std::size_t i = 0; i < requests_.size(); ++i) {
    RideRequest& r = requests_[i];
    r.status = RideRequest::Status::pending;
    if (r.origin == r.dest)
      throw std::invalid_argument("World: request origin equals destination");
    RequestOutcome& o = outcome_[i];
    o.id = r.id;
    o.origin = r.origin;
    o.dest = r.dest;
    o.passengers = r.passengers;
    o.issue_time = r.issue_time;
    o.expiry_time = r.expiry_time;
    o.direct_distance_m = net_.distance_m(r.origin, r.dest);
  }

  std::mt19937_64 rng(spawn_seed);
  std::uniform_int_distribution<int> node(0, net_.node_count() - 1);
  vehicles_.resize(config_.vehicle_count);
  for (int i = 0; i < config_.vehicle_count; ++i) {
    VehicleSim& v = vehicles_[i];
    v.id = i;
    v.node = v.spawn_node =
        config_.spawn_nodes.empty()
            ? node(rng)
            : config_.spawn_nodes[i % config_.spawn_nodes.size()];
    if (v.node < 0 || v.node >= net_.node_count())
      throw std::invalid_argument("World: spawn node out of range");
  }
}

void World::push_event(double t, int klass, int id) {
  heap_.push_back({t, klass, id});
  std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
}

bool World::pop_event(Event& e) {
  if (heap_.empty()) return false;
  std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{});
  e = heap_.back();
  heap_.pop_back();
  return true;
}

int World::onboard_passengers(const VehicleSim& v) const {
  int n = 0;
  for (int rid : v.onboard) n += requests_[rid].passengers;
  return n;
}

int World::committed_passengers(const VehicleSim& v) const {
  int n = onboard_passengers(v);
  for (int rid : v.assigned) n += requests_[rid].passengers;
  return n;
}

bool World::terminated() const {
  if (!pending_.empty() || future_issues_ > 0) return false;
  for (const VehicleSim& v : vehicles_)
    if (!v.itinerary.empty() || !v.onboard.empty() || !v.assigned.empty()) return false;
  return true;
}

bool World::insertion_feasible(const VehicleSim& v, const RideRequest& req,
                               std::size_t origin_pos, std::size_t dest_pos,
                               double* pickup_detour_s, double* dropoff_detour_s) const {
  // Candidate sequence: origin inserted before old index origin_pos, then
  // destination at index dest_pos of the once-extended sequence
  // (dest_pos > origin_pos, so pickup precedes drop-off).
  const std::size_t L = v.itinerary.size();
  const int req_index = static_cast<int>(&req - requests_.data());
  std::vector<Stop> seq;
  seq.reserve(L + 2);
  seq.insert(seq.end(), v.itinerary.begin(), v.itinerary.end());
  seq.insert(seq.begin() + origin_pos, Stop{true, req_index, req.origin});
  seq.insert(seq.begin() + dest_pos, Stop{false, req_index, req.dest});

  auto route_cost = [&](auto&& keep) {
    double cost = 0.0;
    int prev = v.node;
    for (const Stop& s : seq) {
      if (!keep(s)) continue;
      cost += net_.travel_time_s(prev, s.node);
      prev = s.node;
    }
    return cost;
  };
  const double base_cost =
      route_cost([&](const Stop& s) { return s.request_id != req_index; });
  const double cost_with_origin =
      route_cost([&](const Stop& s) { return s.request_id != req_index || s.is_pickup; });
  const double total_cost = route_cost([](const Stop&) { return true; });

  // Expiry feasibility: the candidate pickup and every already committed
  // pickup must still be reached in time under the full insertion.
  double t = now_;
  int prev = v.node;
  for (const Stop& s : seq) {
    t += net_.travel_time_s(prev, s.node);
    prev = s.node;
    if (s.is_pickup && t > requests_[s.request_id].expiry_time + 1e-9) return false;
  }

  *pickup_detour_s = cost_with_origin - base_cost;
  *dropoff_detour_s = total_cost - cost_with_origin;
  return true;
}

std::vector<World::Candidate> World::rank_candidates(const VehicleSim& v) const {
  std::vector<Candidate> found;
  const int committed = committed_passengers(v);
  const std::size_t L = v.itinerary.size();
  for (int rid : pending_) {
    const RideRequest& req = requests_[rid];
    if (committed + req.passengers > config_.seats) continue;
    Candidate best;
    double best_total = kInf;
    for (std::size_t i = 0; i <= L; ++i) {
      for (std::size_t d = i + 1; d <= L + 1; ++d) {
        double pu = 0.0, doff = 0.0;
        if (!insertion_feasible(v, req, i, d, &pu, &doff)) continue;
        const double total = pu + doff;
        if (total < best_total - 1e-9) {
          best_total = total;
          best = {rid, pu, doff, i, d};
        }
      }
    }
    if (best_total < kInf) found.push_back(best);
  }
  std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
    if (a.pickup_detour_s != b.pickup_detour_s)
      return a.pickup_detour_s < b.pickup_detour_s;
    return a.request_id < b.request_id;
  });
  if (found.size() > kSlotCount) found.resize(kSlotCount);
  return found;
}

Vec World::build_observation(const VehicleSim& v, const std::vector<Candidate>& cands) const {
  Vec o(kObservationSize, -1.0);
  const double ex = net_.extent_x() > 0 ? net_.extent_x() : 1.0;
  const double ey = net_.extent_y() > 0 ? net_.extent_y() : 1.0;
  o[0] = net_.node_x(v.node) / ex;
  o[1] = net_.node_y(v.node) / ey;
  o[2] = static_cast<double>(config_.seats - onboard_passengers(v)) / config_.seats;

  // Destination of the committed request servable the quickest.
  int quickest = -1;
  double quickest_tt = kInf;
  auto consider = [&](int rid, int stop_node) {
    const double tt = net_.travel_time_s(v.node, stop_node);
    if (tt < quickest_tt - 1e-9 || (tt < quickest_tt + 1e-9 && rid < quickest)) {
      quickest_tt = tt;
      quickest = rid;
    }
  };
  for (int rid : v.onboard) consider(rid, requests_[rid].dest);
  for (int rid : v.assigned) consider(rid, requests_[rid].origin);
  if (quickest >= 0) {
    o[3] = net_.node_x(requests_[quickest].dest) / ex;
    o[4] = net_.node_y(requests_[quickest].dest) / ey;
    o[5] = 1.0;
  } else {
    o[5] = 0.0;
  }

  for (int s = 0; s < kSlotCount; ++s) {
    const std::size_t base = 6 + 8 * static_cast<std::size_t>(s);
    if (s < static_cast<int>(cands.size())) {
      const RideRequest& req = requests_[cands[s].request_id];
      o[base + 0] = net_.node_x(req.origin) / ex;
      o[base + 1] = net_.node_y(req.origin) / ey;
      o[base + 2] = net_.node_x(req.dest) / ex;
      o[base + 3] = net_.node_y(req.dest) / ey;
      o[base + 4] = req.passengers / 4.0;
      o[base + 5] = cands[s].pickup_detour_s / 60.0 / 10.0;
      o[base + 6] = cands[s].dropoff_detour_s / 60.0 / 10.0;
      o[base + 7] = 1.0;
    } else {
      o[base + 7] = 0.0;
    }
  }
  return o;
}

void World::close_due(VehicleSim& v, const Vec& next_obs, bool done) {
  for (auto it = v.open.begin(); it != v.open.end();) {
    if (!it->due) {
      ++it;
      continue;
    }
    const OpenAction& oa = *it;
    const double delay_min = (now_ - oa.decision_time) / 60.0;
    double r = 0.0;
    switch (oa.kind) {
      case OpenAction::Kind::park:
        // A park action always completes after the full park duration, even
        // when the episode terminates mid-park.
        r = reward::park(oa.serving_any, config_.park_duration_s / 60.0);
        break;
      case OpenAction::Kind::noop:
        r = reward::infeasible();
        break;
      case OpenAction::Kind::pickup:
        r = reward::pickup(oa.first_request, delay_min);
        break;
      case OpenAction::Kind::dropoff:
        r = reward::dropoff(delay_min);
        break;
    }
    if (on_close_ && *on_close_) {
      ClosedTransition ct;
      ct.vehicle = v.id;
      ct.state = oa.state;
      ct.action = oa.action;
      ct.log_prob = oa.log_prob;
      ct.reward = r;
      ct.next_state = next_obs;
      ct.done = done;
      ct.decision_time = oa.decision_time;
      ct.close_time = now_;
      (*on_close_)(ct);
    }
    it = v.open.erase(it);
  }
}

void World::start_driving(VehicleSim& v) {
  if (v.itinerary.empty())
    throw std::logic_error("World: start_driving with empty itinerary");
  const int target = v.itinerary.front().node;
  if (target == v.node) {
    v.next = VehicleSim::Next::arrive;
    v.drive_to = v.node;
    v.leg_length_m = 0.0;
    push_event(now_, 2, v.id);
    return;
  }
  const int hop = net_.next_hop(v.node, target);
  v.next = VehicleSim::Next::arrive;
  v.drive_to = hop;
  v.leg_length_m = net_.edge_length_m(v.node, hop);
  push_event(now_ + v.leg_length_m / net_.speed_mps(), 2, v.id);
}

void World::service_stops(VehicleSim& v) {
  while (!v.itinerary.empty() && v.itinerary.front().node == v.node) {
    const Stop stop = v.itinerary.front();
    v.itinerary.erase(v.itinerary.begin());
    RideRequest& req = requests_[stop.request_id];
    RequestOutcome& out = outcome_[stop.request_id];
    if (stop.is_pickup) {
      req.status = RideRequest::Status::onboard;
      erase_value(v.assigned, stop.request_id);
      v.onboard.push_back(stop.request_id);
      if (onboard_passengers(v) > config_.seats)
        throw std::logic_error("World: seat conservation violated");
      out.board_time = now_;
      out.board_odometer_m = v.odometer_m;
      if (trace_)
        *trace_ << "{\"ev\":\"board\",\"id\":" << out.id
                << ",\"vehicle\":" << v.id << ",\"t\":" << now_
                << ",\"odometer_m\":" << v.odometer_m << "}\n";
    } else {
      req.status = RideRequest::Status::served;
      erase_value(v.onboard, stop.request_id);
      out.alight_time = now_;
      out.alight_odometer_m = v.odometer_m;
      out.final_status = RideRequest::Status::served;
      if (trace_)
        *trace_ << "{\"ev\":\"alight\",\"id\":" << out.id
                << ",\"vehicle\":" << v.id << ",\"t\":" << now_
                << ",\"odometer_m\":" << v.odometer_m << "}\n";
    }
    for (OpenAction& oa : v.open) {
      if ((oa.kind == OpenAction::Kind::pickup || oa.kind == OpenAction::Kind::dropoff) &&
          oa.request_id == stop.request_id && oa.stop_is_pickup == stop.is_pickup)
        oa.due = true;
    }
  }
}

void World::decide(VehicleSim& v) {
  const std::vector<Candidate> cands = rank_candidates(v);
  const Vec obs = build_observation(v, cands);
  close_due(v, obs, false);
  v.last_decision_time = now_;
  ++decision_count_;

  const auto [action, log_prob] = (*policy_)(obs, v.id, now_);
  if (action < 0 || action >= kModActionCount)
    throw std::invalid_argument("World: action index out of range");

  const bool serving_any = !(v.onboard.empty() && v.assigned.empty());
  if (trace_)
    *trace_ << "{\"ev\":\"decision\",\"vehicle\":" << v.id << ",\"t\":" << now_
            << ",\"action\":" << action << "}\n";

  auto open_action = [&](OpenAction::Kind kind) {
    OpenAction oa;
    oa.kind = kind;
    oa.state = obs;
    oa.action = action;
    oa.log_prob = log_prob;
    oa.decision_time = now_;
    oa.serving_any = serving_any;
    return oa;
  };
  auto infeasible = [&] {
    OpenAction oa = open_action(OpenAction::Kind::noop);
    oa.due = false;
    v.open.push_back(std::move(oa));
    v.next = VehicleSim::Next::tick_end;
    push_event(now_ + config_.noop_tick_s, 2, v.id);
  };

  switch (static_cast<ModAction>(action)) {
    case ModAction::Park: {
      v.open.push_back(open_action(OpenAction::Kind::park));
      v.next = VehicleSim::Next::park_end;
      push_event(now_ + config_.park_duration_s, 2, v.id);
      break;
    }
    case ModAction::Dropoff: {
      if (!serving_any) {
        infeasible();
        break;
      }
      // Quickest-servable request: minimal travel time to its next stop.
      int quickest = -1;
      bool quickest_is_pickup = false;
      double best_tt = kInf;
      auto consider = [&](int rid, int node, bool is_pickup) {
        const double tt = net_.travel_time_s(v.node, node);
        if (tt < best_tt - 1e-9 || (tt < best_tt + 1e-9 && rid < quickest)) {
          best_tt = tt;
          quickest = rid;
          quickest_is_pickup = is_pickup;
        }
      };
      for (int rid : v.onboard) consider(rid, requests_[rid].dest, false);
      for (int rid : v.assigned) consider(rid, requests_[rid].origin, true);

      auto target = std::find_if(v.itinerary.begin(), v.itinerary.end(),
                                 [&](const Stop& s) {
                                   return s.request_id == quickest &&
                                          s.is_pickup == quickest_is_pickup;
                                 });
      if (target == v.itinerary.end())
        throw std::logic_error("World: committed request has no stop");
      std::rotate(v.itinerary.begin(), target, target + 1);

      OpenAction oa = open_action(OpenAction::Kind::dropoff);
      oa.request_id = quickest;
      oa.stop_is_pickup = quickest_is_pickup;
      v.open.push_back(std::move(oa));
      start_driving(v);
      break;
    }
    case ModAction::Pickup1:
    case ModAction::Pickup2:
    case ModAction::Pickup3: {
      const int slot = action - static_cast<int>(ModAction::Pickup1);
      if (slot >= static_cast<int>(cands.size())) {
        infeasible();
        break;
      }
      const Candidate& c = cands[slot];
      RideRequest& req = requests_[c.request_id];
      req.status = RideRequest::Status::assigned;
      erase_value(pending_, c.request_id);
      outcome_[c.request_id].vehicle = v.id;
      outcome_[c.request_id].assign_time = now_;
      v.assigned.push_back(c.request_id);
      v.itinerary.insert(v.itinerary.begin() + c.insert_origin,
                         Stop{true, c.request_id, req.origin});
      v.itinerary.insert(v.itinerary.begin() + c.insert_dest,
                         Stop{false, c.request_id, req.dest});
      if (trace_)
        *trace_ << "{\"ev\":\"assign\",\"id\":" << outcome_[c.request_id].id
                << ",\"vehicle\":" << v.id << ",\"t\":" << now_ << "}\n";

      OpenAction oa = open_action(OpenAction::Kind::pickup);
      oa.request_id = c.request_id;
      oa.stop_is_pickup = true;
      oa.first_request = !serving_any;
      v.open.push_back(std::move(oa));
      start_driving(v);
      break;
    }
    default:
      infeasible();
      break;
  }
}

void World::handle_arrival(VehicleSim& v) {
  v.node = v.drive_to;
  v.odometer_m += v.leg_length_m;
  v.leg_length_m = 0.0;
  v.next = VehicleSim::Next::none;

  if (!v.itinerary.empty() && v.itinerary.front().node == v.node) {
    service_stops(v);
    decide(v);
    return;
  }
  const bool reeval_due = now_ - v.last_decision_time >= config_.reeval_cooldown_s &&
                          config_.seats - committed_passengers(v) >= 1 &&
                          !pending_.empty();
  if (reeval_due) {
    decide(v);
    return;
  }
  if (v.itinerary.empty())
    throw std::logic_error("World: driving with empty itinerary");
  start_driving(v);
}

EpisodeTrace World::run(const PolicyFn& policy, const ClosureFn& on_close,
                        std::ostream* trace_jsonl) {
  policy_ = &policy;
  on_close_ = on_close ? &on_close : nullptr;
  trace_ = trace_jsonl;

  heap_.clear();
  pending_.clear();
  future_issues_ = static_cast<long>(requests_.size());
  now_ = 0.0;
  decision_count_ = 0;

  for (const RideRequest& r : requests_) {
    push_event(r.issue_time, 0, r.id);
    push_event(r.expiry_time, 1, r.id);
  }
  for (VehicleSim& v : vehicles_) {
    v.next = VehicleSim::Next::decide;
    push_event(0.0, 2, v.id);
    if (trace_)
      *trace_ << "{\"ev\":\"spawn\",\"vehicle\":" << v.id << ",\"node\":" << v.spawn_node
              << "}\n";
  }

  Event e;
  while (true) {
    if (terminated()) return finish(false);
    if (!pop_event(e)) return finish(false);
    if (e.time > config_.max_sim_time_s) return finish(true);
    now_ = e.time;
    switch (e.klass) {
      case 0: {  // issue
        RideRequest& r = requests_[e.id];
        --future_issues_;
        if (r.status == RideRequest::Status::pending) {
          pending_.insert(std::lower_bound(pending_.begin(), pending_.end(), e.id), e.id);
          if (trace_)
            *trace_ << "{\"ev\":\"issue\",\"id\":" << r.id << ",\"t\":" << now_
                    << ",\"origin\":" << r.origin << ",\"dest\":" << r.dest
                    << ",\"pax\":" << r.passengers << ",\"expiry\":" << r.expiry_time
                    << ",\"direct_m\":" << outcome_[e.id].direct_distance_m << "}\n";
        }
        break;
      }
      case 1: {  // expiry
        RideRequest& r = requests_[e.id];
        if (r.status == RideRequest::Status::pending) {
          r.status = RideRequest::Status::expired;
          outcome_[e.id].final_status = RideRequest::Status::expired;
          erase_value(pending_, e.id);
          if (trace_)
            *trace_ << "{\"ev\":\"expire\",\"id\":" << outcome_[e.id].id << ",\"t\":" << now_
                    << "}\n";
        }
        break;
      }
      case 2: {  // vehicle
        VehicleSim& v = vehicles_[e.id];
        switch (v.next) {
          case VehicleSim::Next::decide:
            v.next = VehicleSim::Next::none;
            decide(v);
            break;
          case VehicleSim::Next::arrive:
            handle_arrival(v);
            break;
          case VehicleSim::Next::park_end:
          case VehicleSim::Next::tick_end: {
            v.next = VehicleSim::Next::none;
            // Exactly one open park/noop action is waiting on this event.
            for (OpenAction& oa : v.open)
              if (oa.kind == OpenAction::Kind::park || oa.kind == OpenAction::Kind::noop)
                oa.due = true;
            decide(v);
            break;
          }
          case VehicleSim::Next::none:
            throw std::logic_error("World: vehicle event with no scheduled action");
        }
        break;
      }
      default:
        throw std::logic_error("World: unknown event class");
    }
  }
}

EpisodeTrace World::finish(bool truncated) {
  EpisodeTrace trace;
  trace.truncated = truncated;
  trace.end_time = now_;
  trace.decision_count = decision_count_;

  for (VehicleSim& v : vehicles_) {
    if (!v.open.empty()) {
      for (OpenAction& oa : v.open) oa.due = true;
      const Vec obs = build_observation(v, rank_candidates(v));
      close_due(v, obs, true);
    }
  }

  for (const RequestOutcome& o : outcome_) {
    RequestOutcome out = o;
    // Requests still pending at a truncated end are reported as expired;
    // committed ones keep their live status so callers can flag them.
    if (out.final_status == RideRequest::Status::pending)
      out.final_status = requests_[o.id].status;
    trace.requests.push_back(out);
  }
  for (const VehicleSim& v : vehicles_) {
    VehicleOutcome vo;
    vo.id = v.id;
    vo.spawn_node = v.spawn_node;
    vo.distance_m = v.odometer_m;
    int served = 0, pax = 0;
    for (const RequestOutcome& o : trace.requests) {
      if (o.vehicle == v.id && o.final_status == RideRequest::Status::served) {
        ++served;
        pax += o.passengers;
      }
    }
    vo.served_requests = served;
    vo.served_passengers = pax;
    if (trace_)
      *trace_ << "{\"ev\":\"vehicle_end\",\"vehicle\":" << vo.id
              << ",\"spawn\":" << vo.spawn_node << ",\"distance_m\":" << vo.distance_m
              << ",\"served_requests\":" << vo.served_requests
              << ",\"served_passengers\":" << vo.served_passengers << "}\n";
    trace.vehicles.push_back(vo);
  }
  if (trace_)
    *trace_ << "{\"ev\":\"end\",\"t\":" << now_
            << ",\"truncated\":" << (truncated ? "true" : "false")
            << ",\"decisions\":" << decision_count_ << "}\n";
  return trace;
}

}  // namespace xfer::mod
