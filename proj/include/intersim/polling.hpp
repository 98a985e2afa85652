#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "intersim/model.hpp"
#include "intersim/prng.hpp"

namespace intersim {

enum class PolicyKind {
    exhaustive,
    gated,
    k_limited,
    // Test fixture: serves the longest queue next. Violates Assumption 1
    // (regularity); exists so the regularity checker has a counterexample.
    adversarial_longest,
};

struct PollingPolicy {
    PolicyKind kind = PolicyKind::exhaustive;
    int k = 1;

    void validate() const {
        if (kind == PolicyKind::k_limited && k < 1)
            throw std::invalid_argument("PollingPolicy: k must be >= 1");
    }
};

struct Customer {
    long id = -1;
    LaneId queue = LaneId::lane1;
    double arrival = 0.0;
};

struct ScheduleEntry {
    long id = -1;
    LaneId queue = LaneId::lane1;
    double time = 0.0;  // service start (schedule time tau)
};

struct Schedule {
    std::array<std::vector<ScheduleEntry>, 2> per_queue;  // T1, T2
    std::vector<ScheduleEntry> order;                     // global service order
};

// Two-queue polling server with deterministic service time s and
// switchover time r and the wait-and-see idle rule: an empty system parks
// the server at the last-served queue; the switchover is charged between
// consecutive services of different queues, so the very first service
// starts immediately wherever it arrives.
class PollingSystem {
public:
    PollingSystem(double service, double switchover, PollingPolicy policy)
        : s_(service), r_(switchover), policy_(policy) {
        policy_.validate();
        if (!(s_ > 0.0) || !(r_ >= 0.0))
            throw std::invalid_argument("PollingSystem: need s > 0, r >= 0");
    }

    double clock() const { return clock_; }
    double service_time() const { return s_; }
    double switchover_time() const { return r_; }
    const PollingPolicy& policy() const { return policy_; }
    std::size_t queue_size(LaneId q) const { return queues_[lane_index(q)].size(); }
    bool busy() const { return mode_ != Mode::idle; }

    // Commits service/switchover completions up to time t.
    void advance(double t) {
        if (t < clock_ - 1e-9)
            throw std::invalid_argument("PollingSystem::advance: time moved backwards");
        while (true) {
            double ev = next_event_time();
            if (!(ev <= t)) break;
            commit_event(ev);
        }
        clock_ = std::max(clock_, t);
    }

    // Appends one customer; the server reacts per wait-and-see if idle.
    void add_to_queue(LaneId q, double arrival, long id = -1) {
        if (arrival < clock_ - 1e-9)
            throw std::invalid_argument("PollingSystem::add_to_queue: arrival in the past");
        advance(arrival);
        if (id < 0) id = next_id_++;
        else next_id_ = std::max(next_id_, id + 1);
        queues_[lane_index(q)].push_back(Customer{id, q, arrival});
        if (mode_ == Mode::idle) {
            if (last_served_ < 0 || last_served_ == lane_index(q)) {
                begin_visit(lane_index(q), clock_);
            } else {
                mode_ = Mode::switching;
                target_ = lane_index(q);
                activity_start_ = clock_;
            }
        }
    }

    // Pure projection: rolls the policy forward assuming no further
    // arrivals and returns every queued/in-service customer's schedule
    // time plus the induced service order.
    Schedule simulate() const {
        PollingSystem copy(*this);
        Schedule sched;
        if (copy.mode_ == Mode::serving)
            copy.record(sched, copy.current_, copy.activity_start_);
        copy.collecting_ = &sched;
        while (copy.mode_ != Mode::idle) copy.commit_event(copy.next_event_time());
        copy.collecting_ = nullptr;
        for (auto& side : sched.per_queue)
            std::sort(side.begin(), side.end(),
                      [](const ScheduleEntry& a, const ScheduleEntry& b) { return a.time < b.time; });
        std::sort(sched.order.begin(), sched.order.end(),
                  [](const ScheduleEntry& a, const ScheduleEntry& b) { return a.time < b.time; });
        return sched;
    }

private:
    enum class Mode { idle, serving, switching };

    double next_event_time() const {
        if (mode_ == Mode::serving) return activity_start_ + s_;
        if (mode_ == Mode::switching) return activity_start_ + r_;
        return kInf;
    }

    void record(Schedule& sched, const Customer& c, double start) const {
        ScheduleEntry e{c.id, c.queue, start};
        sched.per_queue[lane_index(c.queue)].push_back(e);
        sched.order.push_back(e);
    }

    void begin_visit(int q, double now) {
        if (policy_.kind == PolicyKind::gated)
            gate_remaining_ = static_cast<int>(queues_[q].size());
        else if (policy_.kind == PolicyKind::k_limited)
            served_in_visit_ = 0;
        start_service(q, now);
    }

    void start_service(int q, double now) {
        current_ = queues_[q].front();
        queues_[q].pop_front();
        mode_ = Mode::serving;
        serving_queue_ = q;
        activity_start_ = now;
        if (collecting_) record(*collecting_, current_, now);
    }

    bool visit_continues(int q) const {
        if (queues_[q].empty()) return false;
        switch (policy_.kind) {
            case PolicyKind::exhaustive: return true;
            case PolicyKind::gated: return gate_remaining_ > 0;
            case PolicyKind::k_limited: return served_in_visit_ < policy_.k;
            case PolicyKind::adversarial_longest: return false;
        }
        return false;
    }

    void commit_event(double t) {
        clock_ = t;
        if (mode_ == Mode::serving) {
            const int q = serving_queue_;
            last_served_ = q;
            if (policy_.kind == PolicyKind::gated) --gate_remaining_;
            if (policy_.kind == PolicyKind::k_limited) ++served_in_visit_;
            mode_ = Mode::idle;

            if (policy_.kind == PolicyKind::adversarial_longest) {
                decide_adversarial(t);
                return;
            }
            if (visit_continues(q)) {
                start_service(q, t);
                return;
            }
            const int other = 1 - q;
            if (!queues_[other].empty()) {
                mode_ = Mode::switching;
                target_ = other;
                activity_start_ = t;
            } else if (!queues_[q].empty()) {
                begin_visit(q, t);  // re-gate / reset limit, no switchover
            }
            // else: wait-and-see idle at q
        } else if (mode_ == Mode::switching) {
            const int q = target_;
            mode_ = Mode::idle;
            if (!queues_[q].empty()) {
                begin_visit(q, t);
            }
            // Arrivals cannot vanish, but stay defensive: idle at target.
            last_served_ = last_served_ < 0 ? last_served_ : last_served_;
        }
    }

    void decide_adversarial(double t) {
        const int q = serving_queue_;
        const auto n1 = queues_[0].size(), n2 = queues_[1].size();
        if (n1 == 0 && n2 == 0) return;  // idle at q
        int target;
        if (n1 == n2) target = q >= 0 && !queues_[q].empty() ? q : (n1 > 0 ? 0 : 1);
        else target = n1 > n2 ? 0 : 1;
        if (target == q) {
            start_service(q, t);
        } else {
            mode_ = Mode::switching;
            target_ = target;
            activity_start_ = t;
        }
    }

    double s_, r_;
    PollingPolicy policy_;
    double clock_ = 0.0;
    std::array<std::deque<Customer>, 2> queues_;
    Mode mode_ = Mode::idle;
    int serving_queue_ = -1;
    int target_ = -1;
    int last_served_ = -1;  // -1: nothing served yet
    double activity_start_ = 0.0;
    Customer current_;
    int gate_remaining_ = 0;
    int served_in_visit_ = 0;
    long next_id_ = 0;
    Schedule* collecting_ = nullptr;
};

struct PollingOutcome {
    std::vector<Customer> customers;
    std::vector<double> schedule_time;  // by position in `customers`
    std::vector<double> wait;           // schedule_time - arrival
};

// Full event-driven run over fixed arrival streams; waits are
// schedule-time minus arrival per customer. Simultaneous arrivals across
// lanes are processed lane 1 first.
inline PollingOutcome run_polling(const std::vector<double>& arrivals1,
                                  const std::vector<double>& arrivals2,
                                  const PollingPolicy& policy, double s, double r) {
    PollingSystem sys(s, r, policy);
    PollingOutcome out;
    std::size_t i1 = 0, i2 = 0;
    long id = 0;
    while (i1 < arrivals1.size() || i2 < arrivals2.size()) {
        bool take1;
        if (i1 >= arrivals1.size()) take1 = false;
        else if (i2 >= arrivals2.size()) take1 = true;
        else take1 = arrivals1[i1] <= arrivals2[i2];
        LaneId lane = take1 ? LaneId::lane1 : LaneId::lane2;
        double t = take1 ? arrivals1[i1++] : arrivals2[i2++];
        sys.add_to_queue(lane, t, id);
        out.customers.push_back(Customer{id, lane, t});
        ++id;
    }
    Schedule sched = sys.simulate();
    out.schedule_time.assign(out.customers.size(), std::nan(""));
    out.wait.assign(out.customers.size(), std::nan(""));
    for (const auto& e : sched.order) {
        auto idx = static_cast<std::size_t>(e.id);
        out.schedule_time[idx] = e.time;
        out.wait[idx] = e.time - out.customers[idx].arrival;
    }
    return out;
}

struct RegularityWitness {
    bool pass = true;
    std::string detail;
};

// Randomized Assumption-1 check: simulate, inject one arrival, re-simulate
// and verify the old service order survives with the new customer inserted
// at a single point and earlier-scheduled times unchanged.
inline RegularityWitness check_regularity(const PollingPolicy& policy, std::uint64_t seed,
                                          int scenarios = 1000) {
    Prng rng(seed, 0x72656775ULL);
    for (int sc = 0; sc < scenarios; ++sc) {
        const double s = 0.5 + rng.uniform() * 1.5;
        const double r = 0.1 + rng.uniform() * 1.2;
        PollingSystem sys(s, r, policy);

        int n = 1 + static_cast<int>(rng.uniform() * 10.0);
        double t = 0.0;
        long id = 0;
        for (int i = 0; i < n; ++i) {
            t += rng.uniform() * 2.0 * s;
            LaneId lane = rng.uniform() < 0.5 ? LaneId::lane1 : LaneId::lane2;
            sys.add_to_queue(lane, t, id++);
        }
        double t_inject = t + rng.uniform() * 2.0 * s;
        sys.advance(t_inject);

        Schedule before = sys.simulate();
        LaneId lane = rng.uniform() < 0.5 ? LaneId::lane1 : LaneId::lane2;
        const long new_id = id;
        sys.add_to_queue(lane, t_inject, new_id);
        Schedule after = sys.simulate();

        if (after.order.size() != before.order.size() + 1) {
            return {false, "scenario " + std::to_string(sc) + ": size mismatch"};
        }
        int insertions = 0;
        std::size_t bi = 0;
        bool inserted_seen = false;
        bool order_ok = true;
        for (const auto& e : after.order) {
            if (e.id == new_id) {
                ++insertions;
                inserted_seen = true;
                continue;
            }
            if (bi >= before.order.size() || before.order[bi].id != e.id) {
                order_ok = false;
                break;
            }
            if (!inserted_seen && std::abs(before.order[bi].time - e.time) > 1e-9) {
                std::ostringstream os;
                os << "scenario " << sc << ": earlier-scheduled customer " << e.id
                   << " moved from " << before.order[bi].time << " to " << e.time;
                return {false, os.str()};
            }
            ++bi;
        }
        if (!order_ok || insertions != 1 || bi != before.order.size()) {
            std::ostringstream os;
            os << "scenario " << sc << ": order not preserved under insertion (policy ";
            os << static_cast<int>(policy.kind) << "); before=[";
            for (const auto& e : before.order) os << e.id << " ";
            os << "] after=[";
            for (const auto& e : after.order) os << e.id << " ";
            os << "]";
            return {false, os.str()};
        }
    }
    return {true, {}};
}

} // namespace intersim
