#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace intersim {

// Geometry and dynamics constants shared by every module.
// Positions are front-bumper coordinates along the lane axis: -L at the
// control-region entrance, 0 at the intersection-region boundary.
struct VehicleParams {
    double length = 2.0;         // l [m]
    double width = 1.0;          // w [m]
    double v_max = 10.0;         // v_m [m/s]
    double a_max = 4.0;          // a_m [m/s^2]
    double region_length = 50.0; // L [m]

    double service_time() const { return length / v_max; }    // s
    double switchover_time() const { return width / v_max; }  // r
    double min_region_length() const { return 2.0 * v_max * v_max / a_max; } // L*
    bool region_long_enough() const {
        return region_length >= min_region_length() - 1e-9;
    }
    double free_flow_time() const {
        return (region_length + length + width) / v_max;
    }

    void validate() const {
        if (!(length > 0.0)) throw std::invalid_argument("VehicleParams: l must be > 0");
        if (!(width > 0.0)) throw std::invalid_argument("VehicleParams: w must be > 0");
        if (!(v_max > 0.0)) throw std::invalid_argument("VehicleParams: v_m must be > 0");
        if (!(a_max > 0.0)) throw std::invalid_argument("VehicleParams: a_m must be > 0");
        if (!(region_length > 0.0)) throw std::invalid_argument("VehicleParams: L must be > 0");
    }
};

enum class LaneId : int { lane1 = 1, lane2 = 2 };

inline int lane_index(LaneId k) { return k == LaneId::lane1 ? 0 : 1; }
inline LaneId lane_from_index(int i) { return i == 0 ? LaneId::lane1 : LaneId::lane2; }

struct State {
    double position = 0.0;
    double velocity = 0.0;
};

// Open axis-aligned rectangle.
struct Rectangle {
    double x_lo, x_hi, y_lo, y_hi;

    bool intersects(const Rectangle& o) const {
        return x_lo < o.x_hi && o.x_lo < x_hi && y_lo < o.y_hi && o.y_lo < y_hi;
    }
    // Overlap depth (smallest separating translation); <= 0 when disjoint.
    double penetration(const Rectangle& o) const {
        double dx = std::min(x_hi, o.x_hi) - std::max(x_lo, o.x_lo);
        double dy = std::min(y_hi, o.y_hi) - std::max(y_lo, o.y_lo);
        return std::min(dx, dy);
    }
};

// Rigid body R(y,k): lane 1 travels along the x axis, lane 2 along y.
inline Rectangle rigid_body(double y, LaneId lane, const VehicleParams& p) {
    if (lane == LaneId::lane1)
        return Rectangle{y - p.length, y, 0.0, p.width};
    return Rectangle{0.0, p.width, y - p.length, y};
}

struct CollisionPair {
    std::size_t first;
    std::size_t second;
    double penetration;
};

// Pairwise collision report for a snapshot of front-bumper positions.
// Empty result == safe in the sense of open-rectangle disjointness.
inline std::vector<CollisionPair> check_safety(
    const std::vector<std::pair<LaneId, double>>& snapshot,
    const VehicleParams& p) {
    std::vector<CollisionPair> out;
    std::vector<Rectangle> bodies;
    bodies.reserve(snapshot.size());
    for (const auto& [lane, pos] : snapshot) bodies.push_back(rigid_body(pos, lane, p));
    for (std::size_t i = 0; i < bodies.size(); ++i)
        for (std::size_t j = i + 1; j < bodies.size(); ++j)
            if (bodies[i].intersects(bodies[j]))
                out.push_back({i, j, bodies[i].penetration(bodies[j])});
    return out;
}

// Delay per Definition 2: transit time minus the free-flow transit time.
inline double compute_delay(double t_enter, double t_exit, const VehicleParams& p) {
    return (t_exit - t_enter) - p.free_flow_time();
}

// Time-gridded trajectory: positions/velocities at nodes t0 + i*dt,
// accelerations constant per step. Velocity is interpolated linearly
// between nodes and position is its exact integral (quadratic within a
// step). Queries past the final node extrapolate at the terminal
// velocity; vehicles exit the system at v_m.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(double t0, double dt, std::vector<double> pos, std::vector<double> vel)
        : t0_(t0), dt_(dt), pos_(std::move(pos)), vel_(std::move(vel)) {
        if (pos_.size() != vel_.size() || pos_.size() < 2)
            throw std::invalid_argument("Trajectory: need >= 2 nodes, equal sizes");
        if (!(dt_ > 0.0)) throw std::invalid_argument("Trajectory: dt must be > 0");
        acc_.resize(pos_.size() - 1);
        for (std::size_t i = 0; i + 1 < vel_.size(); ++i)
            acc_[i] = (vel_[i + 1] - vel_[i]) / dt_;
    }

    double start_time() const { return t0_; }
    double dt() const { return dt_; }
    double end_time() const { return t0_ + dt_ * static_cast<double>(pos_.size() - 1); }
    std::size_t nodes() const { return pos_.size(); }
    const std::vector<double>& positions() const { return pos_; }
    const std::vector<double>& velocities() const { return vel_; }
    const std::vector<double>& accelerations() const { return acc_; }

    State eval(double t) const {
        if (t < t0_ - 1e-12)
            throw std::domain_error("Trajectory::eval: query before start time");
        const double tail = end_time();
        if (t >= tail) {
            double v = vel_.back();
            return State{pos_.back() + v * (t - tail), v};
        }
        double s = (t - t0_) / dt_;
        auto i = static_cast<std::size_t>(s);
        if (i + 1 >= pos_.size()) i = pos_.size() - 2;
        double local = t - (t0_ + dt_ * static_cast<double>(i));
        double a = acc_[i];
        return State{pos_[i] + vel_[i] * local + 0.5 * a * local * local,
                     vel_[i] + a * local};
    }

    double position_at(double t) const { return eval(t).position; }

    // Dynamic-consistency / bound residual check. Returns an empty string
    // when the trajectory is consistent.
    std::string check_consistency(const VehicleParams& p, double eps_dyn = 1e-6,
                                  double eps_bound = 1e-9) const {
        for (std::size_t i = 0; i + 1 < pos_.size(); ++i) {
            double xpred = pos_[i] + 0.5 * (vel_[i] + vel_[i + 1]) * dt_;
            if (std::abs(pos_[i + 1] - xpred) > eps_dyn)
                return "position residual at node " + std::to_string(i);
            double vpred = vel_[i] + acc_[i] * dt_;
            if (std::abs(vel_[i + 1] - vpred) > eps_dyn)
                return "velocity residual at node " + std::to_string(i);
            if (std::abs(acc_[i]) > p.a_max + eps_bound)
                return "acceleration bound at node " + std::to_string(i);
        }
        for (std::size_t i = 0; i < vel_.size(); ++i) {
            if (vel_[i] < -eps_bound || vel_[i] > p.v_max + eps_bound)
                return "velocity bound at node " + std::to_string(i);
        }
        for (std::size_t i = 0; i + 1 < pos_.size(); ++i) {
            if (pos_[i + 1] < pos_[i] - 1e-9)
                return "position decrease at node " + std::to_string(i);
        }
        return {};
    }

private:
    double t0_ = 0.0;
    double dt_ = 1.0;
    std::vector<double> pos_, vel_, acc_;
};

} // namespace intersim
