#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "intersim/chain_lp.hpp"
#include "intersim/lp.hpp"
#include "intersim/model.hpp"

namespace intersim {

enum class GridMode {
    fixed_n,   // N steps spanning [t0, tf], dt = (tf - t0)/N
    fixed_dt,  // nodes on the global lattice k*dt; terminal enforced at the
               // first node >= tf as x = v_m*(g_N - tf), v = v_m
};

struct GridSpec {
    GridMode mode = GridMode::fixed_n;
    int n = 800;
    double dt = 0.0125;
};

struct MotionProblem {
    State initial;  // state at t0 (in fixed_dt mode t0 must lie on the lattice)
    double t0 = 0.0;
    double tf = 0.0;  // reach x=0 at v=v_m at tf
    const Trajectory* front = nullptr;
    VehicleParams params;
    GridSpec grid;
};

enum class MotionStatus { ok, infeasible, error };

struct MotionResult {
    MotionStatus status = MotionStatus::error;
    Trajectory trajectory;
    std::vector<unsigned char> statuses;  // warm hint for the next re-plan
    bool used_fallback = false;
    int iterations = 0;
    std::string message;
};

// Warm-start hint carried between re-plans of the same vehicle.
struct WarmHint {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<unsigned char> statuses;
};

enum class FClass { interior, boundary, outside };

// Signed excess of the F_i inequality p + v^2/(2 a_m) <= -v_m^2/(2 a_m) - (nu-1) l.
inline double f_set_excess(const State& s, int nu, const VehicleParams& p) {
    double lhs = s.position + s.velocity * s.velocity / (2.0 * p.a_max);
    double rhs = -p.v_max * p.v_max / (2.0 * p.a_max) -
                 static_cast<double>(nu - 1) * p.length;
    return lhs - rhs;
}

inline FClass in_F(const State& s, int nu, const VehicleParams& p, double eps = 1e-9) {
    double e = f_set_excess(s, nu, p);
    if (e < -eps) return FClass::interior;
    if (e > eps) return FClass::outside;
    return FClass::boundary;
}

// Maximal-braking position from (start.position, start.velocity) after
// elapsed time tau: decelerate at a_m to a stop, then hold.
inline double braking_position(const State& start, double tau, const VehicleParams& p) {
    if (tau <= 0.0) return start.position;
    double t_stop = start.velocity / p.a_max;
    if (tau >= t_stop)
        return start.position + start.velocity * start.velocity / (2.0 * p.a_max);
    return start.position + start.velocity * tau - 0.5 * p.a_max * tau * tau;
}

// Overcrowding / diversion test: true iff the maximal-braking trajectory
// from (-L, v_m) at t_arrival stays behind the front vehicle by at least l.
// Maximal braking pointwise-minimizes position, so this is equivalent to
// the existential "some input avoids the collision" condition. Front
// positions are non-decreasing, so once the brake trajectory has stopped
// the clearance can only grow; it suffices to scan until the stop.
inline bool entry_feasible(const Trajectory* front, double t_arrival,
                           const VehicleParams& p, double guard = 1e-9) {
    if (front == nullptr) return true;
    const State start{-p.region_length, p.v_max};
    const double t_stop = t_arrival + p.v_max / p.a_max;

    auto clearance = [&](double t) {
        return front->eval(t).position - p.length -
               braking_position(start, t - t_arrival, p);
    };

    // Candidate minimizers: interval ends, front grid nodes, the brake
    // breakpoint, and interior parabola vertices of the clearance.
    double t_end = std::max(t_stop, std::min(front->end_time(), t_stop));
    std::vector<double> knots;
    knots.push_back(t_arrival);
    knots.push_back(t_stop);
    double g0 = front->start_time();
    double dt = front->dt();
    auto first = static_cast<long>(std::ceil((t_arrival - g0) / dt));
    auto last = static_cast<long>(std::floor((t_end - g0) / dt));
    for (long k = std::max(first, 0L); k <= last; ++k) knots.push_back(g0 + dt * static_cast<double>(k));
    knots.push_back(t_end);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double a = std::max(knots[i], t_arrival);
        double b = std::min(knots[i + 1], t_end);
        if (b <= a) continue;
        if (clearance(a) < -guard || clearance(b) < -guard) return false;
        // Interior vertex of the quadratic clearance on (a, b).
        double mid = 0.5 * (a + b);
        double ca = clearance(a), cb = clearance(b), cm = clearance(mid);
        double curv = 2.0 * (ca + cb - 2.0 * cm);  // * (h/2)^2 scale-free form
        if (curv > 0.0) {
            // clearance(t) on [a,b] as q(s) with s in [-1,1]
            double slope = 0.5 * (cb - ca);
            double s_star = -slope / curv;
            if (s_star > -1.0 && s_star < 1.0) {
                double t_star = mid + s_star * 0.5 * (b - a);
                if (clearance(t_star) < -guard) return false;
            }
        }
    }
    return clearance(t_end) >= -guard;
}

// Grid-exact variant used by the coordinator in fixed_dt mode: rolls the
// discrete maximal-braking recursion over the lattice nodes the LP will
// constrain. Discrete max braking node-wise minimizes position among all
// discrete controls, so acceptance here certifies LP feasibility.
inline bool entry_feasible_grid(const Trajectory* front, double t_arrival,
                                const VehicleParams& p, double dt) {
    if (front == nullptr) return true;
    auto k0 = static_cast<long>(std::floor((t_arrival + 1e-9) / dt));
    double g0 = static_cast<double>(k0) * dt;
    double x = -p.region_length - p.v_max * (t_arrival - g0);
    double v = p.v_max;
    double t = g0;
    const double t_cap_end = front->end_time();
    for (;;) {
        if (t <= t_cap_end + 1e-12) {
            if (x > front->eval(t).position - p.length + 1e-9) return false;
        } else {
            break;
        }
        if (v <= 0.0 && t >= t_arrival) break;
        double v_next = std::max(0.0, v - p.a_max * dt);
        x += 0.5 * (v + v_next) * dt;
        v = v_next;
        t += dt;
    }
    return true;
}

namespace motion_detail {

inline ChainProblem build_chain(const MotionProblem& p, double& grid_t0, double& grid_dt,
                                std::size_t& nn, double& terminal_x) {
    const auto& vp = p.params;
    if (!(p.tf > p.t0))
        throw std::invalid_argument("motion_synthesize: tf must exceed t0");

    if (p.grid.mode == GridMode::fixed_n) {
        nn = static_cast<std::size_t>(p.grid.n) + 1;
        grid_t0 = p.t0;
        grid_dt = (p.tf - p.t0) / static_cast<double>(p.grid.n);
        terminal_x = 0.0;
    } else {
        grid_dt = p.grid.dt;
        double k0 = std::round(p.t0 / grid_dt);
        if (std::abs(p.t0 - k0 * grid_dt) > 1e-7)
            throw std::invalid_argument("motion_synthesize: fixed_dt t0 must be lattice-aligned");
        grid_t0 = k0 * grid_dt;
        auto steps = static_cast<long>(std::ceil((p.tf - grid_t0) / grid_dt - 1e-9));
        steps = std::max(steps, 2L);
        nn = static_cast<std::size_t>(steps) + 1;
        double g_end = grid_t0 + grid_dt * static_cast<double>(steps);
        terminal_x = vp.v_max * (g_end - p.tf);
    }

    ChainProblem c;
    c.dt = grid_dt;
    c.x_lo.assign(nn, 0.0);
    c.x_hi.assign(nn, kInf);
    c.v_lo.assign(nn, 0.0);
    c.v_hi.assign(nn, vp.v_max);
    c.u_lo.assign(nn - 1, -vp.a_max);
    c.u_hi.assign(nn - 1, vp.a_max);

    double x0 = p.initial.position;
    double v0 = std::clamp(p.initial.velocity, 0.0, vp.v_max);
    for (std::size_t i = 0; i < nn; ++i) c.x_lo[i] = x0;

    if (p.front != nullptr) {
        const double cap_end = p.front->end_time();
        for (std::size_t i = 0; i < nn; ++i) {
            double t = grid_t0 + grid_dt * static_cast<double>(i);
            if (t <= cap_end + 1e-12)
                c.x_hi[i] = p.front->eval(t).position - vp.length;
        }
    }

    // Pinned boundary nodes. Caps within 1e-6 of the pinned value are
    // snapped to it: the vehicle is entitled to its own current position,
    // and platoon terminal ties differ only by floating-point noise in the
    // schedule arithmetic. A cap genuinely below the pin stays and renders
    // the problem infeasible.
    auto pin_x = [&](std::size_t i, double value) {
        double cap = c.x_hi[i];
        if (cap < value && cap > value - 1e-6) cap = value;
        c.x_lo[i] = value;
        c.x_hi[i] = std::min(cap, value);
    };
    pin_x(0, x0);
    pin_x(nn - 1, terminal_x);
    c.v_lo[0] = c.v_hi[0] = v0;
    c.v_lo[nn - 1] = c.v_hi[nn - 1] = vp.v_max;
    return c;
}

inline std::vector<unsigned char> map_warm(const WarmHint& w, double t0, double dt,
                                           std::size_t nn) {
    std::vector<unsigned char> out(3 * nn - 1, ChainSimplex::kAtLo);
    if (w.statuses.empty() || !(w.dt > 0.0)) return out;
    const auto old_nn = static_cast<long>((w.statuses.size() + 1) / 3);
    if (old_nn < 2) return out;
    for (std::size_t i = 0; i < nn; ++i) {
        double t = t0 + dt * static_cast<double>(i);
        long j = std::clamp(std::lround((t - w.t0) / w.dt), 0L, old_nn - 1);
        long ju = std::min(j, old_nn - 2);
        out[3 * i] = w.statuses[static_cast<std::size_t>(3 * j)];
        out[3 * i + 1] = w.statuses[static_cast<std::size_t>(3 * j + 1)];
        if (3 * i + 2 < out.size())
            out[3 * i + 2] = w.statuses[static_cast<std::size_t>(3 * ju + 2)];
    }
    return out;
}

inline LinearProgram to_dense(const ChainProblem& c) {
    const std::size_t nn = c.nodes();
    const std::size_t ncols = 3 * nn - 1;
    const std::size_t m = 2 * (nn - 1);
    LinearProgram lp;
    lp.objective.assign(ncols, 0.0);
    lp.lo.assign(ncols, 0.0);
    lp.hi.assign(ncols, 0.0);
    for (std::size_t i = 0; i < nn; ++i) {
        lp.objective[3 * i] = 1.0;
        lp.lo[3 * i] = c.x_lo[i];
        lp.hi[3 * i] = c.x_hi[i];
        lp.lo[3 * i + 1] = c.v_lo[i];
        lp.hi[3 * i + 1] = c.v_hi[i];
        if (i + 1 < nn) {
            lp.lo[3 * i + 2] = c.u_lo[i];
            lp.hi[3 * i + 2] = c.u_hi[i];
        }
    }
    lp.a_eq.assign(m, std::vector<double>(ncols, 0.0));
    lp.b_eq.assign(m, 0.0);
    for (std::size_t i = 0; i + 1 < nn; ++i) {
        auto& rx = lp.a_eq[2 * i];
        rx[3 * (i + 1)] = 1.0;
        rx[3 * i] = -1.0;
        rx[3 * i + 1] = -0.5 * c.dt;
        rx[3 * (i + 1) + 1] = -0.5 * c.dt;
        auto& rv = lp.a_eq[2 * i + 1];
        rv[3 * (i + 1) + 1] = 1.0;
        rv[3 * i + 1] = -1.0;
        rv[3 * i + 2] = -c.dt;
    }
    return lp;
}

inline bool validate_solution(const ChainProblem& c, const std::vector<double>& x,
                              const std::vector<double>& v) {
    const std::size_t nn = c.nodes();
    for (std::size_t i = 0; i < nn; ++i) {
        if (x[i] > c.x_hi[i] + 1e-6 || x[i] < c.x_lo[i] - 1e-6) return false;
        if (v[i] > c.v_hi[i] + 1e-7 || v[i] < c.v_lo[i] - 1e-7) return false;
    }
    for (std::size_t i = 0; i + 1 < nn; ++i) {
        double resid = x[i + 1] - x[i] - 0.5 * (v[i] + v[i + 1]) * c.dt;
        if (std::abs(resid) > 1e-6) return false;
    }
    return true;
}

} // namespace motion_detail

// MotionSynthesize: discretize the trajectory program on the requested
// grid and solve the resulting LP. The structured solver is tried first;
// on any failure the instance is re-solved by the dense Bland simplex
// (small grids only; larger failures surface as errors).
inline MotionResult motion_synthesize(const MotionProblem& p,
                                      const WarmHint* warm = nullptr,
                                      ChainSimplex* solver = nullptr) {
    MotionResult res;
    double grid_t0 = 0.0, grid_dt = 0.0, terminal_x = 0.0;
    std::size_t nn = 0;
    ChainProblem chain = motion_detail::build_chain(p, grid_t0, grid_dt, nn, terminal_x);

    ChainSimplex local;
    ChainSimplex& cs = solver ? *solver : local;

    std::vector<unsigned char> warm_statuses;
    const std::vector<unsigned char>* warm_ptr = nullptr;
    if (warm != nullptr) {
        warm_statuses = motion_detail::map_warm(*warm, grid_t0, grid_dt, nn);
        warm_ptr = &warm_statuses;
    }

    ChainSolution sol = cs.solve(chain, warm_ptr);
    if (sol.status == ChainStatus::optimal &&
        !motion_detail::validate_solution(chain, sol.x, sol.v))
        sol.status = ChainStatus::stalled;
    if (sol.status == ChainStatus::stalled && warm_ptr != nullptr) {
        sol = cs.solve(chain, nullptr);  // retry cold
        if (sol.status == ChainStatus::optimal &&
            !motion_detail::validate_solution(chain, sol.x, sol.v))
            sol.status = ChainStatus::stalled;
    }

    if (sol.status == ChainStatus::infeasible) {
        res.status = MotionStatus::infeasible;
        res.message = "motion program infeasible";
        return res;
    }
    if (sol.status != ChainStatus::optimal) {
        // Dense fallback for small instances.
        if (2 * (nn - 1) <= 700) {
            LpSolution dense = lp_solve(motion_detail::to_dense(chain));
            res.used_fallback = true;
            if (dense.status == LpStatus::infeasible) {
                res.status = MotionStatus::infeasible;
                res.message = "motion program infeasible (dense)";
                return res;
            }
            if (dense.status != LpStatus::optimal) {
                res.status = MotionStatus::error;
                res.message = "dense fallback failed";
                return res;
            }
            sol.x.resize(nn);
            sol.v.resize(nn);
            for (std::size_t i = 0; i < nn; ++i) {
                sol.x[i] = dense.x[3 * i];
                sol.v[i] = dense.x[3 * i + 1];
            }
            sol.statuses.clear();
            sol.iterations = dense.iterations;
        } else {
            res.status = MotionStatus::error;
            res.message = "structured solver failed on large instance";
            return res;
        }
    }

    res.status = MotionStatus::ok;
    res.trajectory = Trajectory(grid_t0, grid_dt, sol.x, sol.v);
    res.statuses = std::move(sol.statuses);
    res.iterations = sol.iterations;
    return res;
}

} // namespace intersim
