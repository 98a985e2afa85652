#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace intersim {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense LP: maximize c.x subject to A_eq x = b_eq, A_le x <= b_le,
// lo <= x <= hi (+-inf allowed).
struct LinearProgram {
    std::vector<double> objective;
    std::vector<std::vector<double>> a_eq;
    std::vector<double> b_eq;
    std::vector<std::vector<double>> a_le;
    std::vector<double> b_le;
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t num_vars() const { return objective.size(); }

    void validate() const {
        const std::size_t n = num_vars();
        if (lo.size() != n || hi.size() != n)
            throw std::invalid_argument("LinearProgram: bounds size mismatch");
        if (a_eq.size() != b_eq.size() || a_le.size() != b_le.size())
            throw std::invalid_argument("LinearProgram: rhs size mismatch");
        for (const auto& row : a_eq)
            if (row.size() != n) throw std::invalid_argument("LinearProgram: A_eq row size mismatch");
        for (const auto& row : a_le)
            if (row.size() != n) throw std::invalid_argument("LinearProgram: A_le row size mismatch");
        for (std::size_t j = 0; j < n; ++j)
            if (lo[j] > hi[j]) throw std::invalid_argument("LinearProgram: lo > hi");
    }
};

enum class LpStatus { optimal, infeasible, unbounded, stalled };

struct LpSolution {
    LpStatus status = LpStatus::stalled;
    std::vector<double> x;
    double objective_value = 0.0;
    int iterations = 0;
};

namespace lp_detail {

enum class VarStatus : unsigned char { basic, at_lo, at_hi, free_zero };

} // namespace lp_detail

// Two-phase primal simplex with bounded variables and Bland's pivoting
// rule (deterministic, cycle-free). Slacks are appended per row; phase 1
// uses one artificial per row. Intended for small/medium dense problems
// and as the reference oracle for the structured solver.
inline LpSolution lp_solve(const LinearProgram& prob) {
    using lp_detail::VarStatus;
    prob.validate();

    const std::size_t n_struct = prob.num_vars();
    const std::size_t m_eq = prob.a_eq.size();
    const std::size_t m = m_eq + prob.a_le.size();

    // Column layout: [structural | slack per row | artificial per row].
    const std::size_t n_slack = m;
    const std::size_t ncols = n_struct + n_slack + m;
    const std::size_t art0 = n_struct + n_slack;

    std::vector<std::vector<double>> w(m, std::vector<double>(ncols, 0.0));
    std::vector<double> rhs(m, 0.0);
    std::vector<double> lo(ncols), hi(ncols);

    for (std::size_t j = 0; j < n_struct; ++j) {
        lo[j] = prob.lo[j];
        hi[j] = prob.hi[j];
    }
    for (std::size_t r = 0; r < m; ++r) {
        const bool is_eq = r < m_eq;
        const auto& row = is_eq ? prob.a_eq[r] : prob.a_le[r - m_eq];
        for (std::size_t j = 0; j < n_struct; ++j) w[r][j] = row[j];
        w[r][n_struct + r] = 1.0;
        lo[n_struct + r] = 0.0;
        hi[n_struct + r] = is_eq ? 0.0 : kInf;
        rhs[r] = is_eq ? prob.b_eq[r] : prob.b_le[r - m_eq];
    }

    std::vector<VarStatus> status(ncols, VarStatus::at_lo);
    std::vector<double> val(ncols, 0.0);
    auto nonbasic_value = [&](std::size_t j) -> double {
        switch (status[j]) {
            case VarStatus::at_lo: return lo[j];
            case VarStatus::at_hi: return hi[j];
            default: return 0.0;
        }
    };

    // Nonbasic start: finite bound nearest zero, or free at zero.
    for (std::size_t j = 0; j < art0; ++j) {
        if (std::isfinite(lo[j]) && std::isfinite(hi[j]))
            status[j] = std::abs(lo[j]) <= std::abs(hi[j]) ? VarStatus::at_lo : VarStatus::at_hi;
        else if (std::isfinite(lo[j]))
            status[j] = VarStatus::at_lo;
        else if (std::isfinite(hi[j]))
            status[j] = VarStatus::at_hi;
        else
            status[j] = VarStatus::free_zero;
        val[j] = nonbasic_value(j);
    }

    // Artificial basis with signs chosen so the start is feasible.
    std::vector<std::size_t> basis(m);
    std::vector<double> beta(m);
    for (std::size_t r = 0; r < m; ++r) {
        double resid = rhs[r];
        for (std::size_t j = 0; j < art0; ++j)
            if (status[j] != VarStatus::basic && val[j] != 0.0) resid -= w[r][j] * val[j];
        double sign = resid >= 0.0 ? 1.0 : -1.0;
        const std::size_t aj = art0 + r;
        w[r][aj] = sign;
        lo[aj] = 0.0;
        hi[aj] = kInf;
        if (sign < 0.0) {
            for (auto& entry : w[r]) entry = -entry;
            rhs[r] = -rhs[r];
            resid = -resid;
        }
        basis[r] = aj;
        status[aj] = VarStatus::basic;
        beta[r] = resid;
    }

    const double tol = 1e-9;
    const int iter_cap = 50 * static_cast<int>(m + ncols);
    int iterations = 0;

    std::vector<double> cost(ncols, 0.0);

    auto reduced_cost = [&](std::size_t j) -> double {
        double z = cost[j];
        for (std::size_t r = 0; r < m; ++r) {
            double cb = cost[basis[r]];
            if (cb != 0.0) z -= cb * w[r][j];
        }
        return z;
    };

    // Returns: 0 optimal, 1 unbounded, 2 iteration cap.
    auto run_simplex = [&](bool allow_artificial_entering) -> int {
        for (;;) {
            if (++iterations > iter_cap) return 2;

            std::size_t enter = ncols;
            int dir = 0;
            for (std::size_t j = 0; j < ncols; ++j) {  // Bland: smallest index
                if (status[j] == VarStatus::basic) continue;
                if (lo[j] == hi[j]) continue;  // fixed
                if (!allow_artificial_entering && j >= art0) continue;
                double z = reduced_cost(j);
                if ((status[j] == VarStatus::at_lo || status[j] == VarStatus::free_zero) && z > tol) {
                    enter = j; dir = 1; break;
                }
                if ((status[j] == VarStatus::at_hi || status[j] == VarStatus::free_zero) && z < -tol) {
                    enter = j; dir = -1; break;
                }
            }
            if (enter == ncols) return 0;

            // Ratio test: own-bound flip vs basic-variable limits.
            double t_max = kInf;
            if (dir > 0 && std::isfinite(hi[enter]) && status[enter] != VarStatus::free_zero)
                t_max = hi[enter] - lo[enter];
            else if (dir < 0 && std::isfinite(lo[enter]) && status[enter] != VarStatus::free_zero)
                t_max = hi[enter] - lo[enter];

            double t_best = t_max;
            std::size_t leave_row = m;  // m == bound flip
            int leave_to = 0;           // -1 -> leaves at lo, +1 -> leaves at hi
            for (std::size_t r = 0; r < m; ++r) {
                double delta = -static_cast<double>(dir) * w[r][enter];
                if (delta > tol) {
                    if (std::isfinite(hi[basis[r]])) {
                        double lim = (hi[basis[r]] - beta[r]) / delta;
                        if (lim < t_best - 1e-12 ||
                            (lim < t_best + 1e-12 && leave_row < m && basis[r] < basis[leave_row])) {
                            t_best = std::max(lim, 0.0);
                            leave_row = r;
                            leave_to = 1;
                        }
                    }
                } else if (delta < -tol) {
                    if (std::isfinite(lo[basis[r]])) {
                        double lim = (lo[basis[r]] - beta[r]) / delta;
                        if (lim < t_best - 1e-12 ||
                            (lim < t_best + 1e-12 && leave_row < m && basis[r] < basis[leave_row])) {
                            t_best = std::max(lim, 0.0);
                            leave_row = r;
                            leave_to = -1;
                        }
                    }
                }
            }

            if (!std::isfinite(t_best)) return 1;

            double start = status[enter] == VarStatus::free_zero ? 0.0 : nonbasic_value(enter);
            double new_val = start + dir * t_best;

            for (std::size_t r = 0; r < m; ++r)
                beta[r] -= static_cast<double>(dir) * t_best * w[r][enter];

            if (leave_row == m) {
                status[enter] = dir > 0 ? VarStatus::at_hi : VarStatus::at_lo;
                val[enter] = nonbasic_value(enter);
                continue;
            }

            const std::size_t leave = basis[leave_row];
            double piv = w[leave_row][enter];
            // Gauss-Jordan on the entering column.
            auto& prow = w[leave_row];
            double inv = 1.0 / piv;
            for (auto& entry : prow) entry *= inv;
            for (std::size_t r = 0; r < m; ++r) {
                if (r == leave_row) continue;
                double f = w[r][enter];
                if (f == 0.0) continue;
                auto& row = w[r];
                for (std::size_t j2 = 0; j2 < ncols; ++j2) row[j2] -= f * prow[j2];
            }
            basis[leave_row] = enter;
            status[enter] = VarStatus::basic;
            beta[leave_row] = new_val;
            status[leave] = leave_to > 0 ? VarStatus::at_hi : VarStatus::at_lo;
            val[leave] = nonbasic_value(leave);
        }
    };

    // Phase 1: drive artificials to zero.
    for (std::size_t r = 0; r < m; ++r) cost[art0 + r] = -1.0;
    int rc = run_simplex(true);
    if (rc == 2) return LpSolution{LpStatus::stalled, {}, 0.0, iterations};

    double infeas = 0.0;
    for (std::size_t r = 0; r < m; ++r)
        if (basis[r] >= art0) infeas += std::abs(beta[r]);
    for (std::size_t j = art0; j < ncols; ++j)
        if (status[j] != VarStatus::basic && nonbasic_value(j) != 0.0) infeas += nonbasic_value(j);
    if (infeas > 1e-7)
        return LpSolution{LpStatus::infeasible, {}, 0.0, iterations};

    // Phase 2: real objective; artificials pinned at zero.
    std::fill(cost.begin(), cost.end(), 0.0);
    for (std::size_t j = 0; j < n_struct; ++j) cost[j] = prob.objective[j];
    for (std::size_t j = art0; j < ncols; ++j) {
        hi[j] = 0.0;
        if (status[j] == VarStatus::at_hi) status[j] = VarStatus::at_lo;
    }
    rc = run_simplex(false);
    if (rc == 2) return LpSolution{LpStatus::stalled, {}, 0.0, iterations};
    if (rc == 1) return LpSolution{LpStatus::unbounded, {}, 0.0, iterations};

    LpSolution sol;
    sol.status = LpStatus::optimal;
    sol.iterations = iterations;
    sol.x.assign(n_struct, 0.0);
    for (std::size_t j = 0; j < n_struct; ++j)
        if (status[j] != VarStatus::basic) sol.x[j] = nonbasic_value(j);
    for (std::size_t r = 0; r < m; ++r)
        if (basis[r] < n_struct) sol.x[basis[r]] = beta[r];
    sol.objective_value = 0.0;
    for (std::size_t j = 0; j < n_struct; ++j)
        sol.objective_value += prob.objective[j] * sol.x[j];
    return sol;
}

} // namespace intersim
