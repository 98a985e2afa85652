#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace intersim {

// Discretized double-integrator program over nodes 0..nn-1:
//   maximize sum_i x_i
//   x_{i+1} = x_i + (v_i + v_{i+1}) dt/2
//   v_{i+1} = v_i + u_i dt
//   x_lo <= x <= x_hi (front-safety caps folded into x_hi),
//   v_lo <= v <= v_hi, u_lo <= u <= u_hi
// Boundary states are pinned by equal lo/hi bounds.
//
// Solved with a bounded-variable revised simplex. Under a time ordering
// the basis matrix is banded, so the basis factorization is a banded LU
// with partial pivoting plus product-form eta updates between
// refactorizations. Matches lp_solve on the same instance up to solver
// tolerance; that equivalence is tested, not assumed.
struct ChainProblem {
    double dt = 0.0;
    std::vector<double> x_lo, x_hi;  // size nn
    std::vector<double> v_lo, v_hi;  // size nn
    std::vector<double> u_lo, u_hi;  // size nn-1

    std::size_t nodes() const { return x_lo.size(); }
};

enum class ChainStatus { optimal, infeasible, stalled, singular };

struct ChainSolution {
    ChainStatus status = ChainStatus::stalled;
    std::vector<double> x, v, u;
    double objective = 0.0;
    int iterations = 0;
    std::vector<unsigned char> statuses;  // per-column, reusable as a warm hint
};

class ChainSimplex {
public:
    static constexpr unsigned char kBasic = 0;
    static constexpr unsigned char kAtLo = 1;
    static constexpr unsigned char kAtHi = 2;

    ChainSolution solve(const ChainProblem& p, const std::vector<unsigned char>* warm = nullptr) {
        setup(p);
        ChainSolution sol;
        if (!bounds_sane_) {
            sol.status = ChainStatus::infeasible;
            return sol;
        }

        if (!init_statuses(warm) || !build_basis() || !refactorize()) {
            // Warm hint produced a singular or ill-formed basis: cold restart.
            if (!init_statuses(nullptr) || !build_basis() || !refactorize()) {
                sol.status = ChainStatus::singular;
                return sol;
            }
        }
        compute_beta();

        const int iter_cap = 50 * static_cast<int>(m_ + ncols_);
        int iters = 0;
        bool bland = false;
        int degen_streak = 0;
        bool phase1 = true;
        int restarts = 0;

        for (;;) {
            if (++iters > iter_cap) {
                sol.status = ChainStatus::stalled;
                sol.iterations = iters;
                return sol;
            }

            if (phase1 && total_infeasibility() <= 1e-8) phase1 = false;

            price(phase1);
            std::size_t enter = ncols_;
            int dir = 0;
            select_entering(phase1, bland, enter, dir);
            if (enter == ncols_) {
                if (phase1) {
                    sol.status = ChainStatus::infeasible;
                    sol.iterations = iters;
                    return sol;
                }
                // Candidate optimum; refresh the factorization and confirm
                // feasibility was not lost to eta-update drift.
                if (!refactorize()) {
                    sol.status = ChainStatus::singular;
                    sol.iterations = iters;
                    return sol;
                }
                compute_beta();
                if (total_infeasibility() > 1e-7 && restarts < 2) {
                    ++restarts;
                    phase1 = true;
                    continue;
                }
                break;  // optimal
            }

            column_into(enter, work_);
            ftran(work_);

            double t_best;
            std::size_t leave_pos;
            int leave_to;
            if (!ratio_test(phase1, bland, enter, dir, t_best, leave_pos, leave_to)) {
                // No blocking bound. Cannot legitimately happen on these
                // instances (objective bounded); surface as stalled.
                sol.status = ChainStatus::stalled;
                sol.iterations = iters;
                return sol;
            }

            if (t_best <= 1e-12) {
                if (++degen_streak > 40) bland = true;
            } else {
                degen_streak = 0;
                bland = false;
            }

            apply_step(enter, dir, t_best, leave_pos, leave_to);

            if (eta_r_.size() >= 48) {
                if (!refactorize()) {
                    sol.status = ChainStatus::singular;
                    sol.iterations = iters;
                    return sol;
                }
                compute_beta();
            }
        }

        sol.status = ChainStatus::optimal;
        sol.iterations = iters;
        extract(sol);
        return sol;
    }

private:
    // --- problem data -------------------------------------------------
    std::size_t nn_ = 0, m_ = 0, ncols_ = 0;
    double dt_ = 0.0;
    std::vector<double> blo_, bhi_;  // per column
    bool bounds_sane_ = true;

    std::vector<unsigned char> status_;
    std::vector<std::size_t> basis_;     // position -> column
    std::vector<std::int32_t> pos_of_;   // column -> position or -1
    std::vector<double> beta_;           // basic values by position

    // banded LU of the reference basis
    int kl_ = 0, ku_ = 0;
    std::vector<double> ab_;
    std::vector<std::int32_t> ipiv_;

    // product-form etas
    std::vector<std::size_t> eta_r_;
    std::vector<std::vector<double>> eta_w_;

    std::vector<double> work_, y_, d_;
    std::vector<double> zcost_;  // reduced costs scratch

    static bool finite(double v) { return std::isfinite(v); }

    std::size_t col_x(std::size_t i) const { return 3 * i; }
    std::size_t col_v(std::size_t i) const { return 3 * i + 1; }
    std::size_t col_u(std::size_t i) const { return 3 * i + 2; }

    void setup(const ChainProblem& p) {
        nn_ = p.nodes();
        m_ = 2 * (nn_ - 1);
        ncols_ = 3 * nn_ - 1;
        dt_ = p.dt;
        blo_.assign(ncols_, 0.0);
        bhi_.assign(ncols_, 0.0);
        bounds_sane_ = true;
        for (std::size_t i = 0; i < nn_; ++i) {
            blo_[col_x(i)] = p.x_lo[i];
            bhi_[col_x(i)] = p.x_hi[i];
            blo_[col_v(i)] = p.v_lo[i];
            bhi_[col_v(i)] = p.v_hi[i];
            if (p.x_lo[i] > p.x_hi[i] + 1e-12 || p.v_lo[i] > p.v_hi[i] + 1e-12)
                bounds_sane_ = false;
            if (i + 1 < nn_) {
                blo_[col_u(i)] = p.u_lo[i];
                bhi_[col_u(i)] = p.u_hi[i];
                if (p.u_lo[i] > p.u_hi[i] + 1e-12) bounds_sane_ = false;
            }
        }
        work_.assign(m_, 0.0);
        y_.assign(m_, 0.0);
        d_.assign(m_, 0.0);
        zcost_.assign(ncols_, 0.0);
        eta_r_.clear();
        eta_w_.clear();
    }

    // Sparse column entries: at most 4 (row, coef) pairs.
    int column_entries(std::size_t col, std::size_t* rows, double* coefs) const {
        std::size_t i = col / 3;
        int k = static_cast<int>(col % 3);
        int n = 0;
        if (k == 0) {  // x_i
            if (i + 1 < nn_) { rows[n] = 2 * i; coefs[n++] = -1.0; }
            if (i >= 1) { rows[n] = 2 * (i - 1); coefs[n++] = 1.0; }
        } else if (k == 1) {  // v_i
            if (i + 1 < nn_) {
                rows[n] = 2 * i; coefs[n++] = -0.5 * dt_;
                rows[n] = 2 * i + 1; coefs[n++] = -1.0;
            }
            if (i >= 1) {
                rows[n] = 2 * (i - 1); coefs[n++] = -0.5 * dt_;
                rows[n] = 2 * (i - 1) + 1; coefs[n++] = 1.0;
            }
        } else {  // u_i
            rows[n] = 2 * i + 1; coefs[n++] = -dt_;
        }
        return n;
    }

    void column_into(std::size_t col, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        std::size_t rows[4];
        double coefs[4];
        int n = column_entries(col, rows, coefs);
        for (int e = 0; e < n; ++e) out[rows[e]] = coefs[e];
    }

    double nonbasic_value(std::size_t col) const {
        return status_[col] == kAtHi ? bhi_[col] : blo_[col];
    }

    bool is_fixed(std::size_t col) const { return blo_[col] == bhi_[col]; }

    bool init_statuses(const std::vector<unsigned char>* warm) {
        status_.assign(ncols_, kAtLo);
        if (warm && warm->size() == ncols_) {
            status_ = *warm;
            for (std::size_t j = 0; j < ncols_; ++j) {
                if (status_[j] == kAtHi && !finite(bhi_[j])) status_[j] = kAtLo;
                if (status_[j] == kAtLo && !finite(blo_[j])) status_[j] = kAtHi;
                if (is_fixed(j) && status_[j] == kBasic) status_[j] = kAtLo;
            }
            repair_basic_count();
            return true;
        }
        // Canonical crash: interior x_i, v_i basic plus u_0, u_{N-1};
        // nonsingular by the velocity/position telescope.
        for (std::size_t i = 1; i + 1 < nn_; ++i) {
            status_[col_x(i)] = kBasic;
            status_[col_v(i)] = kBasic;
        }
        status_[col_u(0)] = kBasic;
        status_[col_u(nn_ - 2)] = kBasic;
        for (std::size_t j = 0; j < ncols_; ++j) {
            if (status_[j] != kBasic && !finite(blo_[j])) status_[j] = kAtHi;
        }
        return count_basic() == m_;
    }

    std::size_t count_basic() const {
        std::size_t c = 0;
        for (auto s : status_) c += (s == kBasic);
        return c;
    }

    void repair_basic_count() {
        std::size_t c = count_basic();
        // Demote surplus basics: u columns first (descending), then v, then x.
        auto demote_kind = [&](int kind) {
            for (std::size_t jj = ncols_; jj-- > 0 && c > m_;) {
                if (static_cast<int>(jj % 3) != kind) continue;
                if (status_[jj] == kBasic) {
                    status_[jj] = finite(blo_[jj]) ? kAtLo : kAtHi;
                    --c;
                }
            }
        };
        if (c > m_) { demote_kind(2); demote_kind(1); demote_kind(0); }
        auto promote_kind = [&](int kind) {
            for (std::size_t jj = 0; jj < ncols_ && c < m_; ++jj) {
                if (static_cast<int>(jj % 3) != kind) continue;
                if (status_[jj] != kBasic && !is_fixed(jj)) {
                    status_[jj] = kBasic;
                    ++c;
                }
            }
        };
        if (c < m_) { promote_kind(2); promote_kind(1); promote_kind(0); }
    }

    bool build_basis() {
        basis_.clear();
        basis_.reserve(m_);
        for (std::size_t j = 0; j < ncols_; ++j)
            if (status_[j] == kBasic) basis_.push_back(j);
        if (basis_.size() != m_) return false;
        pos_of_.assign(ncols_, -1);
        for (std::size_t pos = 0; pos < m_; ++pos)
            pos_of_[basis_[pos]] = static_cast<std::int32_t>(pos);
        beta_.assign(m_, 0.0);
        return true;
    }

    bool refactorize() {
        // Restore time order so the factorization stays banded.
        std::sort(basis_.begin(), basis_.end());
        for (std::size_t pos = 0; pos < m_; ++pos)
            pos_of_[basis_[pos]] = static_cast<std::int32_t>(pos);
        eta_r_.clear();
        eta_w_.clear();

        kl_ = 0;
        ku_ = 0;
        std::size_t rows[4];
        double coefs[4];
        for (std::size_t pos = 0; pos < m_; ++pos) {
            int n = column_entries(basis_[pos], rows, coefs);
            for (int e = 0; e < n; ++e) {
                auto r = static_cast<std::ptrdiff_t>(rows[e]);
                auto c = static_cast<std::ptrdiff_t>(pos);
                kl_ = std::max(kl_, static_cast<int>(r - c));
                ku_ = std::max(ku_, static_cast<int>(c - r));
            }
        }
        const int width = 2 * kl_ + ku_ + 1;
        ab_.assign(static_cast<std::size_t>(width) * m_, 0.0);
        ipiv_.assign(m_, 0);

        auto at = [&](std::ptrdiff_t r, std::ptrdiff_t c) -> double& {
            return ab_[static_cast<std::size_t>(kl_ + ku_ + r - c) * m_ + static_cast<std::size_t>(c)];
        };
        for (std::size_t pos = 0; pos < m_; ++pos) {
            int n = column_entries(basis_[pos], rows, coefs);
            for (int e = 0; e < n; ++e)
                at(static_cast<std::ptrdiff_t>(rows[e]), static_cast<std::ptrdiff_t>(pos)) = coefs[e];
        }

        // Banded LU with partial pivoting (dgbtrf-style, unblocked).
        const std::ptrdiff_t mm = static_cast<std::ptrdiff_t>(m_);
        for (std::ptrdiff_t j = 0; j < mm; ++j) {
            const std::ptrdiff_t km = std::min<std::ptrdiff_t>(kl_, mm - 1 - j);
            std::ptrdiff_t ip = 0;
            double best = std::abs(at(j, j));
            for (std::ptrdiff_t i = 1; i <= km; ++i) {
                double v = std::abs(at(j + i, j));
                if (v > best) { best = v; ip = i; }
            }
            if (best < 1e-13) return false;
            ipiv_[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(j + ip);
            const std::ptrdiff_t cmax = std::min<std::ptrdiff_t>(mm - 1, j + ku_ + kl_);
            if (ip != 0)
                for (std::ptrdiff_t c = j; c <= cmax; ++c)
                    std::swap(at(j, c), at(j + ip, c));
            const double piv = at(j, j);
            for (std::ptrdiff_t i = 1; i <= km; ++i) {
                double l = at(j + i, j) / piv;
                at(j + i, j) = l;
                if (l != 0.0)
                    for (std::ptrdiff_t c = j + 1; c <= cmax; ++c)
                        at(j + i, c) -= l * at(j, c);
            }
        }
        return true;
    }

    void base_solve(std::vector<double>& b) const {
        const std::ptrdiff_t mm = static_cast<std::ptrdiff_t>(m_);
        auto at = [&](std::ptrdiff_t r, std::ptrdiff_t c) -> double {
            return ab_[static_cast<std::size_t>(kl_ + ku_ + r - c) * m_ + static_cast<std::size_t>(c)];
        };
        for (std::ptrdiff_t j = 0; j < mm; ++j) {
            std::ptrdiff_t pj = ipiv_[static_cast<std::size_t>(j)];
            if (pj != j) std::swap(b[static_cast<std::size_t>(j)], b[static_cast<std::size_t>(pj)]);
            const std::ptrdiff_t km = std::min<std::ptrdiff_t>(kl_, mm - 1 - j);
            const double bj = b[static_cast<std::size_t>(j)];
            if (bj != 0.0)
                for (std::ptrdiff_t i = 1; i <= km; ++i)
                    b[static_cast<std::size_t>(j + i)] -= at(j + i, j) * bj;
        }
        for (std::ptrdiff_t j = mm - 1; j >= 0; --j) {
            double s = b[static_cast<std::size_t>(j)];
            const std::ptrdiff_t cmax = std::min<std::ptrdiff_t>(mm - 1, j + ku_ + kl_);
            for (std::ptrdiff_t c = j + 1; c <= cmax; ++c)
                s -= at(j, c) * b[static_cast<std::size_t>(c)];
            b[static_cast<std::size_t>(j)] = s / at(j, j);
        }
    }

    void base_solve_transposed(std::vector<double>& c) const {
        const std::ptrdiff_t mm = static_cast<std::ptrdiff_t>(m_);
        auto at = [&](std::ptrdiff_t r, std::ptrdiff_t col) -> double {
            return ab_[static_cast<std::size_t>(kl_ + ku_ + r - col) * m_ + static_cast<std::size_t>(col)];
        };
        // U^T z = c (forward), then L^T w = z (backward), then reverse swaps.
        for (std::ptrdiff_t j = 0; j < mm; ++j) {
            double s = c[static_cast<std::size_t>(j)];
            const std::ptrdiff_t imin = std::max<std::ptrdiff_t>(0, j - ku_ - kl_);
            for (std::ptrdiff_t i = imin; i < j; ++i)
                s -= at(i, j) * c[static_cast<std::size_t>(i)];
            c[static_cast<std::size_t>(j)] = s / at(j, j);
        }
        for (std::ptrdiff_t j = mm - 1; j >= 0; --j) {
            double s = c[static_cast<std::size_t>(j)];
            const std::ptrdiff_t imax = std::min<std::ptrdiff_t>(mm - 1, j + kl_);
            for (std::ptrdiff_t i = j + 1; i <= imax; ++i)
                s -= at(i, j) * c[static_cast<std::size_t>(i)];
            c[static_cast<std::size_t>(j)] = s;
        }
        for (std::ptrdiff_t j = mm - 1; j >= 0; --j) {
            std::ptrdiff_t pj = ipiv_[static_cast<std::size_t>(j)];
            if (pj != j) std::swap(c[static_cast<std::size_t>(j)], c[static_cast<std::size_t>(pj)]);
        }
    }

    void ftran(std::vector<double>& z) const {
        base_solve(z);
        for (std::size_t e = 0; e < eta_r_.size(); ++e) {
            const auto r = eta_r_[e];
            const auto& w = eta_w_[e];
            double t = z[r] / w[r];
            if (t != 0.0) {
                for (std::size_t i = 0; i < m_; ++i) z[i] -= w[i] * t;
            }
            z[r] = t;
        }
    }

    void btran(std::vector<double>& c) const {
        for (std::size_t e = eta_r_.size(); e-- > 0;) {
            const auto r = eta_r_[e];
            const auto& w = eta_w_[e];
            double s = 0.0;
            for (std::size_t i = 0; i < m_; ++i) s += w[i] * c[i];
            s -= w[r] * c[r];
            c[r] = (c[r] - s) / w[r];
        }
        base_solve_transposed(c);
    }

    void compute_beta() {
        std::fill(work_.begin(), work_.end(), 0.0);
        std::size_t rows[4];
        double coefs[4];
        for (std::size_t j = 0; j < ncols_; ++j) {
            if (status_[j] == kBasic) continue;
            double val = nonbasic_value(j);
            if (val == 0.0) continue;
            int n = column_entries(j, rows, coefs);
            for (int e = 0; e < n; ++e) work_[rows[e]] -= coefs[e] * val;
        }
        ftran(work_);
        beta_ = work_;
    }

    double total_infeasibility() const {
        double s = 0.0;
        for (std::size_t pos = 0; pos < m_; ++pos) {
            std::size_t col = basis_[pos];
            if (beta_[pos] > bhi_[col]) s += beta_[pos] - bhi_[col];
            else if (beta_[pos] < blo_[col]) s += blo_[col] - beta_[pos];
        }
        return s;
    }

    void price(bool phase1) {
        if (phase1) {
            for (std::size_t pos = 0; pos < m_; ++pos) {
                std::size_t col = basis_[pos];
                if (beta_[pos] > bhi_[col] + 1e-10) d_[pos] = -1.0;
                else if (beta_[pos] < blo_[col] - 1e-10) d_[pos] = 1.0;
                else d_[pos] = 0.0;
            }
            y_ = d_;
            btran(y_);
        } else {
            for (std::size_t pos = 0; pos < m_; ++pos)
                d_[pos] = (basis_[pos] % 3 == 0) ? 1.0 : 0.0;  // objective: sum of x
            y_ = d_;
            btran(y_);
        }
        std::size_t rows[4];
        double coefs[4];
        for (std::size_t j = 0; j < ncols_; ++j) {
            if (status_[j] == kBasic || is_fixed(j)) {
                zcost_[j] = 0.0;
                continue;
            }
            double ya = 0.0;
            int n = column_entries(j, rows, coefs);
            for (int e = 0; e < n; ++e) ya += y_[rows[e]] * coefs[e];
            double cj = phase1 ? 0.0 : ((j % 3 == 0) ? 1.0 : 0.0);
            zcost_[j] = cj - ya;
        }
    }

    void select_entering(bool /*phase1*/, bool bland, std::size_t& enter, int& dir) const {
        const double tol = 1e-9;
        enter = ncols_;
        dir = 0;
        if (bland) {
            for (std::size_t j = 0; j < ncols_; ++j) {
                if (status_[j] == kBasic || is_fixed(j)) continue;
                if (status_[j] == kAtLo && zcost_[j] > tol) { enter = j; dir = 1; return; }
                if (status_[j] == kAtHi && zcost_[j] < -tol) { enter = j; dir = -1; return; }
            }
            return;
        }
        double best = tol;
        for (std::size_t j = 0; j < ncols_; ++j) {
            if (status_[j] == kBasic || is_fixed(j)) continue;
            double z = zcost_[j];
            if (status_[j] == kAtLo && z > best) { best = z; enter = j; dir = 1; }
            else if (status_[j] == kAtHi && -z > best) { best = -z; enter = j; dir = -1; }
        }
    }

    bool ratio_test(bool phase1, bool bland, std::size_t enter, int dir,
                    double& t_best, std::size_t& leave_pos, int& leave_to) const {
        const double drop = 1e-11;
        t_best = kChainInf;
        leave_pos = m_;  // m_ == bound flip
        leave_to = 0;
        if (finite(blo_[enter]) && finite(bhi_[enter]))
            t_best = bhi_[enter] - blo_[enter];

        double best_piv = 0.0;
        for (std::size_t pos = 0; pos < m_; ++pos) {
            double w = work_[pos];
            if (std::abs(w) <= drop) continue;
            double delta = -static_cast<double>(dir) * w;
            std::size_t col = basis_[pos];
            double value = beta_[pos];
            double lim = kChainInf;
            int to = 0;
            if (phase1 && value > bhi_[col] + 1e-10) {
                if (delta < 0.0) { lim = (bhi_[col] - value) / delta; to = 1; }
            } else if (phase1 && value < blo_[col] - 1e-10) {
                if (delta > 0.0) { lim = (blo_[col] - value) / delta; to = -1; }
            } else {
                if (delta > 0.0 && finite(bhi_[col])) { lim = (bhi_[col] - value) / delta; to = 1; }
                else if (delta < 0.0 && finite(blo_[col])) { lim = (blo_[col] - value) / delta; to = -1; }
            }
            if (to == 0) continue;
            lim = std::max(lim, 0.0);
            bool take = false;
            if (lim < t_best - 1e-10) {
                take = true;
            } else if (lim < t_best + 1e-10 && leave_pos < m_) {
                if (bland) take = basis_[pos] < basis_[leave_pos];
                else take = std::abs(w) > best_piv;
            }
            if (take) {
                t_best = std::min(t_best, lim);
                leave_pos = pos;
                leave_to = to;
                best_piv = std::abs(w);
            }
        }
        return std::isfinite(t_best);
    }

    void apply_step(std::size_t enter, int dir, double t, std::size_t leave_pos, int leave_to) {
        double start = nonbasic_value(enter);
        if (t != 0.0) {
            for (std::size_t pos = 0; pos < m_; ++pos)
                beta_[pos] -= static_cast<double>(dir) * t * work_[pos];
        }
        if (leave_pos == m_) {
            status_[enter] = (dir > 0) ? kAtHi : kAtLo;
            return;
        }
        std::size_t leave = basis_[leave_pos];
        eta_r_.push_back(leave_pos);
        eta_w_.push_back(work_);
        basis_[leave_pos] = enter;
        pos_of_[enter] = static_cast<std::int32_t>(leave_pos);
        pos_of_[leave] = -1;
        status_[enter] = kBasic;
        status_[leave] = (leave_to > 0) ? kAtHi : kAtLo;
        beta_[leave_pos] = start + static_cast<double>(dir) * t;
    }

    void extract(ChainSolution& sol) const {
        std::vector<double> all(ncols_);
        for (std::size_t j = 0; j < ncols_; ++j)
            if (status_[j] != kBasic) all[j] = nonbasic_value(j);
        for (std::size_t pos = 0; pos < m_; ++pos) all[basis_[pos]] = beta_[pos];
        sol.x.resize(nn_);
        sol.v.resize(nn_);
        sol.u.resize(nn_ - 1);
        sol.objective = 0.0;
        for (std::size_t i = 0; i < nn_; ++i) {
            sol.x[i] = all[col_x(i)];
            sol.v[i] = all[col_v(i)];
            sol.objective += sol.x[i];
            if (i + 1 < nn_) sol.u[i] = all[col_u(i)];
        }
        sol.statuses = status_;
    }

    static constexpr double kChainInf = std::numeric_limits<double>::infinity();
};

} // namespace intersim
