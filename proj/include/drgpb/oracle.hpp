// Brute-force oracle for the worst-case posterior: maximize sum nu(j) L(j)
// over the probability simplex intersected with a total-variation ball,
// posed as a generic linear program and solved with a self-contained
// two-phase primal simplex. Shares no code with the closed-form
// water-filling route so the two can cross-check each other.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "drgpb/errors.hpp"
#include "drgpb/linalg.hpp"

namespace drgpb {

namespace detail {

/// Dense two-phase primal simplex for min c^T x s.t. A x = b, x >= 0,
/// with b >= 0. Bland's rule (lowest-index entering and leaving variable)
/// guards against cycling on degenerate vertices.
class SimplexSolver {
public:
    SimplexSolver(Mat A, Vec b, Vec c)
        : A_(std::move(A)), b_(std::move(b)), c_(std::move(c)) {}

    Vec solve() {
        const auto m = A_.rows();
        const auto n = A_.cols();
        for (Eigen::Index i = 0; i < m; ++i)
            if (b_(i) < 0.0)
                throw NumericalError("simplex: negative right-hand side");

        // Phase 1: artificial basis, minimize the artificials' sum.
        tableau_ = Mat::Zero(m, n + m + 1);
        tableau_.leftCols(n) = A_;
        tableau_.block(0, n, m, m) = Mat::Identity(m, m);
        tableau_.col(n + m) = b_;
        basis_.resize(static_cast<size_t>(m));
        for (Eigen::Index i = 0; i < m; ++i)
            basis_[static_cast<size_t>(i)] = static_cast<int>(n + i);

        Vec phase1_cost = Vec::Zero(n + m);
        phase1_cost.tail(m).setOnes();
        run_phase(phase1_cost, n + m);
        if (objective(phase1_cost) > 1e-9)
            throw NumericalError("simplex: problem infeasible");
        evict_artificials(n);

        // Phase 2 on the original columns only.
        Vec phase2_cost = Vec::Zero(n + m);
        phase2_cost.head(n) = c_;
        run_phase(phase2_cost, n); // artificial columns barred from entering
        Vec x = Vec::Zero(n);
        for (size_t i = 0; i < basis_.size(); ++i)
            if (basis_[i] < n) x(basis_[i]) = tableau_(static_cast<Eigen::Index>(i),
                                                       tableau_.cols() - 1);
        return x;
    }

private:
    double objective(const Vec& cost) const {
        double v = 0.0;
        for (size_t i = 0; i < basis_.size(); ++i)
            v += cost(basis_[i]) *
                 tableau_(static_cast<Eigen::Index>(i), tableau_.cols() - 1);
        return v;
    }

    void run_phase(const Vec& cost, Eigen::Index enterable_cols) {
        const double tol = 1e-11;
        for (int iter = 0; iter < 10000; ++iter) {
            // Reduced costs from scratch each round: cheap at this scale and
            // immune to drift across pivots.
            int entering = -1;
            for (Eigen::Index j = 0; j < enterable_cols; ++j) {
                if (is_basic(static_cast<int>(j))) continue;
                double reduced = cost(j);
                for (size_t i = 0; i < basis_.size(); ++i)
                    reduced -= cost(basis_[i]) *
                               tableau_(static_cast<Eigen::Index>(i), j);
                if (reduced < -tol) {
                    entering = static_cast<int>(j);
                    break; // Bland: lowest index
                }
            }
            if (entering < 0) return;

            int leaving_row = -1;
            double best_ratio = 0.0;
            for (Eigen::Index i = 0; i < tableau_.rows(); ++i) {
                const double a = tableau_(i, entering);
                if (a <= tol) continue;
                const double ratio = tableau_(i, tableau_.cols() - 1) / a;
                const bool better =
                    leaving_row < 0 || ratio < best_ratio - 1e-15 ||
                    (std::abs(ratio - best_ratio) <= 1e-15 &&
                     basis_[static_cast<size_t>(i)] <
                         basis_[static_cast<size_t>(leaving_row)]);
                if (better) {
                    leaving_row = static_cast<int>(i);
                    best_ratio = ratio;
                }
            }
            if (leaving_row < 0)
                throw NumericalError("simplex: unbounded objective");
            pivot(leaving_row, entering);
        }
        throw NumericalError("simplex: iteration limit reached");
    }

    /// Pivots basic artificials out after phase 1; a row that offers no
    /// real pivot column is linearly dependent and its artificial simply
    /// stays basic at zero, barred from re-entering.
    void evict_artificials(Eigen::Index n_real) {
        for (size_t i = 0; i < basis_.size(); ++i) {
            if (basis_[i] < n_real) continue;
            for (Eigen::Index j = 0; j < n_real; ++j) {
                if (!is_basic(static_cast<int>(j)) &&
                    std::abs(tableau_(static_cast<Eigen::Index>(i), j)) > 1e-9) {
                    pivot(static_cast<int>(i), static_cast<int>(j));
                    break;
                }
            }
        }
    }

    bool is_basic(int col) const {
        for (int b : basis_)
            if (b == col) return true;
        return false;
    }

    void pivot(int row, int col) {
        tableau_.row(row) /= tableau_(row, col);
        for (Eigen::Index i = 0; i < tableau_.rows(); ++i) {
            if (i == row) continue;
            const double factor = tableau_(i, col);
            if (factor != 0.0) tableau_.row(i) -= factor * tableau_.row(row);
        }
        basis_[static_cast<size_t>(row)] = col;
    }

    Mat A_;
    Vec b_;
    Vec c_;
    Mat tableau_;
    std::vector<int> basis_;
};

} // namespace detail

struct OracleResult {
    double value = 0.0;
    Vec maximizer;
};

/// Exact maximizer of sum nu(j) L(j) over
///   { nu >= 0, sum nu = 1, (1/2) sum |nu - mu| <= R_TV }
/// via an LP over (nu, t, slacks) where t majorizes |nu - mu|. Intended as
/// a test oracle; capped at 8 modes.
inline OracleResult brute_force_oracle(const Vec& mu, const Vec& L, double R_TV) {
    const auto n = mu.size();
    if (n < 1 || n > 8)
        throw ConfigError("brute_force_oracle: supports 1..8 modes, got " +
                          std::to_string(n));
    if (L.size() != n) throw ConfigError("brute_force_oracle: length mismatch");
    if (!(R_TV >= 0.0 && R_TV <= 1.0))
        throw ConfigError("brute_force_oracle: R_TV must lie in [0, 1]");

    // Columns: nu (n) | t (n) | slack_lo (n) | surplus_hi (n) | ball slack.
    // Rows:    nu_i - t_i + slack_lo_i   = mu_i   (t_i >= nu_i - mu_i)
    //          nu_i + t_i - surplus_hi_i = mu_i   (t_i >= mu_i - nu_i)
    //          sum t + ball slack        = 2 R_TV
    //          sum nu                    = 1
    const Eigen::Index cols = 4 * n + 1;
    const Eigen::Index rows = 2 * n + 2;
    Mat A = Mat::Zero(rows, cols);
    Vec b = Vec::Zero(rows);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, i) = 1.0;
        A(i, n + i) = -1.0;
        A(i, 2 * n + i) = 1.0;
        b(i) = mu(i);
        A(n + i, i) = 1.0;
        A(n + i, n + i) = 1.0;
        A(n + i, 3 * n + i) = -1.0;
        b(n + i) = mu(i);
        A(2 * n, n + i) = 1.0;
        A(2 * n + 1, i) = 1.0;
    }
    A(2 * n, 4 * n) = 1.0;
    b(2 * n) = 2.0 * R_TV;
    b(2 * n + 1) = 1.0;

    const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
    Vec c = Vec::Zero(cols);
    c.head(n) = -L / scale; // simplex minimizes; we want the maximum

    detail::SimplexSolver solver(std::move(A), std::move(b), std::move(c));
    const Vec x = solver.solve();

    OracleResult out;
    out.maximizer = x.head(n);
    out.value = out.maximizer.dot(L);
    return out;
}

} // namespace drgpb
