#pragma once

#include "jjgz/waveform.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace jjgz {

/// Uniform grid on [0, t_end] with n_steps + 1 nodes.
struct Grid {
    double t_end = 0.0;
    std::size_t n_steps = 0;

    double step() const { return t_end / static_cast<double>(n_steps); }
    std::size_t size() const { return n_steps + 1; }
    double node(std::size_t i) const
    {
        return i == n_steps ? t_end : t_end * static_cast<double>(i) / static_cast<double>(n_steps);
    }
    Grid refined() const { return {t_end, 2 * n_steps}; }

    /// Contract error unless t_end > 0 and n_steps >= 100.
    void validate() const;
};

/// Default step min(0.01, 0.05 sqrt(beta_c)) unless `max_step` is given. For
/// step waveforms the node count is chosen, when possible, so that the jump
/// lands exactly on a node.
Grid make_grid(const Waveform& w, double beta_c, std::optional<double> max_step = {});

/// Recommends h max(1, 1/sqrt(beta_c)) <= 0.1.
std::vector<std::string> grid_warnings(const Grid& grid, double beta_c);

/// Nodal curvature used by the discretization. At a step the node value is
/// the average of mu over the node's control volume, which is the mean of the
/// one-sided limits when the jump sits on the node.
std::vector<double> sample_curvature(const Waveform& w, const Grid& grid);

/// u'' + damping u' + mu(t) u = rhs, u(0) = left, u(t_end) = right.
struct LinearBvp {
    double damping = 0.0;
    double rhs = 0.0;
    double left = 0.0;
    double right = 0.0;
};

/// Second-order central differences, solved in one pass as a tridiagonal
/// system. Endpoint values are copied from the boundary data.
std::vector<double> solve_linear_bvp(std::span<const double> mu, const Grid& grid, const LinearBvp& problem);

enum class DampingSign : int { positive = 1, negative = -1 };

/// Waveform form of the solver: damping = sign / sqrt(beta_c). beta_c may be
/// +infinity for the undamped equation.
std::vector<double> solve_linear_bvp(const Waveform& w, const Grid& grid, double beta_c, DampingSign sign,
                                     double rhs, double left, double right);

/// Largest |discrete residual| at interior nodes divided by the largest
/// individual term of the discrete equation.
double relative_discrete_residual(std::span<const double> mu, const Grid& grid, const LinearBvp& problem,
                                  std::span<const double> u);

struct BasisFunction {
    std::vector<double> value;
    std::vector<double> slope;
};

/// Extremal-path basis on a grid. a1, a2, a solve the damped equation
/// (a with unit right-hand side), b1, b2 the anti-damped one.
struct BvpSolution {
    Grid grid;
    double damping = 0.0;           // 1/sqrt(beta_c)
    std::vector<double> mu;         // nodal curvature as used by the solver
    BasisFunction a1, a2, a, b1, b2;
    std::optional<Waveform> drive;  // exact mu(t) between nodes, when known
};

struct BvpOptions {
    /// Combine solves on h and h/2 to cancel the O(h^2) error term.
    bool richardson = true;
};

BvpSolution solve_all(const Waveform& w, const Grid& grid, double beta_c, const BvpOptions& options = {});

/// Central differences in the interior, second-order one-sided at the ends.
std::vector<double> central_derivative(std::span<const double> u, double h);

/// CSV dump: t,mu,a1,a2,a,b1,b2,da1,da2,da,db1,db2.
void write_bvp_csv(std::ostream& out, const BvpSolution& sol);

} // namespace jjgz
