#include "jjgz/bvp.hpp"

#include "jjgz/errors.hpp"
#include "jjgz/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace jjgz {

namespace {

struct Jump {
    std::size_t node;
    double delta_mu;  // right limit minus left limit
};

// Jump located on a node of `grid`, if any.
std::optional<Jump> aligned_jump(const Waveform& w, const Grid& grid)
{
    const auto tj = w.jump_time();
    if (!tj)
        return std::nullopt;
    const double pos = *tj / grid.step();
    const double k = std::round(pos);
    if (std::abs(pos - k) > 1e-9 * static_cast<double>(grid.n_steps) || k <= 0.0 ||
        k >= static_cast<double>(grid.n_steps))
        return std::nullopt;
    const double left = w(*tj);
    const double right = w(std::min(std::nextafter(*tj, w.t_end()), w.t_end()));
    return Jump{static_cast<std::size_t>(k), right - left};
}

std::vector<double> derivative_with_jump(std::span<const double> u, double h, const std::optional<Jump>& jump,
                                         std::size_t refine)
{
    std::vector<double> d = central_derivative(u, h);
    if (jump) {
        // The central difference picks up h (u''_R - u''_L)/4 at a kink, and
        // u''_R - u''_L = -(mu_R - mu_L) u because u' is continuous there.
        const std::size_t k = jump->node * refine;
        const double curvature_jump = -jump->delta_mu * u[k];
        d[k] -= 0.25 * h * curvature_jump;
    }
    return d;
}

} // namespace

void Grid::validate() const
{
    if (!(std::isfinite(t_end) && t_end > 0.0))
        throw Error(ErrorKind::contract, "bvp", "grid duration must be positive");
    if (n_steps < 100)
        throw Error(ErrorKind::contract, "bvp", "grid needs at least 100 steps");
}

Grid make_grid(const Waveform& w, double beta_c, std::optional<double> max_step)
{
    const double h_target = max_step.value_or(std::min(0.01, 0.05 * std::sqrt(beta_c)));
    if (!(h_target > 0.0))
        throw Error(ErrorKind::configuration, "bvp", "grid step must be positive");
    const double t_end = w.t_end();
    auto n0 = static_cast<std::size_t>(std::ceil(t_end / h_target - 1e-9));
    n0 = std::max<std::size_t>(n0, 100);

    if (const auto tj = w.jump_time()) {
        const double ratio = *tj / t_end;
        const std::size_t search = std::max<std::size_t>(n0, 1000);
        for (std::size_t n = n0; n < n0 + search; ++n) {
            const double pos = ratio * static_cast<double>(n);
            if (std::abs(pos - std::round(pos)) <= 1e-9 * static_cast<double>(n))
                return Grid{t_end, n};
        }
    }
    return Grid{t_end, n0};
}

std::vector<std::string> grid_warnings(const Grid& grid, double beta_c)
{
    std::vector<std::string> out;
    const double scale = std::max(1.0, 1.0 / std::sqrt(beta_c));
    if (grid.step() * scale > 0.1)
        out.push_back("grid step too coarse for the damping scale (h max(1, 1/sqrt(beta_c)) > 0.1)");
    return out;
}

std::vector<double> sample_curvature(const Waveform& w, const Grid& grid)
{
    std::vector<double> mu(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        mu[i] = w(grid.node(i));

    if (const auto tj = w.jump_time()) {
        const double h = grid.step();
        const double left = w(*tj);
        const double right = w(std::min(std::nextafter(*tj, w.t_end()), w.t_end()));
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            const double lo = grid.node(i) - 0.5 * h;
            const double hi = grid.node(i) + 0.5 * h;
            if (*tj >= lo && *tj < hi) {
                const double f = (*tj - lo) / h;  // fraction of the control volume left of the jump
                if (auto aligned = aligned_jump(w, grid); aligned && aligned->node == i)
                    mu[i] = 0.5 * (left + right);
                else
                    mu[i] = f * left + (1.0 - f) * right;
                break;
            }
        }
    }
    return mu;
}

std::vector<double> solve_linear_bvp(std::span<const double> mu, const Grid& grid, const LinearBvp& problem)
{
    if (grid.n_steps < 2 || mu.size() != grid.size())
        throw Error(ErrorKind::contract, "bvp", "curvature samples do not match the grid");
    const std::size_t n = grid.n_steps;
    const double h = grid.step();
    const double h2 = h * h;

    // Row i (node i+1): (1 - d h/2) u_i + (-2 + h^2 mu) u_{i+1} + (1 + d h/2) u_{i+2} = h^2 rhs.
    const double lo = 1.0 - 0.5 * problem.damping * h;
    const double up = 1.0 + 0.5 * problem.damping * h;
    const std::size_t m = n - 1;
    std::vector<double> lower(m - 1, lo);
    std::vector<double> upper(m - 1, up);
    std::vector<double> diag(m);
    std::vector<double> rhs(m, h2 * problem.rhs);
    for (std::size_t i = 0; i < m; ++i)
        diag[i] = -2.0 + h2 * mu[i + 1];
    rhs.front() -= lo * problem.left;
    rhs.back() -= up * problem.right;

    const std::vector<double> interior = solve_tridiagonal(lower, diag, upper, rhs);

    std::vector<double> u(n + 1);
    u.front() = problem.left;
    u.back() = problem.right;
    std::copy(interior.begin(), interior.end(), u.begin() + 1);
    return u;
}

std::vector<double> solve_linear_bvp(const Waveform& w, const Grid& grid, double beta_c, DampingSign sign,
                                     double rhs, double left, double right)
{
    if (std::abs(grid.t_end - w.t_end()) > 1e-12 * w.t_end())
        throw Error(ErrorKind::contract, "bvp", "grid does not cover the waveform interval");
    const double damping = std::isinf(beta_c) ? 0.0 : static_cast<int>(sign) / std::sqrt(beta_c);
    const auto mu = sample_curvature(w, grid);
    return solve_linear_bvp(mu, grid, LinearBvp{damping, rhs, left, right});
}

double relative_discrete_residual(std::span<const double> mu, const Grid& grid, const LinearBvp& problem,
                                  std::span<const double> u)
{
    const double h = grid.step();
    const double h2 = h * h;
    const double lo = 1.0 - 0.5 * problem.damping * h;
    const double up = 1.0 + 0.5 * problem.damping * h;
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
        const double t1 = lo * u[i - 1];
        const double t2 = (-2.0 + h2 * mu[i]) * u[i];
        const double t3 = up * u[i + 1];
        const double t4 = h2 * problem.rhs;
        worst = std::max(worst, std::abs(t1 + t2 + t3 - t4));
        scale = std::max({scale, std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4)});
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

std::vector<double> central_derivative(std::span<const double> u, double h)
{
    const std::size_t n = u.size();
    std::vector<double> d(n, 0.0);
    if (n < 3)
        throw Error(ErrorKind::contract, "bvp", "derivative needs at least three nodes");
    const double inv2h = 0.5 / h;
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = (u[i + 1] - u[i - 1]) * inv2h;
    d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) * inv2h;
    d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) * inv2h;
    return d;
}

namespace {

BvpSolution solve_all_on(const Waveform& w, const Grid& grid, double beta_c, const BvpOptions& options)
{
    grid.validate();
    if (std::abs(grid.t_end - w.t_end()) > 1e-12 * w.t_end())
        throw Error(ErrorKind::contract, "bvp", "grid does not cover the waveform interval");

    BvpSolution sol;
    sol.grid = grid;
    sol.damping = 1.0 / std::sqrt(beta_c);
    sol.mu = sample_curvature(w, grid);
    sol.drive = w;

    const Grid fine = grid.refined();
    const std::vector<double> mu_fine = options.richardson ? sample_curvature(w, fine) : std::vector<double>{};
    const auto jump = aligned_jump(w, grid);
    const double h = grid.step();

    auto solve_one = [&](const LinearBvp& problem) {
        BasisFunction out;
        std::vector<double> coarse = solve_linear_bvp(sol.mu, grid, problem);
        std::vector<double> d_coarse = derivative_with_jump(coarse, h, jump, 1);
        if (!options.richardson) {
            out.value = std::move(coarse);
            out.slope = std::move(d_coarse);
            return out;
        }
        const std::vector<double> f = solve_linear_bvp(mu_fine, fine, problem);
        const std::vector<double> d_fine = derivative_with_jump(f, 0.5 * h, jump, 2);
        out.value.resize(grid.size());
        out.slope.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out.value[i] = (4.0 * f[2 * i] - coarse[i]) / 3.0;
            out.slope[i] = (4.0 * d_fine[2 * i] - d_coarse[i]) / 3.0;
        }
        out.value.front() = problem.left;
        out.value.back() = problem.right;
        return out;
    };

    const double g = sol.damping;
    sol.a1 = solve_one({+g, 0.0, 1.0, 0.0});
    sol.a2 = solve_one({+g, 0.0, 0.0, 1.0});
    sol.a = solve_one({+g, 1.0, 0.0, 0.0});
    sol.b1 = solve_one({-g, 0.0, 1.0, 0.0});
    sol.b2 = solve_one({-g, 0.0, 0.0, 1.0});
    return sol;
}

} // namespace

BvpSolution solve_all(const Waveform& w, const Grid& grid, double beta_c, const BvpOptions& options)
{
    if (!(std::isfinite(beta_c) && beta_c > 0.0))
        throw Error(ErrorKind::contract, "bvp", "beta_c must be positive and finite");
    try {
        return solve_all_on(w, grid, beta_c, options);
    } catch (const SingularSystemError&) {
        return solve_all_on(w, Grid{grid.t_end, grid.n_steps + 1}, beta_c, options);
    }
}

void write_bvp_csv(std::ostream& out, const BvpSolution& sol)
{
    out << "t,mu,a1,a2,a,b1,b2,da1,da2,da,db1,db2\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        out << sol.grid.node(i) << ',' << sol.mu[i] << ',' << sol.a1.value[i] << ',' << sol.a2.value[i] << ','
            << sol.a.value[i] << ',' << sol.b1.value[i] << ',' << sol.b2.value[i] << ',' << sol.a1.slope[i] << ','
            << sol.a2.slope[i] << ',' << sol.a.slope[i] << ',' << sol.b1.slope[i] << ',' << sol.b2.slope[i] << '\n';
    }
}

} // namespace jjgz
