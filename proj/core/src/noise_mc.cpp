#include "jjgz/coeffs.hpp"
#include "jjgz/vegas.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace jjgz {

namespace {

using cplx = std::complex<double>;

// Continuous reconstruction of an anti-damped basis function between grid
// nodes: cubic Hermite values, linear slopes, and the second derivative
// taken from the equation itself so the curvature jump of a step is exact.
class BasisInterpolant {
public:
    BasisInterpolant(const BasisFunction& f, const BvpSolution& sol)
        : f_(f), sol_(sol), h_(sol.grid.step()), last_(sol.grid.n_steps) {}

    double value(double t) const
    {
        const auto [i, x] = locate(t);
        const double x2 = x * x, x3 = x2 * x;
        return (2 * x3 - 3 * x2 + 1) * f_.value[i] + (x3 - 2 * x2 + x) * h_ * f_.slope[i] +
               (-2 * x3 + 3 * x2) * f_.value[i + 1] + (x3 - x2) * h_ * f_.slope[i + 1];
    }

    double slope(double t) const
    {
        const auto [i, x] = locate(t);
        return f_.slope[i] + (f_.slope[i + 1] - f_.slope[i]) * x;
    }

    // b'' = damping b' - mu b.
    double curvature(double t) const { return sol_.damping * slope(t) - mu(t) * value(t); }

    double start_value() const { return f_.value.front(); }
    double end_value() const { return f_.value.back(); }
    double start_slope() const { return f_.slope.front(); }
    double end_slope() const { return f_.slope.back(); }

private:
    std::pair<std::size_t, double> locate(double t) const
    {
        const double pos = t / h_;
        std::size_t i = static_cast<std::size_t>(pos);
        if (i >= last_)
            i = last_ - 1;
        return {i, pos - static_cast<double>(i)};
    }

    double mu(double t) const
    {
        if (sol_.drive)
            return (*sol_.drive)(std::min(t, sol_.drive->t_end()));
        const auto [i, x] = locate(t);
        return sol_.mu[i] + (sol_.mu[i + 1] - sol_.mu[i]) * x;
    }

    const BasisFunction& f_;
    const BvpSolution& sol_;
    double h_;
    std::size_t last_;
};

// Boundary part of the transform after two integrations by parts:
//   F(nu) = P(nu) - J(nu)/nu^2,  J(nu) = int b''(t) e^{i nu t} dt,
//   P(nu) = (b(T) e^{i nu T} - b(0)) / (i nu) + (b'(T) e^{i nu T} - b'(0)) / nu^2.
cplx boundary_part(const BasisInterpolant& b, double nu, double t_end)
{
    const cplx e = std::polar(1.0, nu * t_end);
    return (b.end_value() * e - b.start_value()) / cplx(0.0, nu) + (b.end_slope() * e - b.start_slope()) / (nu * nu);
}

} // namespace

// Each coefficient is int k(nu) Re[F_x(nu) conj F_y(nu)] dnu over [0, omega_cut]
// with F_b the Fourier transform of b. The nu axis is split in two boxes with
// their own adaptive grids:
//   low band, nu < split:  the direct form k x(t) y(s) cos(nu (t - s)); the
//     kernel stays finite as nu -> 0 (coth_kernel's series branch);
//   high band: F = P - J/nu^2 from two integrations by parts. P is closed
//     form, terms missing a time variable are spread uniformly over it. The
//     direct form cancels badly at large nu (its magnitude grows like nu
//     while the integral decays), the high-band form does not.
NoiseCoeffs compute_noise_vegas(const BvpSolution& sol, const DimensionlessParams& p, const McConfig& cfg)
{
    if (sol.b1.slope.size() != sol.grid.size() || sol.b2.slope.size() != sol.grid.size() ||
        sol.b1.value.size() != sol.grid.size() || sol.b2.value.size() != sol.grid.size())
        throw Error(ErrorKind::contract, "coeffs", "basis function samples do not match the grid");
    if (cfg.sample_budget < 10'000)
        throw Error(ErrorKind::configuration, "coeffs", "Monte Carlo sample budget must be at least 1e4");

    const double t_end = sol.grid.t_end;
    const double theta = p.theta;
    const NoiseKernel kernel = cfg.kernel;
    const double pref = p.q / (std::numbers::pi * std::sqrt(p.beta_c));
    const double split = std::min(low_band_limit, p.omega_cut);
    const BasisInterpolant b1(sol.b1, sol);
    const BasisInterpolant b2(sol.b2, sol);

    auto k = [&](double nu) { return kernel == NoiseKernel::classical ? 2.0 * theta : coth_kernel(nu, theta); };

    VegasOptions opt;
    opt.n_adapt_iterations = cfg.n_adapt_iterations;
    opt.max_strata = cfg.stratification_bins;
    opt.importance_bins = cfg.importance_bins;
    opt.workers = cfg.workers;

    NoiseCoeffs out;
    // weight 1 for A and C, 2 for the symmetrized cross term B.
    auto integrate = [&](const BasisInterpolant& x, const BasisInterpolant& y, double weight, std::uint64_t stream,
                         double& value, double& error) {
        auto low = [&](const std::array<double, 3>& v) {
            const double nu = v[0], t = v[1], s = v[2];
            return pref * weight * k(nu) * x.value(t) * y.value(s) * std::cos(nu * (t - s));
        };
        auto high = [&](const std::array<double, 3>& v) {
            const double nu = v[0], t = v[1], s = v[2];
            const cplx px = boundary_part(x, nu, t_end);
            const cplx py = boundary_part(y, nu, t_end);
            const double nu2 = nu * nu;
            const cplx ex = std::polar(x.curvature(t), nu * t);
            const cplx ey = std::polar(y.curvature(s), nu * s);
            const double boundary = std::real(px * std::conj(py)) / (t_end * t_end);
            const double cross = (std::real(px * std::conj(ey)) + std::real(ex * std::conj(py))) / (nu2 * t_end);
            const double bulk = std::real(ex * std::conj(ey)) / (nu2 * nu2);
            return pref * weight * k(nu) * (boundary - cross + bulk);
        };

        VegasOptions lo = opt, hi = opt;
        lo.sample_budget = static_cast<std::size_t>(low_band_share * static_cast<double>(cfg.sample_budget));
        hi.sample_budget = cfg.sample_budget - lo.sample_budget;
        lo.sample_budget = std::max<std::size_t>(lo.sample_budget, 10'000);
        hi.sample_budget = std::max<std::size_t>(hi.sample_budget, 10'000);
        lo.seed = splitmix64(cfg.rng_seed + 2 * stream);
        hi.seed = splitmix64(cfg.rng_seed + 2 * stream + 1);

        Vegas<3> low_box({0.0, 0.0, 0.0}, {split, t_end, t_end}, lo);
        const VegasResult rl = low_box.integrate(low);
        VegasResult rh;
        if (split < p.omega_cut) {
            Vegas<3> high_box({split, 0.0, 0.0}, {p.omega_cut, t_end, t_end}, hi);
            rh = high_box.integrate(high);
        }
        value = rl.value + rh.value;
        error = std::hypot(rl.error, rh.error);
        out.evaluations += rl.evaluations + rh.evaluations;
        out.chi2_dof = std::max({out.chi2_dof, rl.chi2_dof, rh.chi2_dof});
    };
    integrate(b2, b2, 1.0, 1, out.A, out.error_A);
    integrate(b1, b2, 2.0, 2, out.B, out.error_B);
    integrate(b1, b1, 1.0, 3, out.C, out.error_C);
    return out;
}

} // namespace jjgz
