#include "jjgz/coeffs.hpp"

#include "jjgz/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <utility>

namespace jjgz {

const char* to_string(NoiseMethod m) noexcept
{
    return m == NoiseMethod::quadrature ? "quadrature" : "monte_carlo";
}

BilinearCoeffs compute_bilinear(const BvpSolution& sol, const Waveform& w, const DimensionlessParams& p)
{
    const Grid& grid = sol.grid;
    if (std::abs(grid.t_end - w.t_end()) > 1e-12 * w.t_end())
        throw Error(ErrorKind::contract, "coeffs", "BVP grid and waveform cover different intervals");
    const std::size_t n = grid.size();
    for (const BasisFunction* f : {&sol.a1, &sol.a2, &sol.a, &sol.b1, &sol.b2})
        if (f->value.size() != n || f->slope.size() != n)
            throw Error(ErrorKind::contract, "coeffs", "basis function samples do not match the grid");
    if (sol.mu.size() != n)
        throw Error(ErrorKind::contract, "coeffs", "curvature samples do not match the grid");

    const double g = sol.damping;
    const double h = grid.step();

    // Integrand x' y' - mu x y + (g/2)(x y' - x' y) at node i.
    auto form = [&](const BasisFunction& x, const BasisFunction& y, std::size_t i) {
        const double xv = x.value[i], xd = x.slope[i];
        const double yv = y.value[i], yd = y.slope[i];
        return xd * yd - sol.mu[i] * xv * yv + 0.5 * g * (xv * yd - xd * yv);
    };

    double k1 = 0.0, k2 = 0.0, nn = 0.0, ll = 0.0, q1 = 0.0, q2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wt = (i == 0 || i + 1 == n) ? 0.5 * h : h;
        k1 += wt * form(sol.a1, sol.b1, i);
        k2 += wt * form(sol.a2, sol.b2, i);
        nn += wt * form(sol.a2, sol.b1, i);
        ll += wt * form(sol.a1, sol.b2, i);
        q1 += wt * (form(sol.a, sol.b1, i) + sol.b1.value[i]);
        q2 += wt * (form(sol.a, sol.b2, i) + sol.b2.value[i]);
    }

    const double q = p.q;
    BilinearCoeffs c;
    c.K1 = q * (k1 + 0.5 * g);
    c.K2 = q * (k2 - 0.5 * g);
    c.N = -q * nn;
    c.L = -q * ll;
    c.Q1 = q * q1;
    c.Q2 = q * q2;
    return c;
}

double coth_kernel(double nu, double theta)
{
    if (theta <= 0.0)
        return nu;
    if (nu < 1e-4 * theta) {
        // x coth x = 1 + x^2/3 - x^4/45 with x = nu / (2 theta).
        const double x = nu / (2.0 * theta);
        const double x2 = x * x;
        return 2.0 * theta * (1.0 + x2 / 3.0 - x2 * x2 / 45.0);
    }
    return nu / std::tanh(nu / (2.0 * theta));
}

namespace {

double kernel_value(NoiseKernel kernel, double nu, double theta)
{
    return kernel == NoiseKernel::classical ? 2.0 * theta : coth_kernel(nu, theta);
}

// Integrals over u in [0, 1] of the cubic Hermite shape functions
// h00 = 2u^3 - 3u^2 + 1 and h10 = u^3 - 2u^2 + u against exp(i th u).
std::pair<std::complex<double>, std::complex<double>> hermite_moments(double th)
{
    using cd = std::complex<double>;
    if (th < 20.0) {
        // Power series; the closed form cancels badly for small th.
        cd i00 = 0.0, i10 = 0.0, power = 1.0;
        for (int m = 0; m < 120; ++m) {
            const double k = m;
            const double m00 = 2.0 / (k + 4.0) - 3.0 / (k + 3.0) + 1.0 / (k + 1.0);
            const double m10 = 1.0 / (k + 4.0) - 2.0 / (k + 3.0) + 1.0 / (k + 2.0);
            i00 += power * m00;
            i10 += power * m10;
            power *= cd(0.0, th) / (k + 1.0);
            if (std::abs(power) < 1e-19)
                break;
        }
        return {i00, i10};
    }
    // Moments of u^p by upward recurrence, stable for th well above p.
    const cd e = std::polar(1.0, th);
    const cd ith(0.0, th);
    std::array<cd, 4> mom;
    mom[0] = (e - 1.0) / ith;
    for (int p = 1; p < 4; ++p)
        mom[p] = (e - static_cast<double>(p) * mom[p - 1]) / ith;
    return {2.0 * mom[3] - 3.0 * mom[2] + mom[0], mom[3] - 2.0 * mom[2] + mom[1]};
}

// Cosine and sine transforms of the cubic Hermite interpolants of b1 and b2
// built from the nodal values and slopes. A plain trapezoidal sum loses
// (nu h)^2/12 at high frequency, which matters once a basis function ends on
// a nonzero value and its transform decays only like 1/nu; the interpolant
// transform has no such loss and stays fourth order at low frequency.
class FourierTransforms {
public:
    explicit FourierTransforms(const BvpSolution& sol) : h_(sol.grid.step()), t_end_(sol.grid.t_end)
    {
        const std::size_t n = sol.grid.size();
        const bool slopes = sol.b1.slope.size() == n && sol.b2.slope.size() == n;
        for (auto* f : {&v1_, &d1_, &v2_, &d2_})
            f->assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            v1_[i] = sol.b1.value[i];
            v2_[i] = sol.b2.value[i];
            if (slopes) {
                d1_[i] = h_ * sol.b1.slope[i];
                d2_[i] = h_ * sol.b2.slope[i];
            }
        }
    }

    // Returns (Fc[b1], Fs[b1], Fc[b2], Fs[b2]) at frequency nu.
    std::array<double, 4> operator()(double nu) const
    {
        using cd = std::complex<double>;
        constexpr std::size_t reanchor = 256;
        const double cr = std::cos(nu * h_);
        const double sr = std::sin(nu * h_);
        // Interior sums of values and scaled slopes against exp(i nu t).
        double vc1 = 0.0, vs1 = 0.0, dc1 = 0.0, ds1 = 0.0;
        double vc2 = 0.0, vs2 = 0.0, dc2 = 0.0, ds2 = 0.0;
        double c = 1.0, s = 0.0;
        const std::size_t n = v1_.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (i % reanchor == 0) {
                const double arg = nu * h_ * static_cast<double>(i);
                c = std::cos(arg);
                s = std::sin(arg);
            }
            if (i > 0) {
                vc1 += v1_[i] * c;
                vs1 += v1_[i] * s;
                dc1 += d1_[i] * c;
                ds1 += d1_[i] * s;
                vc2 += v2_[i] * c;
                vs2 += v2_[i] * s;
                dc2 += d2_[i] * c;
                ds2 += d2_[i] * s;
            }
            const double cn = c * cr - s * sr;
            s = s * cr + c * sr;
            c = cn;
        }

        const auto [i00, i10] = hermite_moments(nu * h_);
        const double wv = 2.0 * i00.real();
        const cd wd(0.0, 2.0 * i10.imag());
        const cd end_phase = std::polar(1.0, nu * t_end_);
        auto assemble = [&](double vc, double vs, double dc, double ds, const std::vector<double>& v,
                            const std::vector<double>& d) {
            const cd f = wv * cd(vc, vs) + wd * cd(dc, ds) + v.front() * i00 + d.front() * i10 +
                         end_phase * (v.back() * std::conj(i00) - d.back() * std::conj(i10));
            return h_ * f;
        };
        const cd f1 = assemble(vc1, vs1, dc1, ds1, v1_, d1_);
        const cd f2 = assemble(vc2, vs2, dc2, ds2, v2_, d2_);
        return {f1.real(), f1.imag(), f2.real(), f2.imag()};
    }

private:
    double h_;
    double t_end_;
    std::vector<double> v1_, d1_, v2_, d2_;
};

using Triple = std::array<double, 3>;  // integrands of A, B, C

Triple noise_integrand(const FourierTransforms& ft, double nu, double theta, NoiseKernel kernel)
{
    const auto [c1, s1, c2, s2] = ft(nu);
    const double k = kernel_value(kernel, nu, theta);
    return {k * (c2 * c2 + s2 * s2), k * 2.0 * (c1 * c2 + s1 * s2), k * (c1 * c1 + s1 * s1)};
}

struct Panel {
    double a = 0.0, b = 0.0;
    Triple value{};
    Triple error{};
    double priority = 0.0;
    bool operator<(const Panel& o) const { return priority < o.priority; }
};

} // namespace

NoiseCoeffs compute_noise_quadrature(const BvpSolution& sol, const DimensionlessParams& p,
                                     const NoiseQuadratureOptions& options)
{
    if (sol.b1.value.size() != sol.grid.size() || sol.b2.value.size() != sol.grid.size())
        throw Error(ErrorKind::contract, "coeffs", "basis function samples do not match the grid");
    if (!(options.rel_tol > 0.0))
        throw Error(ErrorKind::configuration, "coeffs", "quadrature tolerance must be positive");

    using kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
    using gauss = boost::math::quadrature::gauss<double, 7>;
    const auto& xk = kronrod::abscissa();
    const auto& wk = kronrod::weights();
    const auto& wg = gauss::weights();

    const FourierTransforms ft(sol);
    std::size_t evaluations = 0;

    // Gauss nodes are the even-indexed Kronrod abscissae.
    auto integrate_panel = [&](double a, double b) {
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        Triple kron{}, gs{};
        for (std::size_t i = 0; i < xk.size(); ++i) {
            const bool is_gauss = i % 2 == 0;
            const std::size_t copies = xk[i] == 0.0 ? 1 : 2;
            for (std::size_t side = 0; side < copies; ++side) {
                const double x = side == 0 ? mid + half * xk[i] : mid - half * xk[i];
                const Triple f = noise_integrand(ft, x, p.theta, options.kernel);
                ++evaluations;
                for (std::size_t j = 0; j < 3; ++j) {
                    kron[j] += wk[i] * f[j];
                    if (is_gauss)
                        gs[j] += wg[i / 2] * f[j];
                }
            }
        }
        Panel panel;
        panel.a = a;
        panel.b = b;
        for (std::size_t j = 0; j < 3; ++j) {
            panel.value[j] = half * kron[j];
            panel.error[j] = std::abs(half * (kron[j] - gs[j]));
        }
        return panel;
    };

    const double omega = p.omega_cut;
    // Start from panels of unit width in nu: the integrand lives on the
    // oscillator bandwidth scale.
    const auto initial = static_cast<std::size_t>(std::max(4.0, std::ceil(omega)));
    std::vector<Panel> panels;
    panels.reserve(initial);
    for (std::size_t i = 0; i < initial; ++i)
        panels.push_back(integrate_panel(omega * static_cast<double>(i) / static_cast<double>(initial),
                                         omega * static_cast<double>(i + 1) / static_cast<double>(initial)));

    auto totals = [&](Triple& value, Triple& error) {
        value = {};
        error = {};
        for (const Panel& pn : panels)
            for (std::size_t j = 0; j < 3; ++j) {
                value[j] += pn.value[j];
                error[j] += pn.error[j];
            }
    };
    // Per-coefficient targets. B can vanish by symmetry, so its accuracy is
    // judged against sqrt(A C).
    auto targets = [&](const Triple& value) {
        const double scale_b = std::abs(value[1]) + std::sqrt(std::abs(value[0] * value[2]));
        return Triple{options.rel_tol * std::abs(value[0]), options.rel_tol * scale_b,
                      options.rel_tol * std::abs(value[2])};
    };
    auto priority = [&](const Panel& pn, const Triple& target) {
        double worst = 0.0;
        for (std::size_t j = options.c_only ? 2 : 0; j < 3; ++j) {
            const double t = target[j] > 0.0 ? target[j] : 1e-300;
            worst = std::max(worst, pn.error[j] / t);
        }
        return worst;
    };

    Triple value{}, error{};
    totals(value, error);
    while (true) {
        const Triple target = targets(value);
        bool converged = true;
        for (std::size_t j = options.c_only ? 2 : 0; j < 3; ++j)
            if (error[j] > target[j] && error[j] > 1e-300)
                converged = false;
        if (converged)
            break;
        if (panels.size() >= options.max_panels) {
            std::ostringstream msg;
            msg << std::setprecision(6) << "noise quadrature did not reach rel_tol " << options.rel_tol
                << " within " << options.max_panels << " panels (C = " << value[2] << " +/- " << error[2] << ")";
            throw Error(ErrorKind::numerical, "coeffs", msg.str(), "raise max_panels or relax the tolerance");
        }
        // Split the panel with the largest error relative to its target.
        std::size_t worst = 0;
        double worst_priority = -1.0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            const double pr = priority(panels[i], target);
            if (pr > worst_priority) {
                worst_priority = pr;
                worst = i;
            }
        }
        const Panel old = panels[worst];
        const double mid = 0.5 * (old.a + old.b);
        panels[worst] = integrate_panel(old.a, mid);
        panels.push_back(integrate_panel(mid, old.b));
        for (std::size_t j = 0; j < 3; ++j) {
            value[j] += panels[worst].value[j] + panels.back().value[j] - old.value[j];
            error[j] += panels[worst].error[j] + panels.back().error[j] - old.error[j];
        }
        // Refresh the running sums now and then to avoid drift.
        if (panels.size() % 256 == 0)
            totals(value, error);
    }
    totals(value, error);

    const double pref = p.q / (std::numbers::pi * std::sqrt(p.beta_c));
    NoiseCoeffs out;
    out.A = pref * value[0];
    out.B = pref * value[1];
    out.C = pref * value[2];
    out.error_A = pref * error[0];
    out.error_B = pref * error[1];
    out.error_C = pref * error[2];
    out.panels = panels.size();
    out.evaluations = evaluations;
    return out;
}

void write_noise_integrand_csv(std::ostream& out, const BvpSolution& sol, const DimensionlessParams& p,
                               std::size_t n_points, NoiseKernel kernel)
{
    const FourierTransforms ft(sol);
    const double pref = p.q / (std::numbers::pi * std::sqrt(p.beta_c));
    out << "nu,kernel,integrand_A,integrand_B,integrand_C\n" << std::setprecision(17);
    for (std::size_t i = 0; i <= n_points; ++i) {
        const double nu = p.omega_cut * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n_points, 1));
        const Triple f = noise_integrand(ft, nu, p.theta, kernel);
        out << nu << ',' << kernel_value(kernel, nu, p.theta) << ',' << pref * f[0] << ',' << pref * f[1] << ','
            << pref * f[2] << '\n';
    }
}

PropagatorCoeffs compute_coefficients(const BvpSolution& sol, const Waveform& w, const DimensionlessParams& p,
                                      const CoefficientOptions& options)
{
    const BilinearCoeffs bl = compute_bilinear(sol, w, p);
    PropagatorCoeffs c;
    c.K1 = bl.K1;
    c.K2 = bl.K2;
    c.N = bl.N;
    c.L = bl.L;
    c.Q1 = bl.Q1;
    c.Q2 = bl.Q2;
    c.method = options.method;
    if (options.method == NoiseMethod::quadrature) {
        const NoiseCoeffs n = compute_noise_quadrature(sol, p, options.quadrature);
        c.A = n.A;
        c.B = n.B;
        c.C = n.C;
    } else {
        const NoiseCoeffs n = compute_noise_vegas(sol, p, options.monte_carlo);
        c.A = n.A;
        c.B = n.B;
        c.C = n.C;
        c.mc_error_A = n.error_A;
        c.mc_error_B = n.error_B;
        c.mc_error_C = n.error_C;
    }
    return c;
}

bool satisfies_invariants(const PropagatorCoeffs& c, double slack)
{
    for (double v : {c.K1, c.K2, c.N, c.L, c.Q1, c.Q2, c.A, c.B, c.C})
        if (!std::isfinite(v))
            return false;
    if (c.A < 0.0 || c.C < 0.0)
        return false;
    return std::abs(c.B) <= 2.0 * std::sqrt(c.A * c.C) * (1.0 + slack);
}

} // namespace jjgz
