#include "jjgz/bvp.hpp"
#include "jjgz/coeffs.hpp"
#include "jjgz/errors.hpp"
#include "jjgz/waveform.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

using namespace jjgz;

namespace {

struct Problem {
    Waveform w;
    BvpSolution sol;
    DimensionlessParams p;
};

Problem make_problem(double beta_c, double theta, std::optional<double> max_step = {}, double omega_cut = 50.0)
{
    DimensionlessParams p;
    p.beta_c = beta_c;
    p.q = 500.0;
    p.theta = theta;
    p.omega_cut = omega_cut;
    Waveform w = default_step(beta_c);
    BvpSolution sol = solve_all(w, make_grid(w, beta_c, max_step), beta_c);
    return {std::move(w), std::move(sol), p};
}

BasisFunction zeros(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)}; }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

using cl = std::complex<long double>;

// Closed-form transform of t^k over [0, T]: series for small nu T, upward
// recurrence otherwise.
cl power_transform(int k, long double nu, long double t_end)
{
    if (nu * t_end < 2.0L) {
        cl sum = 0.0L, term = 1.0L;
        for (int m = 0; m < 60; ++m) {
            sum += term * std::pow(t_end, static_cast<long double>(k + m + 1)) / static_cast<long double>(k + m + 1);
            term *= cl(0.0L, nu) / static_cast<long double>(m + 1);
        }
        return sum;
    }
    const cl inu(0.0L, nu);
    const cl e = std::exp(inu * t_end);
    cl f = (e - 1.0L) / inu;
    for (int p = 1; p <= k; ++p)
        f = (std::pow(t_end, static_cast<long double>(p)) * e - static_cast<long double>(p) * f) / inu;
    return f;
}

// Basis stand-ins that a cubic Hermite interpolant reproduces exactly:
// b1 = 1 - t/T, b2 = (t/T)^3.
struct Polynomials {
    Problem problem;
    long double t_end;
};

Polynomials polynomial_basis(double theta)
{
    const double t_end = 10.0;
    const std::size_t n = 1000;
    Problem s{Waveform::step(1.0, -1.0, 5.0, t_end), {}, {}};
    s.sol.grid = {t_end, n};
    s.sol.b1 = zeros(n + 1);
    s.sol.b2 = zeros(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double u = s.sol.grid.node(i) / t_end;
        s.sol.b1.value[i] = 1.0 - u;
        s.sol.b1.slope[i] = -1.0 / t_end;
        s.sol.b2.value[i] = u * u * u;
        s.sol.b2.slope[i] = 3.0 * u * u / t_end;
    }
    s.p.beta_c = 2.0;
    s.p.q = 300.0;
    s.p.theta = theta;
    return {s, t_end};
}

struct Exact {
    long double A = 0, B = 0, C = 0;
};

// Composite Simpson over [0, omega] in extended precision.
Exact exact_noise(const Polynomials& poly, NoiseKernel kernel)
{
    const long double t = poly.t_end;
    const DimensionlessParams& p = poly.problem.p;
    const std::size_t m = 400000;
    const long double dnu = p.omega_cut / static_cast<long double>(m);
    Exact out;
    for (std::size_t i = 0; i <= m; ++i) {
        const long double nu = dnu * static_cast<long double>(i);
        const cl f1 = power_transform(0, nu, t) - power_transform(1, nu, t) / t;
        const cl f2 = power_transform(3, nu, t) / (t * t * t);
        long double k;
        if (kernel == NoiseKernel::classical)
            k = 2.0L * p.theta;
        else if (p.theta == 0.0)
            k = nu;
        else
            k = nu == 0.0L ? 2.0L * p.theta : nu / std::tanh(nu / (2.0L * p.theta));
        const long double w = (i == 0 || i == m) ? 1.0L : (i % 2 ? 4.0L : 2.0L);
        out.A += w * k * std::norm(f2);
        out.B += w * k * 2.0L * (f1 * std::conj(f2)).real();
        out.C += w * k * std::norm(f1);
    }
    const long double pref = p.q / (std::numbers::pi_v<long double> * std::sqrt((long double)p.beta_c)) * dnu / 3.0L;
    out.A *= pref;
    out.B *= pref;
    out.C *= pref;
    return out;
}

McConfig mc_config(std::size_t budget, std::uint64_t seed = 42, std::size_t workers = 1)
{
    McConfig c;
    c.sample_budget = budget;
    c.rng_seed = seed;
    c.workers = workers;
    return c;
}

} // namespace

TEST(Bilinear, ZeroBasisLeavesOnlyDampingTerms)
{
    const Waveform w = Waveform::step(1.0, -1.0, 10.0, 20.0);
    BvpSolution s;
    s.grid = {20.0, 200};
    s.damping = 0.5;
    s.mu.assign(201, 1.0);
    s.a1 = s.a2 = s.a = s.b1 = s.b2 = zeros(201);
    DimensionlessParams p;
    p.beta_c = 4.0;
    p.q = 300.0;
    const BilinearCoeffs c = compute_bilinear(s, w, p);
    EXPECT_DOUBLE_EQ(c.K1, 300.0 * 0.25);
    EXPECT_DOUBLE_EQ(c.K2, -300.0 * 0.25);
    EXPECT_EQ(c.N, 0.0);
    EXPECT_EQ(c.L, 0.0);
    EXPECT_EQ(c.Q1, 0.0);
    EXPECT_EQ(c.Q2, 0.0);
}

TEST(Bilinear, MismatchedIntervalIsContractError)
{
    const Problem s = make_problem(1.0, 0.0);
    const Waveform other = Waveform::step(1.0, -1.0, 10.0, 25.0);
    try {
        compute_bilinear(s.sol, other, s.p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::contract);
    }
}

TEST(Bilinear, IntegrationByPartsIdentities)
{
    // With b1'' = g b1' - mu b1 the bilinear integrals reduce to boundary
    // terms: Q1 = q int b1 and K1 = q (g - b1'(0)).
    for (double beta_c : {0.25, 1.0, 4.0}) {
        const Problem s = make_problem(beta_c, 0.0);
        const BilinearCoeffs c = compute_bilinear(s.sol, s.w, s.p);
        const double h = s.sol.grid.step();
        double integral = 0.0;
        const auto& b1 = s.sol.b1.value;
        for (std::size_t i = 0; i < b1.size(); ++i)
            integral += (i == 0 || i + 1 == b1.size() ? 0.5 : 1.0) * h * b1[i];
        // Discrete slopes are second order, so the identities hold to O(h^2);
        // K1 is a small difference of large terms and loses more digits.
        EXPECT_LT(rel(c.Q1, s.p.q * integral), 2e-4) << beta_c;
        EXPECT_LT(rel(c.K1, s.p.q * (s.sol.damping - s.sol.b1.slope.front())), 5e-3) << beta_c;
    }
}

TEST(Bilinear, GainDominatesRestoringTerm)
{
    const Problem s = make_problem(1.0, 0.0);
    const BilinearCoeffs c = compute_bilinear(s.sol, s.w, s.p);
    EXPECT_GT(std::abs(c.Q1 / c.K1), 100.0);
}

TEST(Bilinear, GridHalvingChangesLittle)
{
    const Problem coarse = make_problem(1.0, 0.0, 0.01);
    const Problem fine = make_problem(1.0, 0.0, 0.005);
    const BilinearCoeffs a = compute_bilinear(coarse.sol, coarse.w, coarse.p);
    const BilinearCoeffs b = compute_bilinear(fine.sol, fine.w, fine.p);
    EXPECT_LT(rel(a.Q1, b.Q1), 1e-4);
    EXPECT_LT(rel(a.K1, b.K1), 1e-3);
    const NoiseCoeffs na = compute_noise_quadrature(coarse.sol, coarse.p);
    const NoiseCoeffs nb = compute_noise_quadrature(fine.sol, fine.p);
    EXPECT_LT(rel(na.C, nb.C), 1e-4);
}

TEST(Bilinear, LinearInQ)
{
    Problem s = make_problem(1.0, 0.5);
    const BilinearCoeffs c1 = compute_bilinear(s.sol, s.w, s.p);
    const NoiseCoeffs n1 = compute_noise_quadrature(s.sol, s.p);
    s.p.q *= 2.0;
    const BilinearCoeffs c2 = compute_bilinear(s.sol, s.w, s.p);
    const NoiseCoeffs n2 = compute_noise_quadrature(s.sol, s.p);
    EXPECT_DOUBLE_EQ(c2.Q1, 2.0 * c1.Q1);
    EXPECT_DOUBLE_EQ(c2.K1, 2.0 * c1.K1);
    EXPECT_DOUBLE_EQ(n2.C, 2.0 * n1.C);
}

TEST(Kernel, CothExamples)
{
    EXPECT_EQ(coth_kernel(2.5, 0.0), 2.5);
    EXPECT_NEAR(coth_kernel(2.0, 1.0), 2.0 / std::tanh(1.0), 1e-15);
    EXPECT_NEAR(coth_kernel(2.0, 1.0), 2.0 * 1.3130352854993313, 1e-14);
    EXPECT_NEAR(coth_kernel(1e-9, 0.3), 0.6, 1e-15);
    // Both sides of the series branch agree with an extended precision
    // closed form.
    for (double nu : {2.9e-5, 3.1e-5, 1e-3}) {
        const long double x = nu;
        EXPECT_NEAR(coth_kernel(nu, 0.3), static_cast<double>(x / std::tanh(x / 0.6L)), 1e-15) << nu;
    }
    // Never below the zero temperature value and increasing in theta.
    double previous = coth_kernel(1.0, 0.0);
    for (double theta : {0.1, 0.5, 1.0, 3.0}) {
        EXPECT_GT(coth_kernel(1.0, theta), previous);
        previous = coth_kernel(1.0, theta);
    }
}

TEST(NoiseQuadrature, ZeroBasisGivesZero)
{
    BvpSolution s;
    s.grid = {20.0, 200};
    s.b1 = s.b2 = zeros(201);
    DimensionlessParams p;
    const NoiseCoeffs n = compute_noise_quadrature(s, p);
    EXPECT_EQ(n.A, 0.0);
    EXPECT_EQ(n.B, 0.0);
    EXPECT_EQ(n.C, 0.0);
}

TEST(NoiseQuadrature, MatchesClosedFormTransformsAtZeroTemperature)
{
    const Polynomials poly = polynomial_basis(0.0);
    const Exact ref = exact_noise(poly, NoiseKernel::quantum);
    NoiseQuadratureOptions o;
    o.rel_tol = 1e-9;
    const NoiseCoeffs n = compute_noise_quadrature(poly.problem.sol, poly.problem.p, o);
    EXPECT_LT(rel(n.C, static_cast<double>(ref.C)), 1e-8);
    EXPECT_LT(rel(n.A, static_cast<double>(ref.A)), 1e-8);
    EXPECT_LT(std::abs(n.B - static_cast<double>(ref.B)), 1e-8 * std::sqrt(n.A * n.C));
}

TEST(NoiseQuadrature, MatchesClosedFormTransformsWarmAndClassical)
{
    const Polynomials poly = polynomial_basis(1.5);
    for (NoiseKernel kernel : {NoiseKernel::quantum, NoiseKernel::classical}) {
        const Exact ref = exact_noise(poly, kernel);
        NoiseQuadratureOptions o;
        o.rel_tol = 1e-9;
        o.kernel = kernel;
        const NoiseCoeffs n = compute_noise_quadrature(poly.problem.sol, poly.problem.p, o);
        EXPECT_LT(rel(n.C, static_cast<double>(ref.C)), 1e-8);
        EXPECT_LT(rel(n.A, static_cast<double>(ref.A)), 1e-8);
    }
}

TEST(NoiseQuadrature, StepSizeIndependentWhenBasisEndsOnNonzeroValue)
{
    // A is built from b2, which ends at one; its transform tail decays only
    // like 1/nu and exposes any frequency-dependent sampling error.
    const Problem coarse = make_problem(1.0, 0.0, 0.02);
    const Problem fine = make_problem(1.0, 0.0, 0.005);
    const NoiseCoeffs a = compute_noise_quadrature(coarse.sol, coarse.p);
    const NoiseCoeffs b = compute_noise_quadrature(fine.sol, fine.p);
    EXPECT_LT(rel(a.A, b.A), 1e-6);
}

TEST(NoiseQuadrature, InvariantsHoldAcrossParameters)
{
    for (double beta_c : {0.1, 1.0, 10.0})
        for (double theta : {0.0, 1.0}) {
            const Problem s = make_problem(beta_c, theta);
            const PropagatorCoeffs c = compute_coefficients(s.sol, s.w, s.p);
            EXPECT_TRUE(satisfies_invariants(c)) << beta_c << ' ' << theta;
            EXPECT_GT(c.C, 0.0);
            EXPECT_EQ(c.method, NoiseMethod::quadrature);
        }
}

TEST(NoiseQuadrature, InvariantCheckRejectsBadValues)
{
    PropagatorCoeffs c;
    c.A = 1.0;
    c.C = 1.0;
    c.B = 1.9;
    EXPECT_TRUE(satisfies_invariants(c));
    c.B = 2.1;
    EXPECT_FALSE(satisfies_invariants(c));
    c.B = 0.0;
    c.C = -1e-3;
    EXPECT_FALSE(satisfies_invariants(c));
    c.C = std::nan("");
    EXPECT_FALSE(satisfies_invariants(c));
}

TEST(NoiseQuadrature, GrowsWithTemperature)
{
    Problem s = make_problem(1.0, 0.0);
    double previous = compute_noise_quadrature(s.sol, s.p).C;
    for (double theta : {0.3, 1.0, 3.0}) {
        s.p.theta = theta;
        const double c = compute_noise_quadrature(s.sol, s.p).C;
        EXPECT_GT(c, previous) << theta;
        previous = c;
    }
}

TEST(NoiseQuadrature, ClassicalKernelAtHighTemperature)
{
    Problem s = make_problem(1.0, 30.0);
    NoiseQuadratureOptions classical;
    classical.kernel = NoiseKernel::classical;
    const double cq = compute_noise_quadrature(s.sol, s.p).C;
    const double cc = compute_noise_quadrature(s.sol, s.p, classical).C;
    EXPECT_LT(rel(cc, cq), 5e-3);
    // Proportional to theta by construction.
    s.p.theta = 60.0;
    EXPECT_NEAR(compute_noise_quadrature(s.sol, s.p, classical).C, 2.0 * cc, 1e-6 * cc);
}

TEST(NoiseQuadrature, CutoffIndependence)
{
    const Problem s50 = make_problem(1.0, 0.0, {}, 50.0);
    const Problem s100 = make_problem(1.0, 0.0, {}, 100.0);
    EXPECT_LT(rel(compute_noise_quadrature(s50.sol, s50.p).C, compute_noise_quadrature(s100.sol, s100.p).C), 1e-2);
}

TEST(NoiseQuadrature, PanelBudgetExhaustion)
{
    const Problem s = make_problem(1.0, 0.0);
    NoiseQuadratureOptions o;
    o.rel_tol = 1e-14;
    o.max_panels = 60;
    try {
        compute_noise_quadrature(s.sol, s.p, o);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::numerical);
    }
    o.rel_tol = 0.0;
    EXPECT_THROW(compute_noise_quadrature(s.sol, s.p, o), Error);
}

TEST(NoiseQuadrature, IntegrandCsv)
{
    const Problem s = make_problem(1.0, 0.5);
    std::ostringstream out;
    write_noise_integrand_csv(out, s.sol, s.p, 10);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "nu,kernel,integrand_A,integrand_B,integrand_C");
    std::size_t rows = 0;
    while (std::getline(in, line))
        ++rows;
    EXPECT_EQ(rows, 11u);
}

TEST(NoiseMonteCarlo, AgreesWithQuadrature)
{
    const Problem s = make_problem(1.0, 0.0);
    const NoiseCoeffs q = compute_noise_quadrature(s.sol, s.p);
    const NoiseCoeffs m = compute_noise_vegas(s.sol, s.p, mc_config(200'000));
    EXPECT_GT(m.error_C, 0.0);
    EXPECT_LT(std::abs(m.C - q.C), 3.0 * m.error_C);
    EXPECT_LT(rel(m.C, q.C), 1e-2);
    EXPECT_LT(std::abs(m.A - q.A), 4.0 * m.error_A + 1e-2 * q.A);
}

TEST(NoiseMonteCarlo, DeterministicAndWorkerIndependent)
{
    const Problem s = make_problem(1.0, 0.5);
    const NoiseCoeffs a = compute_noise_vegas(s.sol, s.p, mc_config(50'000, 9, 1));
    const NoiseCoeffs b = compute_noise_vegas(s.sol, s.p, mc_config(50'000, 9, 1));
    const NoiseCoeffs c = compute_noise_vegas(s.sol, s.p, mc_config(50'000, 9, 3));
    EXPECT_EQ(a.C, b.C);
    EXPECT_EQ(a.B, b.B);
    EXPECT_EQ(a.C, c.C);
    EXPECT_EQ(a.error_C, c.error_C);
}

TEST(NoiseMonteCarlo, ErrorShrinksAsInverseRootOfBudget)
{
    const Problem s = make_problem(1.0, 0.0);
    const NoiseCoeffs small = compute_noise_vegas(s.sol, s.p, mc_config(100'000));
    const NoiseCoeffs large = compute_noise_vegas(s.sol, s.p, mc_config(400'000));
    const double ratio = small.error_C / large.error_C;
    EXPECT_GT(ratio, 2.0 * 0.8);
    EXPECT_LT(ratio, 2.0 * 1.2);
}

TEST(NoiseMonteCarlo, RejectsTinyBudget)
{
    const Problem s = make_problem(1.0, 0.0);
    try {
        compute_noise_vegas(s.sol, s.p, mc_config(1'000));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::configuration);
    }
}

TEST(NoiseMonteCarlo, CoefficientsCarryErrors)
{
    const Problem s = make_problem(1.0, 0.0);
    CoefficientOptions o;
    o.method = NoiseMethod::monte_carlo;
    o.monte_carlo = mc_config(50'000);
    const PropagatorCoeffs c = compute_coefficients(s.sol, s.w, s.p, o);
    EXPECT_EQ(c.method, NoiseMethod::monte_carlo);
    EXPECT_GT(c.mc_error_C, 0.0);
    EXPECT_GT(c.mc_error_A, 0.0);
    EXPECT_STREQ(to_string(c.method), "monte_carlo");
}
