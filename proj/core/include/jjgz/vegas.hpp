#pragma once

#include "jjgz/errors.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace jjgz {

struct VegasOptions {
    std::size_t sample_budget = 1'000'000;
    std::size_t n_adapt_iterations = 8;
    std::size_t n_final_iterations = 4;
    double adapt_fraction = 0.3;      // share of the budget spent training the grid
    std::size_t max_strata = 16;      // per axis
    std::size_t importance_bins = 64; // per axis
    double alpha = 1.5;               // grid damping exponent
    std::uint64_t seed = 0;
    std::size_t workers = 0;          // 0: hardware concurrency
};

struct VegasResult {
    double value = 0.0;
    double error = 0.0;
    double chi2_dof = 0.0;
    std::size_t evaluations = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Adaptive importance sampling with stratification over a box. The
/// hypercubes of each iteration are split into fixed blocks with their own
/// RNG stream and are reduced in block order, so results depend on the seed
/// only, not on the number of worker threads.
template <std::size_t Dim>
class Vegas {
public:
    using Point = std::array<double, Dim>;

    Vegas(Point lower, Point upper, VegasOptions options) : lower_(lower), upper_(upper), opt_(options)
    {
        if (opt_.sample_budget < 10'000)
            throw Error(ErrorKind::configuration, "coeffs", "Monte Carlo sample budget must be at least 1e4");
        if (opt_.importance_bins < 2 || opt_.max_strata < 1 || opt_.n_final_iterations < 1)
            throw Error(ErrorKind::configuration, "coeffs", "invalid VEGAS grid configuration");
        for (std::size_t d = 0; d < Dim; ++d) {
            if (!(upper_[d] > lower_[d]))
                throw Error(ErrorKind::contract, "coeffs", "empty integration box");
            auto& e = edges_[d];
            e.resize(opt_.importance_bins + 1);
            for (std::size_t i = 0; i <= opt_.importance_bins; ++i)
                e[i] = static_cast<double>(i) / static_cast<double>(opt_.importance_bins);
        }
    }

    template <class F>
    VegasResult integrate(const F& f)
    {
        const auto budget = static_cast<double>(opt_.sample_budget);
        const std::size_t adapt_calls =
            opt_.n_adapt_iterations > 0
                ? static_cast<std::size_t>(budget * opt_.adapt_fraction / static_cast<double>(opt_.n_adapt_iterations))
                : 0;
        const std::size_t adapt_total = adapt_calls * opt_.n_adapt_iterations;
        const std::size_t final_calls = (opt_.sample_budget - adapt_total) / opt_.n_final_iterations;

        std::size_t evaluations = 0;
        std::uint64_t iteration = 0;
        for (std::size_t k = 0; k < opt_.n_adapt_iterations; ++k) {
            const Estimate e = run_iteration(f, adapt_calls, iteration++, true);
            evaluations += e.evaluations;
        }

        std::vector<Estimate> finals;
        for (std::size_t k = 0; k < opt_.n_final_iterations; ++k) {
            finals.push_back(run_iteration(f, final_calls, iteration++, false));
            evaluations += finals.back().evaluations;
        }

        VegasResult r;
        r.evaluations = evaluations;
        bool all_zero = true;
        for (const Estimate& e : finals) {
            if (!std::isfinite(e.value) || !std::isfinite(e.variance) || e.variance < 0.0)
                throw Error(ErrorKind::numerical, "coeffs", "Monte Carlo integrand produced a non-finite value",
                            "check the BVP solution for overflow");
            if (e.value != 0.0 || e.variance != 0.0)
                all_zero = false;
        }
        if (all_zero)
            return r;
        double wsum = 0.0, vsum = 0.0;
        for (const Estimate& e : finals) {
            if (!(e.variance > 0.0))
                throw Error(ErrorKind::numerical, "coeffs", "Monte Carlo iteration reported zero variance",
                            "increase the sample budget");
            wsum += 1.0 / e.variance;
            vsum += e.value / e.variance;
        }
        r.value = vsum / wsum;
        r.error = std::sqrt(1.0 / wsum);
        if (finals.size() > 1) {
            double chi2 = 0.0;
            for (const Estimate& e : finals)
                chi2 += (e.value - r.value) * (e.value - r.value) / e.variance;
            r.chi2_dof = chi2 / static_cast<double>(finals.size() - 1);
        }
        return r;
    }

private:
    struct Estimate {
        double value = 0.0;
        double variance = 0.0;
        std::size_t evaluations = 0;
    };

    struct BlockResult {
        double sum = 0.0;
        double variance = 0.0;
        std::vector<double> weights;  // Dim * bins accumulated f^2 per importance bin
    };

    static constexpr std::size_t cubes_per_block = 64;

    template <class F>
    Estimate run_iteration(const F& f, std::size_t calls, std::uint64_t iteration, bool adapt)
    {
        const std::size_t bins = opt_.importance_bins;
        auto strata = static_cast<std::size_t>(
            std::floor(std::pow(static_cast<double>(calls) / 2.0, 1.0 / static_cast<double>(Dim))));
        strata = std::clamp<std::size_t>(strata, 1, opt_.max_strata);
        std::size_t n_cubes = 1;
        for (std::size_t d = 0; d < Dim; ++d)
            n_cubes *= strata;
        const std::size_t per_cube = std::max<std::size_t>(2, calls / n_cubes);
        const std::size_t n_blocks = (n_cubes + cubes_per_block - 1) / cubes_per_block;

        double volume = 1.0;
        for (std::size_t d = 0; d < Dim; ++d)
            volume *= upper_[d] - lower_[d];

        std::vector<BlockResult> blocks(n_blocks);
        auto run_block = [&](std::size_t b) {
            BlockResult& out = blocks[b];
            if (adapt)
                out.weights.assign(Dim * bins, 0.0);
            std::mt19937_64 rng(splitmix64(opt_.seed ^ splitmix64(iteration * 0x100000001ULL + b)));
            const std::size_t first = b * cubes_per_block;
            const std::size_t last = std::min(n_cubes, first + cubes_per_block);
            std::array<std::size_t, Dim> bin_of{};
            for (std::size_t cube = first; cube < last; ++cube) {
                std::array<std::size_t, Dim> index{};
                std::size_t rest = cube;
                for (std::size_t d = 0; d < Dim; ++d) {
                    index[d] = rest % strata;
                    rest /= strata;
                }
                double s1 = 0.0, s2 = 0.0;
                for (std::size_t k = 0; k < per_cube; ++k) {
                    Point x{};
                    double jac = volume;
                    for (std::size_t d = 0; d < Dim; ++d) {
                        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                        const double y = (static_cast<double>(index[d]) + u) / static_cast<double>(strata);
                        const double pos = y * static_cast<double>(bins);
                        const std::size_t i = std::min(static_cast<std::size_t>(pos), bins - 1);
                        const auto& e = edges_[d];
                        const double width = e[i + 1] - e[i];
                        const double unit = e[i] + width * (pos - static_cast<double>(i));
                        x[d] = lower_[d] + (upper_[d] - lower_[d]) * unit;
                        jac *= width * static_cast<double>(bins);
                        bin_of[d] = i;
                    }
                    const double fx = f(x) * jac;
                    s1 += fx;
                    s2 += fx * fx;
                    if (adapt)
                        for (std::size_t d = 0; d < Dim; ++d)
                            out.weights[d * bins + bin_of[d]] += fx * fx;
                }
                const double n = static_cast<double>(per_cube);
                const double mean = s1 / n;
                const double var = std::max(0.0, (s2 / n - mean * mean) / (n - 1.0));
                out.sum += mean;
                out.variance += var;
            }
        };

        std::size_t workers = opt_.workers ? opt_.workers : std::max(1u, std::thread::hardware_concurrency());
        workers = std::min(workers, n_blocks);
        if (workers <= 1) {
            for (std::size_t b = 0; b < n_blocks; ++b)
                run_block(b);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < workers; ++w)
                pool.emplace_back([&] {
                    for (std::size_t b = next++; b < n_blocks; b = next++)
                        run_block(b);
                });
        }

        Estimate est;
        std::vector<double> weights(adapt ? Dim * bins : 0, 0.0);
        for (const BlockResult& r : blocks) {
            est.value += r.sum;
            est.variance += r.variance;
            if (adapt)
                for (std::size_t j = 0; j < weights.size(); ++j)
                    weights[j] += r.weights[j];
        }
        const auto nc = static_cast<double>(n_cubes);
        est.value /= nc;
        est.variance /= nc * nc;
        est.evaluations = n_cubes * per_cube;
        if (adapt)
            rebin(weights);
        return est;
    }

    void rebin(const std::vector<double>& weights)
    {
        const std::size_t bins = opt_.importance_bins;
        for (std::size_t d = 0; d < Dim; ++d) {
            std::vector<double> w(weights.begin() + static_cast<std::ptrdiff_t>(d * bins),
                                  weights.begin() + static_cast<std::ptrdiff_t>((d + 1) * bins));
            // Smooth with nearest neighbours.
            std::vector<double> sm(bins);
            sm[0] = 0.5 * (w[0] + w[1]);
            sm[bins - 1] = 0.5 * (w[bins - 2] + w[bins - 1]);
            for (std::size_t i = 1; i + 1 < bins; ++i)
                sm[i] = (w[i - 1] + w[i] + w[i + 1]) / 3.0;
            double total = 0.0;
            for (double v : sm)
                total += v;
            if (!(total > 0.0) || !std::isfinite(total))
                continue;
            std::vector<double> r(bins);
            double rsum = 0.0;
            for (std::size_t i = 0; i < bins; ++i) {
                const double x = sm[i] / total;
                r[i] = (x > 0.0 && x < 1.0) ? std::pow((1.0 - x) / -std::log(x), opt_.alpha) : (x >= 1.0 ? 1.0 : 0.0);
                rsum += r[i];
            }
            if (!(rsum > 0.0))
                continue;
            // Keep every bin reachable so a region the training missed is not
            // dropped for good.
            const double floor_r = 1e-3 * rsum / static_cast<double>(bins);
            rsum = 0.0;
            for (double& v : r) {
                v = std::max(v, floor_r);
                rsum += v;
            }
            // New edges carry equal shares of r.
            const auto& old = edges_[d];
            std::vector<double> fresh(bins + 1);
            fresh[0] = 0.0;
            fresh[bins] = 1.0;
            const double share = rsum / static_cast<double>(bins);
            double acc = 0.0;
            std::size_t i = 0;
            for (std::size_t k = 1; k < bins; ++k) {
                const double target = share * static_cast<double>(k);
                while (i < bins && acc + r[i] < target) {
                    acc += r[i];
                    ++i;
                }
                if (i >= bins) {
                    fresh[k] = 1.0;
                    continue;
                }
                const double frac = r[i] > 0.0 ? (target - acc) / r[i] : 0.0;
                fresh[k] = old[i] + (old[i + 1] - old[i]) * frac;
            }
            for (std::size_t k = 1; k <= bins; ++k)
                fresh[k] = std::max(fresh[k], fresh[k - 1]);
            edges_[d] = std::move(fresh);
        }
    }

    Point lower_, upper_;
    VegasOptions opt_;
    std::array<std::vector<double>, Dim> edges_;
};

} // namespace jjgz
