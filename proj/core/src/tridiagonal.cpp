#include "jjgz/tridiagonal.hpp"

#include "jjgz/errors.hpp"

#include <cmath>
#include <string>

extern "C" void dgtsv_(const int* n, const int* nrhs, double* dl, double* d, double* du, double* b, const int* ldb,
                       int* info);

namespace jjgz {

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs)
{
    const std::size_t n = diag.size();
    if (n == 0 || rhs.size() != n || lower.size() + 1 != n || upper.size() + 1 != n)
        throw Error(ErrorKind::contract, "bvp", "tridiagonal system has inconsistent band sizes");

    std::vector<double> dl(lower.begin(), lower.end());
    std::vector<double> d(diag.begin(), diag.end());
    std::vector<double> du(upper.begin(), upper.end());
    std::vector<double> x(rhs.begin(), rhs.end());

    const int size = static_cast<int>(n);
    const int nrhs = 1;
    int info = 0;
    dgtsv_(&size, &nrhs, dl.data(), d.data(), du.data(), x.data(), &size, &info);
    if (info < 0)
        throw Error(ErrorKind::contract, "bvp", "invalid argument " + std::to_string(-info) + " to dgtsv");
    if (info > 0) {
        const auto pivot = static_cast<std::size_t>(info - 1);
        throw SingularSystemError(pivot, "singular tridiagonal system at pivot " + std::to_string(pivot));
    }
    for (double v : x)
        if (!std::isfinite(v))
            throw SingularSystemError(n - 1, "tridiagonal solve produced non-finite values");
    return x;
}

} // namespace jjgz
