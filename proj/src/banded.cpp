#include "treepde/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "treepde/errors.hpp"

namespace treepde {

namespace {
constexpr double kMaxBandBytes = 2.0 * (1 << 30);
}

BandedMatrix::BandedMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1) {
    if (n <= 0 || kl < 0 || ku < 0) throw ConfigError("invalid band matrix shape");
    // Factor storage plus the unfactored copy kept for multiply().
    const double bytes = 2.0 * n * ld_ * sizeof(double);
    if (bytes > kMaxBandBytes)
        throw ConfigError("band matrix would need " + std::to_string(bytes / (1 << 30)) +
                          " GiB; use a smaller grid");
    ab_.assign(static_cast<std::size_t>(n) * ld_, 0.0);
}

double BandedMatrix::get(int i, int j) const {
    if (!in_band(i, j)) return 0.0;
    if (factored_) {
        // Values live in orig_ once factorized.
        return orig_[static_cast<std::size_t>(j) * ld_ + kl_ + ku_ + i - j];
    }
    return at(i, j);
}

void BandedMatrix::set(int i, int j, double v) {
    if (!in_band(i, j)) throw ConfigError("write outside band");
    if (factored_) throw ConfigError("matrix already factorized");
    at(i, j) = v;
}

void BandedMatrix::add(int i, int j, double v) { set(i, j, get(i, j) + v); }

std::vector<double> BandedMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        const int jlo = std::max(0, i - kl_), jhi = std::min(n_ - 1, i + ku_);
        double acc = 0.0;
        for (int j = jlo; j <= jhi; ++j) acc += get(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

double BandedMatrix::norm_inf() const {
    double best = 0.0;
    for (int i = 0; i < n_; ++i) {
        double row = 0.0;
        for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j)
            row += std::fabs(get(i, j));
        best = std::max(best, row);
    }
    return best;
}

void BandedMatrix::factorize() {
    if (factored_) return;
    orig_ = ab_;
    ipiv_.assign(n_, 0);
    lapack_int info =
        LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(), ld_, ipiv_.data());
    if (info > 0) throw SingularityError("band matrix is singular at pivot " + std::to_string(info));
    if (info < 0) throw NumericalError("dgbtrf argument error " + std::to_string(-info));
    factored_ = true;
}

void BandedMatrix::solve_in_place(std::vector<double>& b) {
    if (static_cast<int>(b.size()) != n_) throw ConfigError("right-hand side size mismatch");
    factorize();
    lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1, ab_.data(), ld_,
                                     ipiv_.data(), b.data(), n_);
    if (info != 0) throw NumericalError("dgbtrs failed");
}

std::vector<double> banded_lu_solve(BandedMatrix A, std::vector<double> b) {
    A.solve_in_place(b);
    return b;
}

}  // namespace treepde
