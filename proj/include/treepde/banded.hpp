#pragma once

#include <vector>

namespace treepde {

/// Square band matrix in LAPACK general-band layout, with room for the
/// fill-in produced by partial pivoting.
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(int n, int kl, int ku);

    int size() const { return n_; }
    int lower() const { return kl_; }
    int upper() const { return ku_; }
    bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }

    double get(int i, int j) const;
    void set(int i, int j, double v);
    void add(int i, int j, double v);

    std::vector<double> multiply(const std::vector<double>& x) const;
    double norm_inf() const;

    /// LU with partial pivoting (dgbtrf); throws SingularityError on an exact zero pivot.
    void factorize();
    bool factorized() const { return factored_; }
    /// Solves in place; factorizes first if needed.
    void solve_in_place(std::vector<double>& b);

private:
    double& at(int i, int j) { return ab_[static_cast<std::size_t>(j) * ld_ + kl_ + ku_ + i - j]; }
    double at(int i, int j) const {
        return ab_[static_cast<std::size_t>(j) * ld_ + kl_ + ku_ + i - j];
    }

    int n_ = 0, kl_ = 0, ku_ = 0, ld_ = 1;
    std::vector<double> ab_;
    std::vector<double> orig_;  // unfactored copy for multiply()
    std::vector<int> ipiv_;
    bool factored_ = false;
};

std::vector<double> banded_lu_solve(BandedMatrix A, std::vector<double> b);

}  // namespace treepde
