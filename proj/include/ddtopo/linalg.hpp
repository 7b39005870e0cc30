#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ddtopo {

// Dense row-major matrix of doubles. Sized for the MLP workloads here
// (thousands by hundreds); the multiply kernels below are tiled so the
// compiler can vectorize the contiguous inner loops.
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double* row(int i) { return a.data() + static_cast<std::size_t>(i) * cols; }
    const double* row(int i) const { return a.data() + static_cast<std::size_t>(i) * cols; }
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
    void fill(double v) { a.assign(a.size(), v); }
};

Matrix matmul_nn(const Matrix& A, const Matrix& B);  // A(m,k) * B(k,n)
Matrix matmul_nt(const Matrix& A, const Matrix& B);  // A(m,k) * B(n,k)^T
Matrix matmul_tn(const Matrix& A, const Matrix& B);  // A(k,m)^T * B(k,n)
Matrix transposed(const Matrix& A);

struct SingularSystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Symmetric positive definite matrix with fixed half-bandwidth, lower band
// stored by row so that L(i,k) is contiguous in k. Cholesky stays in band.
class BandedSpd {
public:
    BandedSpd(int n, int half_bandwidth);

    int size() const { return n_; }
    int half_bandwidth() const { return hb_; }

    // j must satisfy i-hb <= j <= i.
    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * (hb_ + 1) + hb_ - (i - j)]; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * (hb_ + 1) + hb_ - (i - j)]; }
    void add(int i, int j, double v) { at(i, j) += v; }

    void factorize();  // in-place LL^T; throws SingularSystemError on breakdown
    std::vector<double> solve(const std::vector<double>& b) const;

private:
    const double* lrow(int i) const {
        // lrow(i)[k] == L(i,k) for i-hb <= k <= i
        return a_.data() + static_cast<std::size_t>(i) * (hb_ + 1) + hb_ - i;
    }
    double* lrow(int i) {
        return a_.data() + static_cast<std::size_t>(i) * (hb_ + 1) + hb_ - i;
    }

    int n_ = 0, hb_ = 0;
    bool factored_ = false;
    std::vector<double> a_;
};

}  // namespace ddtopo
