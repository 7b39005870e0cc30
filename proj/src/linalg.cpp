#include "ddtopo/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "ddtopo/common.hpp"

namespace ddtopo {

namespace {
constexpr int kTile = 64;

void check_mul(int ak, int bk, const char* what) {
    if (ak != bk) throw std::invalid_argument(std::string("matmul shape mismatch: ") + what);
}
}  // namespace

namespace {

// C[i0..i1) x [j0..j1) += A(:, l) * B(l, :) over l in [0, k), with the A
// factor supplied through `aval(l, i)`. (j-tile, l, i) order keeps the C
// tile cache-resident and streams each B row once; rows are handled four at
// a time so one B load feeds four FMAs. Plain axpy loops, so strict FP
// ordering still vectorizes.
template <typename AVal>
void gemm_tiles(Matrix& C, const Matrix& B, int m, int k, const AVal& aval) {
    const int n = C.cols;
    const int jt = (n + kTile - 1) / kTile;
    parallel_for(static_cast<std::size_t>(jt), [&](std::size_t t) {
        const int j0 = static_cast<int>(t) * kTile;
        const int j1 = std::min(n, j0 + kTile);
        for (int l = 0; l < k; ++l) {
            const double* bl = B.row(l);
            int i = 0;
            for (; i + 4 <= m; i += 4) {
                const double a0 = aval(l, i), a1 = aval(l, i + 1);
                const double a2 = aval(l, i + 2), a3 = aval(l, i + 3);
                double* c0 = C.row(i);
                double* c1 = C.row(i + 1);
                double* c2 = C.row(i + 2);
                double* c3 = C.row(i + 3);
                for (int j = j0; j < j1; ++j) {
                    const double b = bl[j];
                    c0[j] += a0 * b;
                    c1[j] += a1 * b;
                    c2[j] += a2 * b;
                    c3[j] += a3 * b;
                }
            }
            for (; i < m; ++i) {
                const double av = aval(l, i);
                double* ci = C.row(i);
                for (int j = j0; j < j1; ++j) ci[j] += av * bl[j];
            }
        }
    });
}

}  // namespace

Matrix matmul_nn(const Matrix& A, const Matrix& B) {
    check_mul(A.cols, B.rows, "nn");
    Matrix C(A.rows, B.cols);
    gemm_tiles(C, B, A.rows, A.cols, [&](int l, int i) { return A.row(i)[l]; });
    return C;
}

Matrix transposed(const Matrix& A) {
    Matrix At(A.cols, A.rows);
    for (int i = 0; i < A.rows; ++i) {
        const double* ai = A.row(i);
        for (int j = 0; j < A.cols; ++j) At(j, i) = ai[j];
    }
    return At;
}

Matrix matmul_nt(const Matrix& A, const Matrix& B) {
    check_mul(A.cols, B.cols, "nt");
    // transpose the smaller factor so the hot loop is the same
    // vector-friendly axpy form as matmul_nn (dot-product loops cannot
    // vectorize under strict FP ordering)
    if (A.a.size() < B.a.size()) return transposed(matmul_nt(B, A));
    return matmul_nn(A, transposed(B));
}

Matrix matmul_tn(const Matrix& A, const Matrix& B) {
    check_mul(A.rows, B.rows, "tn");
    Matrix C(A.cols, B.cols);
    gemm_tiles(C, B, A.cols, A.rows, [&](int l, int i) { return A.row(l)[i]; });
    return C;
}

BandedSpd::BandedSpd(int n, int half_bandwidth)
    : n_(n), hb_(half_bandwidth),
      a_(static_cast<std::size_t>(n) * (half_bandwidth + 1), 0.0) {
    if (n < 1 || half_bandwidth < 0) throw std::invalid_argument("BandedSpd: bad shape");
}

void BandedSpd::factorize() {
    double max_diag = 0.0;
    for (int i = 0; i < n_; ++i) max_diag = std::max(max_diag, at(i, i));
    const double tiny = max_diag * 1e-14 + 1e-300;

    for (int j = 0; j < n_; ++j) {
        const int lo_j = std::max(0, j - hb_);
        double* Lj = lrow(j);
        double d = Lj[j];
        for (int k = lo_j; k < j; ++k) d -= Lj[k] * Lj[k];
        if (!(d > tiny)) throw SingularSystemError("banded Cholesky: non-positive pivot");
        const double ljj = std::sqrt(d);
        Lj[j] = ljj;
        const int iend = std::min(n_ - 1, j + hb_);
        for (int i = j + 1; i <= iend; ++i) {
            double* Li = lrow(i);
            const int lo = std::max(lo_j, i - hb_);
            double s = Li[j];
            for (int k = lo; k < j; ++k) s -= Li[k] * Lj[k];
            Li[j] = s / ljj;
        }
    }
    factored_ = true;
}

std::vector<double> BandedSpd::solve(const std::vector<double>& b) const {
    if (!factored_) throw std::logic_error("BandedSpd::solve before factorize");
    if (static_cast<int>(b.size()) != n_) throw std::invalid_argument("BandedSpd::solve: size");
    std::vector<double> y(b);
    for (int i = 0; i < n_; ++i) {
        const double* Li = lrow(i);
        const int lo = std::max(0, i - hb_);
        double s = y[i];
        for (int k = lo; k < i; ++k) s -= Li[k] * y[k];
        y[i] = s / Li[i];
    }
    for (int j = n_ - 1; j >= 0; --j) {
        const int iend = std::min(n_ - 1, j + hb_);
        double s = y[j];
        for (int i = j + 1; i <= iend; ++i) s -= lrow(i)[j] * y[i];
        y[j] = s / lrow(j)[j];
    }
    return y;
}

}  // namespace ddtopo
