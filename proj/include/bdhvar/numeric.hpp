#pragma once

// Small numeric utilities shared across the library: compensated (Neumaier)
// summation for long accumulations and a dense least-squares solver for the
// low-dimensional fits used when extracting asymptotic constants.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bdhvar {

// Neumaier variant of Kahan summation.  Error is O(eps) independent of the
// number of terms, which keeps 1e6-term log sums well below 1e-9 relative.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct LeastSquaresFit {
    std::vector<double> coeff;       // fitted coefficients, one per column
    std::vector<double> std_error;   // standard errors (residual-based)
    double rss = 0.0;                // residual sum of squares
    double max_abs_residual = 0.0;
    double r2 = 0.0;
};

// Ordinary least squares of y against the given columns (normal equations;
// fine for the 1-3 column designs used here).
inline LeastSquaresFit least_squares(const std::vector<std::vector<double>>& cols,
                                     const std::vector<double>& y) {
    const std::size_t k = cols.size();
    const std::size_t n = y.size();
    if (k == 0 || n < k) throw std::invalid_argument("least_squares: underdetermined system");
    for (const auto& c : cols)
        if (c.size() != n) throw std::invalid_argument("least_squares: ragged design matrix");

    // Normal equations G beta = b with G = X^T X.
    std::vector<double> G(k * k, 0.0), b(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t r = 0; r < n; ++r) G[i * k + j] += cols[i][r] * cols[j][r];
        for (std::size_t r = 0; r < n; ++r) b[i] += cols[i][r] * y[r];
    }

    // Invert G by Gauss-Jordan (k <= 3); keep the inverse for the covariance.
    std::vector<double> inv(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) inv[i * k + i] = 1.0;
    std::vector<double> a = G;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(a[r * k + col]) > std::abs(a[piv * k + col])) piv = r;
        if (a[piv * k + col] == 0.0) throw std::runtime_error("least_squares: singular design");
        if (piv != col)
            for (std::size_t c = 0; c < k; ++c) {
                std::swap(a[piv * k + c], a[col * k + c]);
                std::swap(inv[piv * k + c], inv[col * k + c]);
            }
        double d = a[col * k + col];
        for (std::size_t c = 0; c < k; ++c) {
            a[col * k + c] /= d;
            inv[col * k + c] /= d;
        }
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            double f = a[r * k + col];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < k; ++c) {
                a[r * k + c] -= f * a[col * k + c];
                inv[r * k + c] -= f * inv[col * k + c];
            }
        }
    }

    LeastSquaresFit fit;
    fit.coeff.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) fit.coeff[i] += inv[i * k + j] * b[j];

    double ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= static_cast<double>(n);
    double tss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double pred = 0.0;
        for (std::size_t i = 0; i < k; ++i) pred += fit.coeff[i] * cols[i][r];
        double res = y[r] - pred;
        fit.rss += res * res;
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(res));
        tss += (y[r] - ybar) * (y[r] - ybar);
    }
    fit.r2 = (tss > 0.0) ? 1.0 - fit.rss / tss : 1.0;

    fit.std_error.assign(k, 0.0);
    if (n > k) {
        double s2 = fit.rss / static_cast<double>(n - k);
        for (std::size_t i = 0; i < k; ++i) fit.std_error[i] = std::sqrt(s2 * inv[i * k + i]);
    }
    return fit;
}

}  // namespace bdhvar
