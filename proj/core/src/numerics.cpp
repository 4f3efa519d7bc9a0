#include "cylkms/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace cylkms {

double fit_log_slope(std::span<const double> n_values, std::span<const double> errors) {
    if (n_values.size() != errors.size() || n_values.size() < 2)
        throw std::invalid_argument("fit_log_slope: need at least two matching samples");
    // Least squares slope of log(error) against log(n).
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(n_values.size());
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        if (n_values[i] <= 0.0 || errors[i] <= 0.0)
            throw std::invalid_argument("fit_log_slope: samples must be positive");
        const double x = std::log(n_values[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_log_slope: degenerate abscissas");
    return (m * sxy - sx * sy) / denom;
}

AffineFit2 fit_affine2(std::span<const double> t, std::span<const double> s,
                       std::span<const complex> y) {
    if (t.size() != s.size() || t.size() != y.size() || t.size() < 3)
        throw std::invalid_argument("fit_affine2: need at least three matching samples");
    // Normal equations for y ~ a + b t + c s.  The 3x3 Gram matrix is real,
    // the right hand side is complex, so real and imaginary parts share one
    // factorization.
    double g[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    complex r[3] = {0, 0, 0};
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double row[3] = {1.0, t[i], s[i]};
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) g[a][b] += row[a] * row[b];
            r[a] += row[a] * y[i];
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 system.
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(g[perm[row]][col]) > std::abs(g[perm[pivot]][col])) pivot = row;
        std::swap(perm[col], perm[pivot]);
        const double diag = g[perm[col]][col];
        if (std::abs(diag) < 1e-300)
            throw std::invalid_argument("fit_affine2: degenerate sample layout");
        for (int row = col + 1; row < 3; ++row) {
            const double factor = g[perm[row]][col] / diag;
            for (int k = col; k < 3; ++k) g[perm[row]][k] -= factor * g[perm[col]][k];
            r[perm[row]] -= factor * r[perm[col]];
        }
    }
    complex coeff[3];
    for (int col = 2; col >= 0; --col) {
        complex acc = r[perm[col]];
        for (int k = col + 1; k < 3; ++k) acc -= g[perm[col]][k] * coeff[k];
        coeff[col] = acc / g[perm[col]][col];
    }
    AffineFit2 fit;
    fit.a = coeff[0];
    fit.b = coeff[1];
    fit.c = coeff[2];
    fit.max_residual = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double res = std::abs(y[i] - (fit.a + fit.b * t[i] + fit.c * s[i]));
        fit.max_residual = std::max(fit.max_residual, res);
    }
    return fit;
}

}  // namespace cylkms
