#pragma once

// Test-only reference computations. Nothing here calls into the library.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// Composite Simpson rule with `n` (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 != 0) {
        ++n;
    }
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

inline double gauss_density(double x, double variance = 1.0) {
    return std::exp(-0.5 * x * x / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

/// Upper standard-normal tail by quadrature of the density over [x, x + 40].
inline double gauss_tail(double x) {
    return simpson([](double t) { return gauss_density(t); }, x, x + 40.0, 400000);
}

/// Inverse of gauss_tail by bisection.
inline double gauss_tail_inverse(double p) {
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gauss_tail(mid) > p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// erf by its Maclaurin series (adequate for |x| <= 3).
inline double erf_series(double x) {
    double term = x;
    double sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -x * x / n;
        sum += term / (2 * n + 1);
    }
    return 2.0 / std::sqrt(std::numbers::pi) * sum;
}

using Mat4 = std::array<std::array<double, 4>, 4>;

inline double det3(const Mat4& m, int skip_row, int skip_col) {
    double s[3][3];
    for (int r = 0, rr = 0; r < 4; ++r) {
        if (r == skip_row) continue;
        for (int c = 0, cc = 0; c < 4; ++c) {
            if (c == skip_col) continue;
            s[rr][cc++] = m[r][c];
        }
        ++rr;
    }
    return s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[2][1]) - s[0][1] * (s[1][0] * s[2][2] - s[1][2] * s[2][0]) +
           s[0][2] * (s[1][0] * s[2][1] - s[1][1] * s[2][0]);
}

/// Explicit inverse through the adjugate.
inline Mat4 cofactor_inverse(const Mat4& m) {
    double det = 0.0;
    for (int c = 0; c < 4; ++c) {
        det += ((c % 2 == 0) ? 1.0 : -1.0) * m[0][c] * det3(m, 0, c);
    }
    Mat4 inv{};
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            inv[c][r] = (((r + c) % 2 == 0) ? 1.0 : -1.0) * det3(m, r, c) / det;
        }
    }
    return inv;
}

/// Rows [cos el cos az, cos el sin az, -sin el, 1] from degrees.
inline std::vector<std::array<double, 4>> h_rows(const std::vector<std::pair<double, double>>& el_az_deg) {
    std::vector<std::array<double, 4>> rows;
    for (auto [el, az] : el_az_deg) {
        const double e = el * std::numbers::pi / 180.0;
        const double a = az * std::numbers::pi / 180.0;
        rows.push_back({std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), -std::sin(e), 1.0});
    }
    return rows;
}

/// (H' W H)^-1 with W = diag(weights); zero weight drops a row.
inline Mat4 weighted_covariance(const std::vector<std::array<double, 4>>& h, const std::vector<double>& weights) {
    Mat4 normal{};
    for (std::size_t i = 0; i < h.size(); ++i) {
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                normal[r][c] += h[i][r] * weights[i] * h[i][c];
            }
        }
    }
    return cofactor_inverse(normal);
}

/// Solution matrix (H' W H)^-1 H' W as 4 x N.
inline std::vector<std::array<double, 4>> solution_columns(const std::vector<std::array<double, 4>>& h,
                                                          const std::vector<double>& weights) {
    const Mat4 p = weighted_covariance(h, weights);
    std::vector<std::array<double, 4>> cols(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        for (int r = 0; r < 4; ++r) {
            double v = 0.0;
            for (int c = 0; c < 4; ++c) {
                v += p[r][c] * h[i][c];
            }
            cols[i][r] = v * weights[i];
        }
    }
    return cols;
}

/// Density of a x0 + w with x0 ~ N(0, px) truncated to [-q, q], w ~ N(0, qv),
/// by direct quadrature of the convolution integral.
inline double convolution_pdf(double x1, double a, double qv, double px, double q, double p_out_0) {
    const double qy = a * q;
    auto integrand = [&](double y) { return gauss_density(y, a * a * px) * gauss_density(x1 - y, qv); };
    return simpson(integrand, -qy, qy, 20000) / (1.0 - p_out_0);
}

/// P(|a x0 + w| > q | |x0| <= q) by quadrature over x0.
inline double pout1_quadrature(double a, double qv, double px, double q, double p_out_0) {
    const double sw = std::sqrt(qv);
    auto integrand = [&](double x0) {
        const double hi = 0.5 * std::erfc((q - a * x0) / sw / std::numbers::sqrt2);
        const double lo = 0.5 * std::erfc((q + a * x0) / sw / std::numbers::sqrt2);
        return gauss_density(x0, px) * (hi + lo);
    };
    return simpson(integrand, -q, q, 200000) / (1.0 - p_out_0);
}

}  // namespace oracle
