#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace keyhole {

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
double gauss_kronrod_15(const F& f, double a, double b, double& err) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[static_cast<std::size_t>(i)];
        const double pair = f(centre - dx) + f(centre + dx);
        kronrod += kKronrodWeights[static_cast<std::size_t>(i)] * pair;
        if (i % 2 == 1) gauss += kGaussWeights[static_cast<std::size_t>(i / 2)] * pair;
    }
    err = std::abs((kronrod - gauss) * half);
    return kronrod * half;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b]. Intervals are bisected
/// until each meets its share of abs_tol; an interval reaching max_depth is
/// accepted as is and the result is flagged as not converged.
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b, double abs_tol,
                                    int max_depth = 40) {
    QuadratureResult out;
    if (a == b) return out;
    struct Interval {
        double lo, hi;
        int depth;
    };
    const double total_width = std::abs(b - a);
    std::vector<Interval> stack{{a, b, 0}};
    while (!stack.empty()) {
        const Interval iv = stack.back();
        stack.pop_back();
        double err = 0.0;
        const double value = detail::gauss_kronrod_15(f, iv.lo, iv.hi, err);
        out.evaluations += 15;
        const double share = abs_tol * std::abs(iv.hi - iv.lo) / total_width;
        if (err <= share || iv.depth >= max_depth) {
            if (err > share) out.converged = false;
            out.value += value;
            out.abs_error += err;
            continue;
        }
        const double mid = 0.5 * (iv.lo + iv.hi);
        stack.push_back({mid, iv.hi, iv.depth + 1});
        stack.push_back({iv.lo, mid, iv.depth + 1});
    }
    if (!std::isfinite(out.value)) out.converged = false;
    return out;
}

}  // namespace keyhole
