#pragma once

// Globally adaptive Gauss-Kronrod (7, 15) quadrature for vector-valued
// integrands. The integration range is given as a list of panels; the
// panel with the largest error estimate is bisected until the summed
// error meets the tolerance. Oscillatory integrands are handled by
// passing half-period panels.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace qtrans::quad {

template <std::size_t N>
using Vec = std::array<double, N>;

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    std::size_t max_intervals = 200000;
};

template <std::size_t N>
struct Result {
    Vec<N> value{};
    Vec<N> error{};
    std::size_t intervals = 0;
    std::size_t evaluations = 0;
    bool converged = false;

    double max_error() const { return *std::max_element(error.begin(), error.end()); }
};

namespace detail {

inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
// Gauss weights for the nodes xgk[1], xgk[3], xgk[5], xgk[7].
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

template <std::size_t N>
struct Panel {
    double a;
    double b;
    Vec<N> value;
    Vec<N> error;
    double norm_error;

    bool operator<(const Panel& o) const { return norm_error < o.norm_error; }
};

} // namespace detail

/// One Gauss-Kronrod 15-point rule on [a, b], with the QUADPACK error
/// estimate applied per component.
template <std::size_t N, class F>
void gk15(const F& f, double a, double b, Vec<N>& value, Vec<N>& error)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    Vec<N> fv[15];
    fv[7] = f(center);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * detail::xgk[j];
        fv[j] = f(center - dx);
        fv[14 - j] = f(center + dx);
    }

    for (std::size_t c = 0; c < N; ++c) {
        double kron = detail::wgk[7] * fv[7][c];
        double gauss = detail::wg[3] * fv[7][c];
        for (int j = 0; j < 7; ++j) {
            const double s = fv[j][c] + fv[14 - j][c];
            kron += detail::wgk[j] * s;
            if (j % 2 == 1)
                gauss += detail::wg[j / 2] * s;
        }
        const double mean = 0.5 * kron;
        double asc = detail::wgk[7] * std::abs(fv[7][c] - mean);
        for (int j = 0; j < 7; ++j)
            asc += detail::wgk[j] * (std::abs(fv[j][c] - mean) + std::abs(fv[14 - j][c] - mean));
        asc *= std::abs(half);

        double err = std::abs((kron - gauss) * half);
        if (asc != 0.0 && err != 0.0)
            err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
        value[c] = kron * half;
        error[c] = err;
    }
}

/// Integrate f over the union of consecutive panels given by `breaks`
/// (strictly increasing, at least two entries).
template <std::size_t N, class F>
Result<N> integrate_panels(const F& f, std::span<const double> breaks, const Options& opt)
{
    using P = detail::Panel<N>;
    Result<N> res;
    if (breaks.size() < 2) {
        res.converged = true;
        return res;
    }

    auto make = [&](double a, double b) {
        P p{a, b, {}, {}, 0.0};
        gk15<N>(f, a, b, p.value, p.error);
        p.norm_error = *std::max_element(p.error.begin(), p.error.end());
        res.evaluations += 15;
        return p;
    };

    std::vector<P> storage;
    storage.reserve(breaks.size() - 1);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        storage.push_back(make(breaks[i], breaks[i + 1]));
    std::priority_queue<P> heap(std::less<P>{}, std::move(storage));

    auto totals = [&](Vec<N>& value, Vec<N>& error) {
        value.fill(0.0);
        error.fill(0.0);
        auto copy = heap;
        while (!copy.empty()) {
            const P& p = copy.top();
            for (std::size_t c = 0; c < N; ++c) {
                value[c] += p.value[c];
                error[c] += p.error[c];
            }
            copy.pop();
        }
    };

    // Running sums are refreshed periodically to limit drift.
    Vec<N> value{}, error{};
    totals(value, error);
    std::size_t since_refresh = 0;

    auto satisfied = [&]() {
        for (std::size_t c = 0; c < N; ++c) {
            const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(value[c]));
            if (error[c] > tol)
                return false;
        }
        return true;
    };

    while (!satisfied()) {
        if (heap.size() >= opt.max_intervals)
            break;
        const P worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            break;
        heap.pop();
        const P left = make(worst.a, mid);
        const P right = make(mid, worst.b);
        for (std::size_t c = 0; c < N; ++c) {
            value[c] += left.value[c] + right.value[c] - worst.value[c];
            error[c] += left.error[c] + right.error[c] - worst.error[c];
        }
        heap.push(left);
        heap.push(right);
        if (++since_refresh == 256) {
            totals(value, error);
            since_refresh = 0;
        }
    }

    totals(value, error);
    res.value = value;
    res.error = error;
    res.intervals = heap.size();
    res.converged = satisfied();
    return res;
}

template <std::size_t N, class F>
Result<N> integrate(const F& f, double a, double b, const Options& opt)
{
    const double br[2] = {a, b};
    return integrate_panels<N>(f, std::span<const double>(br, 2), opt);
}

/// Breakpoints a, a + L, a + 2L, ..., b with the last panel shortened.
inline std::vector<double> uniform_breaks(double a, double b, double panel)
{
    std::vector<double> br;
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / panel - 1e-12));
    br.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        br.push_back(a + static_cast<double>(i) * panel);
    br.push_back(b);
    if (br.size() == 1)
        br.insert(br.begin(), a);
    return br;
}

} // namespace qtrans::quad
