#include "qtrans/sweep.hpp"

#include "qtrans/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <set>
#include <thread>
#include <tuple>

namespace qtrans {

const char* to_string(AxisName a)
{
    switch (a) {
    case AxisName::Omega: return "omega";
    case AxisName::OmegaP: return "omega_p";
    case AxisName::G: return "g";
    case AxisName::Alpha: return "alpha";
    case AxisName::Kappa: return "kappa";
    case AxisName::Temperature: return "temperature";
    }
    return "?";
}

std::optional<AxisName> axis_from_string(std::string_view s)
{
    for (auto a : {AxisName::Omega, AxisName::OmegaP, AxisName::G, AxisName::Alpha, AxisName::Kappa,
                   AxisName::Temperature})
        if (s == to_string(a))
            return a;
    return std::nullopt;
}

std::vector<double> Axis::values() const
{
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = min;
        return v;
    }
    const double last = static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / last;
        if (spacing == Spacing::Log)
            v[i] = min * std::pow(max / min, f);
        else
            v[i] = min + (max - min) * f;
    }
    v.back() = max;
    return v;
}

namespace {

void check_axis(const Axis& a, BathKind bath)
{
    const std::string n = to_string(a.name);
    if (a.count < 1)
        throw ParameterError("axis " + n + ": count must be >= 1");
    if (a.count > 1 && !(a.max > a.min))
        throw ParameterError("axis " + n + ": max must exceed min");
    if (a.spacing == Spacing::Log && !(a.min > 0.0))
        throw ParameterError("axis " + n + ": log spacing needs min > 0");
    const double lo = a.min;
    const double hi = a.count > 1 ? a.max : a.min;
    switch (a.name) {
    case AxisName::Omega:
    case AxisName::OmegaP:
    case AxisName::Temperature:
        if (!(lo > 0.0))
            throw ParameterError("axis " + n + ": values must be > 0");
        break;
    case AxisName::G:
    case AxisName::Alpha:
        if (!(lo >= 0.0))
            throw ParameterError("axis " + n + ": values must be >= 0");
        break;
    case AxisName::Kappa:
        if (!(lo >= 0.0) || !(hi < kKappaBound))
            throw ParameterError("axis kappa: values must satisfy 0 <= kappa < 1/pi ~ 0.3183");
        break;
    }
    const bool structured_only = a.name == AxisName::Omega || a.name == AxisName::G || a.name == AxisName::Kappa;
    if (bath == BathKind::Structured && a.name == AxisName::Alpha)
        throw ParameterError("axis alpha applies to the Ohmic bath; the structured alpha follows from omega, g, kappa");
    if (bath == BathKind::Ohmic && structured_only)
        throw ParameterError("axis " + n + " applies to the structured (resonator) bath only");
}

using TableKey = std::tuple<int, double, double, double, double>;

TableKey key_of(const BathSpec& b, double temperature)
{
    if (const auto* s = std::get_if<StructuredEffective>(&b))
        return {0, s->alpha, s->omega, s->gamma, temperature};
    const auto& o = std::get<OhmicExpCutoff>(b);
    return {1, o.alpha, o.omega_c, 0.0, temperature};
}

template <class F>
void parallel_for(std::size_t n, std::size_t workers, const F& fn)
{
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++)
                fn(i);
        });
}

} // namespace

void SweepGrid::validate() const
{
    if (axes.size() > 2)
        throw ParameterError("a sweep job has at most two axes");
    std::set<AxisName> seen;
    for (const auto& a : axes) {
        check_axis(a, fixed.bath);
        if (!seen.insert(a.name).second)
            throw ParameterError(std::string("axis ") + to_string(a.name) + " listed twice");
    }
    SystemParams{fixed.delta, fixed.eps0, fixed.eps_p, fixed.n_factor}.validate();
    if (fixed.bath == BathKind::Structured) {
        ResonatorParams{fixed.omega, fixed.g, fixed.kappa}.validate();
    } else {
        qtrans::validate(BathSpec{OhmicExpCutoff{fixed.alpha, fixed.omega_c}});
    }
    (void)Thermal{fixed.temperature};
    if (!(fixed.omega_p > 0.0))
        throw ParameterError("omega_p must be > 0");
}

std::size_t SweepGrid::size() const
{
    std::size_t n = 1;
    for (const auto& a : axes)
        n *= a.count;
    return n;
}

PointParams resolve_point(const FixedParams& fixed, std::span<const AxisName> names, std::span<const double> values)
{
    FixedParams f = fixed;
    for (std::size_t i = 0; i < names.size(); ++i) {
        switch (names[i]) {
        case AxisName::Omega: f.omega = values[i]; break;
        case AxisName::OmegaP: f.omega_p = values[i]; break;
        case AxisName::G: f.g = values[i]; break;
        case AxisName::Alpha: f.alpha = values[i]; break;
        case AxisName::Kappa: f.kappa = values[i]; break;
        case AxisName::Temperature: f.temperature = values[i]; break;
        }
    }
    PointParams p;
    p.sys = SystemParams{f.delta, f.eps0, f.eps_p, f.n_factor};
    p.sys.validate();
    if (f.bath == BathKind::Structured)
        p.bath = effective_bath(ResonatorParams{f.omega, f.g, f.kappa});
    else
        p.bath = OhmicExpCutoff{f.alpha, f.omega_c};
    validate(p.bath);
    p.temperature = Thermal(f.temperature).temperature();
    if (!(f.omega_p > 0.0))
        throw ParameterError("omega_p must be > 0");
    p.omega_p = f.omega_p;
    return p;
}

std::size_t default_workers()
{
    if (const char* env = std::getenv("QTRANS_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0)
            return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult run_sweep(const SweepGrid& grid, const SweepOptions& opt)
{
    grid.validate();
    const auto start = std::chrono::steady_clock::now();

    SweepResult res;
    res.grid = grid;
    const std::size_t workers = opt.workers ? opt.workers : default_workers();

    std::vector<AxisName> names;
    std::vector<std::vector<double>> axis_values;
    double omega_p_max = grid.fixed.omega_p;
    for (const auto& a : grid.axes) {
        names.push_back(a.name);
        axis_values.push_back(a.values());
        if (a.name == AxisName::OmegaP)
            omega_p_max = std::max(omega_p_max, axis_values.back().back());
    }
    TabulateOptions tab_opt = opt.tabulate;
    tab_opt.omega_p_max = std::max(tab_opt.omega_p_max, omega_p_max);

    const std::size_t n = grid.size();
    res.rows.resize(n);
    std::vector<std::optional<PointParams>> params(n);
    std::vector<std::size_t> table_of(n, 0);
    std::map<TableKey, std::size_t> keys;
    std::vector<std::pair<BathSpec, double>> table_specs;

    for (std::size_t i = 0; i < n; ++i) {
        auto& row = res.rows[i];
        row.axis_values.resize(names.size());
        std::size_t rem = i;
        for (std::size_t k = names.size(); k-- > 0;) {
            row.axis_values[k] = axis_values[k][rem % axis_values[k].size()];
            rem /= axis_values[k].size();
        }
        try {
            params[i] = resolve_point(grid.fixed, names, row.axis_values);
            row.alpha = coupling_alpha(params[i]->bath);
            const auto key = key_of(params[i]->bath, params[i]->temperature);
            auto [it, inserted] = keys.emplace(key, table_specs.size());
            if (inserted)
                table_specs.emplace_back(params[i]->bath, params[i]->temperature);
            table_of[i] = it->second;
        } catch (const std::exception& e) {
            row.valid = false;
            row.error = e.what();
        }
    }

    std::vector<std::shared_ptr<const CorrTable>> tables(table_specs.size());
    std::vector<std::string> table_errors(table_specs.size());
    if (opt.cache_tables) {
        parallel_for(table_specs.size(), workers, [&](std::size_t k) {
            try {
                tables[k] = std::make_shared<const CorrTable>(
                    tabulate(table_specs[k].first, Thermal(table_specs[k].second), tab_opt));
            } catch (const std::exception& e) {
                table_errors[k] = e.what();
            }
        });
    }

    parallel_for(n, workers, [&](std::size_t i) {
        auto& row = res.rows[i];
        if (!params[i])
            return;
        try {
            std::shared_ptr<const CorrTable> table;
            if (opt.cache_tables) {
                const std::size_t k = table_of[i];
                if (!tables[k])
                    throw NumericError(table_errors[k]);
                table = tables[k];
            } else {
                table = std::make_shared<const CorrTable>(
                    tabulate(params[i]->bath, Thermal(params[i]->temperature), tab_opt));
            }
            const KernelFunctions kf(table, params[i]->sys.delta);
            const ComplexResponse r = probe_response(kf, params[i]->sys, params[i]->omega_p, opt.kernel);
            row.transmission = r.transmission;
            row.t_abs2 = r.t_abs2;
        } catch (const std::exception& e) {
            row.valid = false;
            row.error = e.what();
        }
    });

    // Dip detection along omega_p line cuts.
    const auto probe = std::find(names.begin(), names.end(), AxisName::OmegaP);
    if (probe != names.end()) {
        const std::size_t pa = static_cast<std::size_t>(probe - names.begin());
        const std::size_t np = axis_values[pa].size();
        if (np >= kMinDipPoints) {
            const std::size_t other = names.size() == 2 ? 1 - pa : pa;
            const std::size_t lines = names.size() == 2 ? axis_values[other].size() : 1;
            for (std::size_t l = 0; l < lines; ++l) {
                std::vector<double> x, y;
                for (std::size_t j = 0; j < np; ++j) {
                    const std::size_t idx = names.size() == 2 ? (pa == 1 ? l * np + j : j * lines + l) : j;
                    if (res.rows[idx].valid) {
                        x.push_back(axis_values[pa][j]);
                        y.push_back(res.rows[idx].t_abs2);
                    }
                }
                LineDips ld;
                ld.outer_value = names.size() == 2 ? axis_values[other][l] : 0.0;
                if (x.size() >= kMinDipPoints)
                    ld.dips = detect_dips(x, y, opt.dip_prominence);
                res.dips.push_back(std::move(ld));
            }
        }
    }

    res.meta.tol_tail = tab_opt.tol_tail;
    res.meta.interp_tol = tab_opt.interp_tol;
    res.meta.kernel_tol = opt.kernel.abs_tol;
    res.meta.dip_prominence = opt.dip_prominence;
    res.meta.workers = workers;
    res.meta.tables = table_specs.size();
    res.meta.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

namespace {

// Vertex of the parabola through three points.
void parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2, double& xv, double& yv)
{
    const double d01 = x0 - x1, d02 = x0 - x2, d12 = x1 - x2;
    const double a = (y0 / (d01 * d02)) - (y1 / (d01 * d12)) + (y2 / (d02 * d12));
    if (!(a > 0.0)) {
        xv = x1;
        yv = y1;
        return;
    }
    // First derivative of the Lagrange form set to zero.
    const double b = -(y0 * (x1 + x2) / (d01 * d02)) + (y1 * (x0 + x2) / (d01 * d12)) - (y2 * (x0 + x1) / (d02 * d12));
    xv = std::clamp(-b / (2.0 * a), x0, x2);
    const double l0 = (xv - x1) * (xv - x2) / (d01 * d02);
    const double l1 = -(xv - x0) * (xv - x2) / (d01 * d12);
    const double l2 = (xv - x0) * (xv - x1) / (d02 * d12);
    yv = y0 * l0 + y1 * l1 + y2 * l2;
}

} // namespace

std::vector<Dip> detect_dips(std::span<const double> x, std::span<const double> y, double min_prominence)
{
    if (x.size() != y.size())
        throw ParameterError("detect_dips: x and y differ in length");
    if (x.size() < kMinDipPoints)
        throw ParameterError("detect_dips needs at least 32 points per line cut");
    const std::size_t n = y.size();
    std::vector<Dip> out;

    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(y[i] < y[i - 1])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && y[j + 1] == y[i])
            ++j;
        if (j + 1 >= n || !(y[j + 1] > y[i])) {
            i = j + 1;
            continue;
        }

        const double base = y[i];
        double left_max = base;
        for (std::size_t k = i; k-- > 0;) {
            if (y[k] < base)
                break;
            left_max = std::max(left_max, y[k]);
        }
        double right_max = base;
        for (std::size_t k = j + 1; k < n; ++k) {
            if (y[k] < base)
                break;
            right_max = std::max(right_max, y[k]);
        }
        const double prominence = std::min(left_max, right_max) - base;

        if (prominence >= min_prominence) {
            Dip d;
            d.prominence = prominence;
            if (j == i)
                parabola_vertex(x[i - 1], y[i - 1], x[i], y[i], x[i + 1], y[i + 1], d.center, d.value);
            else {
                d.center = x[i];
                d.value = y[i];
            }
            d.depth = 1.0 - d.value;

            const double level = base + 0.5 * prominence;
            double xl = x.front();
            for (std::size_t k = i; k-- > 0;) {
                if (y[k] >= level) {
                    xl = x[k] + (level - y[k]) * (x[k + 1] - x[k]) / (y[k + 1] - y[k]);
                    break;
                }
            }
            double xr = x.back();
            for (std::size_t k = j + 1; k < n; ++k) {
                if (y[k] >= level) {
                    xr = x[k - 1] + (level - y[k - 1]) * (x[k] - x[k - 1]) / (y[k] - y[k - 1]);
                    break;
                }
            }
            d.width = xr - xl;
            out.push_back(d);
        }
        i = j + 1;
    }
    return out;
}

} // namespace qtrans
