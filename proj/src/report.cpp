#include "qtrans/report.hpp"

#include "qtrans/error.hpp"
#include "qtrans/version.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>

namespace qtrans {

namespace {

using nlohmann::json;

std::string fmt12(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

bool swept(const SweepGrid& g, AxisName a)
{
    for (const auto& ax : g.axes)
        if (ax.name == a)
            return true;
    return false;
}

FixedParams row_params(const SweepGrid& g, const SweepRow& row)
{
    FixedParams f = g.fixed;
    for (std::size_t i = 0; i < g.axes.size() && i < row.axis_values.size(); ++i) {
        const double v = row.axis_values[i];
        switch (g.axes[i].name) {
        case AxisName::Omega: f.omega = v; break;
        case AxisName::OmegaP: f.omega_p = v; break;
        case AxisName::G: f.g = v; break;
        case AxisName::Alpha: f.alpha = v; break;
        case AxisName::Kappa: f.kappa = v; break;
        case AxisName::Temperature: f.temperature = v; break;
        }
    }
    return f;
}

// Parameter columns ahead of alpha.
std::vector<AxisName> param_columns(const SweepGrid& g)
{
    std::vector<AxisName> cols;
    if (g.fixed.bath == BathKind::Structured)
        cols = {AxisName::Omega, AxisName::OmegaP, AxisName::G};
    else
        cols = {AxisName::OmegaP};
    for (auto a : {AxisName::Kappa, AxisName::Temperature})
        if (swept(g, a))
            cols.push_back(a);
    return cols;
}

double param_value(const FixedParams& f, AxisName a)
{
    switch (a) {
    case AxisName::Omega: return f.omega;
    case AxisName::OmegaP: return f.omega_p;
    case AxisName::G: return f.g;
    case AxisName::Alpha: return f.alpha;
    case AxisName::Kappa: return f.kappa;
    case AxisName::Temperature: return f.temperature;
    }
    return 0.0;
}

std::vector<double> row_values(const SweepGrid& g, const std::vector<AxisName>& cols, const SweepRow& row)
{
    const FixedParams f = row_params(g, row);
    std::vector<double> v;
    for (auto a : cols)
        v.push_back(param_value(f, a));
    v.push_back(row.alpha);
    v.push_back(row.transmission.real());
    v.push_back(row.transmission.imag());
    v.push_back(row.t_abs2);
    return v;
}

json fixed_json(const FixedParams& f)
{
    json j;
    j["bath"] = f.bath == BathKind::Ohmic ? "ohmic" : "structured";
    j["delta"] = f.delta;
    if (f.bath == BathKind::Structured) {
        j["omega"] = f.omega;
        j["g"] = f.g;
        j["kappa"] = f.kappa;
    } else {
        j["alpha"] = f.alpha;
        j["omega_c"] = f.omega_c;
    }
    j["temperature"] = f.temperature;
    j["eps0"] = f.eps0;
    j["eps_p"] = f.eps_p;
    j["n_factor"] = f.n_factor;
    j["omega_p"] = f.omega_p;
    return j;
}

} // namespace

std::vector<std::string> result_columns(const SweepGrid& grid)
{
    std::vector<std::string> cols;
    for (auto a : param_columns(grid))
        cols.emplace_back(to_string(a));
    for (const char* c : {"alpha", "T_re", "T_im", "T_abs2"})
        cols.emplace_back(c);
    return cols;
}

void write_csv(const SweepResult& res, std::ostream& os)
{
    const auto cols = param_columns(res.grid);
    for (const auto& c : result_columns(res.grid))
        os << c << ',';
    os << "valid\n";
    const std::size_t n_param = cols.size() + 1; // + alpha
    for (const auto& row : res.rows) {
        const auto v = row_values(res.grid, cols, row);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i >= n_param && !row.valid)
                os << "nan,";
            else
                os << fmt12(v[i]) << ',';
        }
        os << (row.valid ? 1 : 0) << '\n';
    }
}

void write_json(const SweepResult& res, std::ostream& os, bool record_timing)
{
    const auto cols = param_columns(res.grid);
    const std::size_t n_param = cols.size() + 1;

    json meta;
    meta["version"] = QTRANS_VERSION;
    meta["parameters"] = fixed_json(res.grid.fixed);
    json axes = json::array();
    for (const auto& a : res.grid.axes)
        axes.push_back({{"name", to_string(a.name)},
                        {"min", a.min},
                        {"max", a.max},
                        {"count", a.count},
                        {"spacing", a.spacing == Spacing::Log ? "log" : "linear"}});
    meta["axes"] = axes;
    meta["tolerances"] = {{"tol_tail", res.meta.tol_tail},
                          {"interp_tol", res.meta.interp_tol},
                          {"kernel_tol", res.meta.kernel_tol},
                          {"dip_prominence", res.meta.dip_prominence}};
    meta["tables"] = res.meta.tables;
    if (record_timing) {
        meta["wall_seconds"] = res.meta.wall_seconds;
        meta["workers"] = res.meta.workers;
    }

    json rows = json::array();
    for (const auto& row : res.rows) {
        const auto v = row_values(res.grid, cols, row);
        json r = json::array();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i >= n_param && !row.valid)
                r.push_back(nullptr);
            else
                r.push_back(v[i]);
        }
        r.push_back(row.valid);
        rows.push_back(std::move(r));
    }

    json errors = json::array();
    for (std::size_t i = 0; i < res.rows.size(); ++i)
        if (!res.rows[i].valid)
            errors.push_back({{"row", i}, {"error", res.rows[i].error}});

    json dips = json::array();
    for (const auto& ld : res.dips) {
        json list = json::array();
        for (const auto& d : ld.dips)
            list.push_back({{"center", d.center},
                            {"value", d.value},
                            {"depth", d.depth},
                            {"prominence", d.prominence},
                            {"width", d.width}});
        dips.push_back({{"outer", ld.outer_value}, {"dips", list}});
    }

    auto cols_json = result_columns(res.grid);
    cols_json.emplace_back("valid");
    json out;
    out["metadata"] = meta;
    out["columns"] = cols_json;
    out["rows"] = rows;
    out["errors"] = errors;
    out["dips"] = dips;
    os << out.dump(1) << '\n';
}

void with_output(const std::string& path, const std::function<void(std::ostream&)>& body)
{
    if (path == "-") {
        body(std::cout);
        std::cout.flush();
        if (!std::cout)
            throw IoError("write to stdout failed");
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open output file for writing: " + path);
    body(out);
    out.close();
    if (!out)
        throw IoError("write failed: " + path);
}

void emit_result(const SweepResult& res, const std::string& path, const EmitOptions& opt)
{
    with_output(path, [&](std::ostream& os) {
        if (opt.format == Format::Json)
            write_json(res, os, opt.record_timing);
        else
            write_csv(res, os);
    });
}

std::vector<JsonRow> read_json_rows(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read result file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("malformed result file " + path + ": " + e.what());
    }
    std::vector<JsonRow> out;
    for (const auto& r : j.at("rows")) {
        JsonRow row;
        for (std::size_t i = 0; i + 1 < r.size(); ++i)
            row.values.push_back(r[i].is_null() ? std::nan("") : r[i].get<double>());
        row.valid = r.back().get<bool>();
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace qtrans
