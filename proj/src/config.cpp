#include "qtrans/config.hpp"

#include "qtrans/error.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace qtrans {

const char* to_string(Mode m)
{
    switch (m) {
    case Mode::Spectrum: return "spectrum";
    case Mode::Colormap: return "colormap";
    case Mode::OracleCheck: return "oracle-check";
    case Mode::GmeValidate: return "gme-validate";
    case Mode::DumpCorr: return "dump-corr";
    }
    return "?";
}

const char* to_string(Format f) { return f == Format::Json ? "json" : "csv"; }

const char* to_string(Provenance p)
{
    switch (p) {
    case Provenance::Default: return "default";
    case Provenance::File: return "file";
    case Provenance::Flag: return "flag";
    }
    return "?";
}

namespace {

std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x))
        throw ConfigError(key + ": expected a finite number, got '" + v + "'");
    return x;
}

std::size_t to_count(const std::string& key, const std::string& v)
{
    char* end = nullptr;
    errno = 0;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || errno == ERANGE || x < 0)
        throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    return static_cast<std::size_t>(x);
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

Spacing to_spacing(const std::string& key, const std::string& v)
{
    if (v == "linear")
        return Spacing::Linear;
    if (v == "log")
        return Spacing::Log;
    throw ConfigError(key + ": expected linear or log, got '" + v + "'");
}

const char* spacing_name(Spacing s) { return s == Spacing::Log ? "log" : "linear"; }

struct Field {
    std::string key;
    std::string section;
    std::function<std::string(const JobConfig&)> get;
    std::function<void(JobConfig&, const std::string&)> set;
};

#define QT_DOUBLE(sec, name, member)                                                                    \
    Field{name, sec, [](const JobConfig& c) { return fmt(c.member); },                                  \
          [](JobConfig& c, const std::string& v) { c.member = to_double(name, v); }}
#define QT_COUNT(sec, name, member)                                                                     \
    Field{name, sec, [](const JobConfig& c) { return std::to_string(c.member); },                      \
          [](JobConfig& c, const std::string& v) { c.member = to_count(name, v); }}
#define QT_SPACING(sec, name, member)                                                                   \
    Field{name, sec, [](const JobConfig& c) { return std::string(spacing_name(c.member)); },            \
          [](JobConfig& c, const std::string& v) { c.member = to_spacing(name, v); }}

const std::vector<Field>& fields()
{
    static const std::vector<Field> f = {
        Field{"mode", "job", [](const JobConfig& c) { return std::string(to_string(c.mode)); },
              [](JobConfig& c, const std::string& v) {
                  for (auto m : {Mode::Spectrum, Mode::Colormap, Mode::OracleCheck, Mode::GmeValidate, Mode::DumpCorr})
                      if (v == to_string(m)) {
                          c.mode = m;
                          return;
                      }
                  throw ConfigError("mode: expected spectrum, colormap, oracle-check, gme-validate or dump-corr, got '"
                                    + v + "'");
              }},
        Field{"bath", "physics",
              [](const JobConfig& c) {
                  return std::string(c.physics.bath == BathKind::Ohmic ? "ohmic" : "structured");
              },
              [](JobConfig& c, const std::string& v) {
                  if (v == "structured")
                      c.physics.bath = BathKind::Structured;
                  else if (v == "ohmic")
                      c.physics.bath = BathKind::Ohmic;
                  else
                      throw ConfigError("bath: expected structured or ohmic, got '" + v + "'");
              }},
        QT_DOUBLE("physics", "delta", physics.delta),
        QT_DOUBLE("physics", "omega", physics.omega),
        QT_DOUBLE("physics", "g", physics.g),
        QT_DOUBLE("physics", "kappa", physics.kappa),
        QT_DOUBLE("physics", "alpha", physics.alpha),
        QT_DOUBLE("physics", "omega_c", physics.omega_c),
        QT_DOUBLE("physics", "temperature", physics.temperature),
        QT_DOUBLE("physics", "eps0", physics.eps0),
        QT_DOUBLE("physics", "eps_p", physics.eps_p),
        QT_DOUBLE("physics", "n_factor", physics.n_factor),
        QT_DOUBLE("physics", "omega_p", physics.omega_p),
        QT_DOUBLE("grid", "omega_p_min", omega_p_min),
        QT_DOUBLE("grid", "omega_p_max", omega_p_max),
        QT_COUNT("grid", "omega_p_count", omega_p_count),
        QT_SPACING("grid", "omega_p_spacing", omega_p_spacing),
        Field{"outer_axis", "grid", [](const JobConfig& c) { return std::string(to_string(c.outer_axis)); },
              [](JobConfig& c, const std::string& v) {
                  const auto a = axis_from_string(v);
                  if (!a || *a == AxisName::OmegaP)
                      throw ConfigError("outer_axis: expected omega, g, alpha, kappa or temperature, got '" + v + "'");
                  c.outer_axis = *a;
              }},
        QT_DOUBLE("grid", "outer_min", outer_min),
        QT_DOUBLE("grid", "outer_max", outer_max),
        QT_COUNT("grid", "outer_count", outer_count),
        QT_SPACING("grid", "outer_spacing", outer_spacing),
        Field{"output", "output", [](const JobConfig& c) { return c.output; },
              [](JobConfig& c, const std::string& v) { c.output = v.empty() ? "-" : v; }},
        Field{"format", "output", [](const JobConfig& c) { return std::string(to_string(c.format)); },
              [](JobConfig& c, const std::string& v) {
                  if (v == "csv")
                      c.format = Format::Csv;
                  else if (v == "json")
                      c.format = Format::Json;
                  else
                      throw ConfigError("format: expected csv or json, got '" + v + "'");
              }},
        Field{"record_timing", "output", [](const JobConfig& c) { return std::string(c.record_timing ? "true" : "false"); },
              [](JobConfig& c, const std::string& v) { c.record_timing = to_bool("record_timing", v); }},
        QT_DOUBLE("numerics", "tol_tail", tol_tail),
        QT_DOUBLE("numerics", "interp_tol", interp_tol),
        QT_DOUBLE("numerics", "kernel_tol", kernel_tol),
        QT_COUNT("numerics", "workers", workers),
        QT_DOUBLE("gme", "gme_eps_ratio", gme_eps_ratio),
        Field{"gme_trajectory", "gme", [](const JobConfig& c) { return c.gme_trajectory; },
              [](JobConfig& c, const std::string& v) { c.gme_trajectory = v; }},
    };
    return f;
}

#undef QT_DOUBLE
#undef QT_COUNT
#undef QT_SPACING

const Field* find_field(const std::string& key)
{
    for (const auto& f : fields())
        if (f.key == key)
            return &f;
    return nullptr;
}

std::size_t edit_distance(const std::string& a, const std::string& b)
{
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
        prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

void assign(JobConfig& cfg, const std::string& key, const std::string& value, Provenance prov)
{
    const Field* f = find_field(key);
    if (!f)
        throw ConfigError("unknown key '" + key + "'; did you mean '" + nearest_key(key) + "'?");
    f->set(cfg, value);
    cfg.provenance[key] = prov;
}

void check_ranges(const JobConfig& cfg)
{
    if (!(cfg.tol_tail > 0.0 && cfg.tol_tail < 1.0))
        throw ConfigError("tol_tail must lie in (0, 1)");
    if (!(cfg.interp_tol > 0.0))
        throw ConfigError("interp_tol must be > 0");
    if (!(cfg.kernel_tol > 0.0))
        throw ConfigError("kernel_tol must be > 0");
    if (!(cfg.gme_eps_ratio > 0.0 && cfg.gme_eps_ratio <= 0.1))
        throw ConfigError("gme_eps_ratio must lie in (0, 0.1] (weak probe, eps_p <= 0.1 omega_p)");
    if (cfg.omega_p_count < 1)
        throw ConfigError("omega_p_count must be >= 1");
    if (cfg.mode == Mode::Colormap) {
        if (cfg.omega_p_count < 2 || cfg.outer_count < 2)
            throw ConfigError("colormap axes need omega_p_count >= 2 and outer_count >= 2");
    }
    try {
        cfg.grid().validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

} // namespace

SweepGrid JobConfig::grid() const
{
    SweepGrid g;
    g.fixed = physics;
    const Axis probe{AxisName::OmegaP, omega_p_min, omega_p_max, omega_p_count, omega_p_spacing};
    if (mode == Mode::Spectrum) {
        g.axes.push_back(probe);
    } else if (mode == Mode::Colormap) {
        g.axes.push_back(Axis{outer_axis, outer_min, outer_max, outer_count, outer_spacing});
        g.axes.push_back(probe);
    }
    return g;
}

TabulateOptions JobConfig::tabulate_options() const
{
    TabulateOptions t;
    t.tol_tail = tol_tail;
    t.interp_tol = interp_tol;
    return t;
}

KernelOptions JobConfig::kernel_options() const
{
    KernelOptions k;
    k.abs_tol = kernel_tol;
    return k;
}

SweepOptions JobConfig::sweep_options() const
{
    SweepOptions o;
    o.workers = workers;
    o.tabulate = tabulate_options();
    o.kernel = kernel_options();
    return o;
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields())
            k.push_back(f.key);
        return k;
    }();
    return keys;
}

std::string nearest_key(const std::string& key)
{
    std::string best;
    std::size_t best_d = SIZE_MAX;
    for (const auto& f : fields()) {
        const std::size_t d = edit_distance(key, f.key);
        if (d < best_d) {
            best_d = d;
            best = f.key;
        }
    }
    return best;
}

JobConfig parse_config_text(const std::string& text, const std::vector<std::pair<std::string, std::string>>& flags)
{
    JobConfig cfg;
    for (const auto& f : fields())
        cfg.provenance[f.key] = Provenance::Default;

    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"job", "physics", "grid", "output", "numerics", "gme"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known))
                throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const Field* f = find_field(key);
        if (f && !section.empty() && f->section != section)
            throw ConfigError("line " + std::to_string(lineno) + ": key '" + key + "' belongs in [" + f->section
                              + "], not [" + section + "]");
        try {
            assign(cfg, key, value, Provenance::File);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    for (const auto& [k, v] : flags)
        assign(cfg, k, v, Provenance::Flag);
    check_ranges(cfg);
    return cfg;
}

JobConfig parse_config(const std::string& file, const std::vector<std::pair<std::string, std::string>>& flags)
{
    std::string text;
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in)
            throw IoError("cannot read config file: " + file);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return parse_config_text(text, flags);
}

std::string config_value(const JobConfig& cfg, const std::string& key)
{
    const Field* f = find_field(key);
    if (!f)
        throw ConfigError("unknown key '" + key + "'; did you mean '" + nearest_key(key) + "'?");
    return f->get(cfg);
}

void echo_config(const JobConfig& cfg, std::ostream& os)
{
    for (const auto& f : fields()) {
        const auto it = cfg.provenance.find(f.key);
        const Provenance p = it == cfg.provenance.end() ? Provenance::Default : it->second;
        os << "# " << f.key << " = " << f.get(cfg) << "  (" << to_string(p) << ")\n";
    }
}

} // namespace qtrans
