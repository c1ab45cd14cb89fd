#pragma once

// Job configuration: defaults, an INI-style file and --key value flags,
// resolved in that order of increasing precedence.

#include "qtrans/bathcorr.hpp"
#include "qtrans/niba.hpp"
#include "qtrans/sweep.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace qtrans {

enum class Mode { Spectrum, Colormap, OracleCheck, GmeValidate, DumpCorr };
enum class Format { Csv, Json };
enum class Provenance { Default, File, Flag };

const char* to_string(Mode m);
const char* to_string(Format f);
const char* to_string(Provenance p);

struct JobConfig {
    Mode mode = Mode::Spectrum;

    FixedParams physics; // structured bath, omega 1.2, g 0.2, kappa 0.05, T 1, n 0.1

    double omega_p_min = 0.6;
    double omega_p_max = 1.6;
    std::size_t omega_p_count = 200;
    Spacing omega_p_spacing = Spacing::Linear;

    AxisName outer_axis = AxisName::Omega;
    double outer_min = 0.5;
    double outer_max = 1.5;
    std::size_t outer_count = 100;
    Spacing outer_spacing = Spacing::Linear;

    std::string output = "-";
    Format format = Format::Csv;
    bool record_timing = false;

    double tol_tail = 1e-10;
    double interp_tol = 1e-8;
    double kernel_tol = 1e-9;
    std::size_t workers = 0;

    double gme_eps_ratio = 0.01;
    std::string gme_trajectory; // optional CSV of P(t)

    std::map<std::string, Provenance> provenance;

    SweepGrid grid() const;     // spectrum: omega_p only; colormap: outer x omega_p
    SweepOptions sweep_options() const;
    TabulateOptions tabulate_options() const;
    KernelOptions kernel_options() const;
};

/// Every recognised key, in echo order.
const std::vector<std::string>& config_keys();

/// Closest known key by edit distance.
std::string nearest_key(const std::string& key);

/// file: path of an INI file or empty; flags: key -> value from the command line.
/// Throws ConfigError on unknown keys, unparsable values or violated invariants.
JobConfig parse_config(const std::string& file, const std::vector<std::pair<std::string, std::string>>& flags);

JobConfig parse_config_text(const std::string& text, const std::vector<std::pair<std::string, std::string>>& flags);

std::string config_value(const JobConfig& cfg, const std::string& key);

/// One "key = value  (provenance)" line per field.
void echo_config(const JobConfig& cfg, std::ostream& os);

} // namespace qtrans
