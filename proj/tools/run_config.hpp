#pragma once

// Resolved run configuration of the command-line tool: INI-style parsing with
// line diagnostics, dotted overrides, canonical dump and its hash.

#include "flutter/coupled.hpp"
#include "flutter/duffing.hpp"
#include "flutter/hill.hpp"
#include "flutter/plate_spectrum.hpp"
#include "flutter/tnb.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace flutter::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScanConfig {
    double grid_step = 0.01;
    double width_filter = 0.2;
    double A_max = 20.0;           // decoupled scans
    double coupled_A_max = 10.0;   // coupled scans
    double horizon = 300.0;
    double delta = 5e-4;
    double growth_ratio = 50.0;
    int workers = 1;
};

struct IntegratorConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    double drift_per_100 = 1e-8;
    double coupled_max_rel_drift = 1e-6;
};

struct OutputConfig {
    std::string dir = "-";   // "-" writes every table to stdout
    double sample_dt = 0.05;
};

struct RunConfig {
    PlateConfig plate = PlateConfig::tnb();
    bool gamma_from_tnb = false;
    double gamma = 5.17e-4;
    ScanConfig scan;
    IntegratorConfig integrator;
    OutputConfig output;
    TnbInputs tnb;

    double resolved_gamma() const;
    IntegratorSettings integrator_settings() const;
    CoupledSettings coupled_settings() const;
    ScanOptions scan_options() const;
    CoupledScanOptions coupled_scan_options() const;
    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Evaluates numbers combined with + - * / parentheses, unary signs and the
/// constant pi, e.g. "pi/150" or "853.44/150". Throws std::invalid_argument.
double eval_expression(const std::string& text);

/// Sets one field; where prefixes error messages.
void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key,
                   const std::string& value, const std::string& where);

/// "section.key=value".
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Updates cfg from "[section]" headers and "key = value" lines; '#' and ';'
/// start comments. Errors report source:line and the field.
void parse_config(std::istream& is, const std::string& source, RunConfig& cfg);
void load_config_file(const std::string& path, RunConfig& cfg);

/// Canonical INI text of every field with 17 significant digits.
std::string dump_config(const RunConfig& cfg);

/// 64-bit FNV-1a of dump_config as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace flutter::cli
