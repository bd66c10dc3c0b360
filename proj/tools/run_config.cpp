#include "run_config.hpp"

#include "flutter/format.hpp"
#include "flutter/numerics.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <vector>

namespace flutter::cli {

namespace {

class ExpressionParser {
public:
    explicit ExpressionParser(const std::string& s) : s_(s) {}

    double parse() {
        const double v = expr();
        skip_space();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw std::invalid_argument("cannot evaluate '" + s_ + "': " + why);
    }
    void skip_space() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_space();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    double expr() {
        double v = term();
        for (;;) {
            if (accept('+')) {
                v += term();
            } else if (accept('-')) {
                v -= term();
            } else {
                return v;
            }
        }
    }
    double term() {
        double v = factor();
        for (;;) {
            if (accept('*')) {
                v *= factor();
            } else if (accept('/')) {
                v /= factor();
            } else {
                return v;
            }
        }
    }
    double factor() {
        if (accept('-')) return -factor();
        if (accept('+')) return factor();
        if (accept('(')) {
            const double v = expr();
            if (!accept(')')) fail("missing ')'");
            return v;
        }
        skip_space();
        if (s_.compare(pos_, 2, "pi") == 0) {
            pos_ += 2;
            return numerics::pi;
        }
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        // Only plain decimal literals; strtod alone would take inf, nan and hex.
        if (end == begin || !(std::isdigit(static_cast<unsigned char>(*begin)) || *begin == '.')) {
            fail("expected a number");
        }
        pos_ += std::size_t(end - begin);
        return v;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_real(const std::string& value, const std::string& where) {
    try {
        const double v = eval_expression(value);
        if (!std::isfinite(v)) throw std::invalid_argument("value is not finite");
        return v;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

int parse_int(const std::string& value, const std::string& where) {
    const double v = parse_real(value, where);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(where + ": expected an integer");
    return int(v);
}

std::string show(double v) { return fmt17(v); }

struct Field {
    const char* section;
    const char* key;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define REAL_FIELD(sec, name, member)                                                        \
    Field {                                                                                  \
        sec, name,                                                                           \
            [](RunConfig& c, const std::string& v, const std::string& w) {                   \
                c.member = parse_real(v, w);                                                 \
            },                                                                               \
            [](const RunConfig& c) { return show(c.member); }                                \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        REAL_FIELD("plate", "half_width", plate.half_width),
        REAL_FIELD("plate", "poisson", plate.poisson),
        REAL_FIELD("plate", "strip_width", plate.strip_width),
        Field{"model", "gamma",
              [](RunConfig& c, const std::string& v, const std::string& w) {
                  if (v == "tnb") {
                      c.gamma_from_tnb = true;
                  } else {
                      c.gamma_from_tnb = false;
                      c.gamma = parse_real(v, w);
                  }
              },
              [](const RunConfig& c) { return c.gamma_from_tnb ? std::string("tnb") : show(c.gamma); }},
        REAL_FIELD("scan", "grid_step", scan.grid_step),
        REAL_FIELD("scan", "width_filter", scan.width_filter),
        REAL_FIELD("scan", "A_max", scan.A_max),
        REAL_FIELD("scan", "coupled_A_max", scan.coupled_A_max),
        REAL_FIELD("scan", "horizon", scan.horizon),
        REAL_FIELD("scan", "delta", scan.delta),
        REAL_FIELD("scan", "growth_ratio", scan.growth_ratio),
        Field{"scan", "workers",
              [](RunConfig& c, const std::string& v, const std::string& w) {
                  c.scan.workers = parse_int(v, w);
              },
              [](const RunConfig& c) { return std::to_string(c.scan.workers); }},
        REAL_FIELD("integrator", "rtol", integrator.rtol),
        REAL_FIELD("integrator", "atol", integrator.atol),
        REAL_FIELD("integrator", "drift_per_100", integrator.drift_per_100),
        REAL_FIELD("integrator", "coupled_max_rel_drift", integrator.coupled_max_rel_drift),
        Field{"output", "dir",
              [](RunConfig& c, const std::string& v, const std::string& w) {
                  if (v.empty()) throw ConfigError(w + ": directory must not be empty");
                  c.output.dir = v;
              },
              [](const RunConfig& c) { return c.output.dir; }},
        REAL_FIELD("output", "sample_dt", output.sample_dt),
        REAL_FIELD("tnb", "span", tnb.span),
        REAL_FIELD("tnb", "half_width", tnb.half_width),
        REAL_FIELD("tnb", "sag", tnb.sag),
        REAL_FIELD("tnb", "weight_per_length", tnb.weight_per_length),
        REAL_FIELD("tnb", "mass_density", tnb.mass_density),
        REAL_FIELD("tnb", "young", tnb.young),
        REAL_FIELD("tnb", "inertia", tnb.inertia),
        REAL_FIELD("tnb", "poisson", tnb.poisson),
    };
    return table;
}

#undef REAL_FIELD

}  // namespace

double RunConfig::resolved_gamma() const {
    return gamma_from_tnb ? derive_parameters(tnb).gamma : gamma;
}

IntegratorSettings RunConfig::integrator_settings() const {
    IntegratorSettings s;
    s.rtol = integrator.rtol;
    s.atol = integrator.atol;
    s.drift_per_100 = integrator.drift_per_100;
    return s;
}

CoupledSettings RunConfig::coupled_settings() const {
    CoupledSettings s;
    s.rtol = integrator.rtol;
    s.atol = integrator.atol;
    s.max_rel_drift = integrator.coupled_max_rel_drift;
    return s;
}

ScanOptions RunConfig::scan_options() const {
    ScanOptions o;
    o.grid_step = scan.grid_step;
    o.width_filter = scan.width_filter;
    o.A_max = scan.A_max;
    o.workers = scan.workers;
    o.integrator = integrator_settings();
    return o;
}

CoupledScanOptions RunConfig::coupled_scan_options() const {
    CoupledScanOptions o;
    o.grid_step = scan.grid_step;
    o.A_max = scan.coupled_A_max;
    o.delta = scan.delta;
    o.horizon = scan.horizon;
    o.growth_ratio = scan.growth_ratio;
    o.workers = scan.workers;
    o.integrator = coupled_settings();
    return o;
}

void RunConfig::validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ConfigError(std::string(field) + ": " + what);
    };
    try {
        plate.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("[plate]: ") + e.what());
    }
    if (!gamma_from_tnb) require(gamma > 0.0, "[model] gamma", "must be positive");
    require(scan.grid_step > 0.0, "[scan] grid_step", "must be positive");
    require(scan.width_filter >= 0.0, "[scan] width_filter", "must be non-negative");
    require(scan.A_max > 0.0, "[scan] A_max", "must be positive");
    require(scan.coupled_A_max > 0.0, "[scan] coupled_A_max", "must be positive");
    require(scan.horizon > 0.0, "[scan] horizon", "must be positive");
    require(scan.delta > 0.0, "[scan] delta", "must be positive");
    require(scan.growth_ratio > 1.0, "[scan] growth_ratio", "must exceed 1");
    require(scan.workers >= 1, "[scan] workers", "must be at least 1");
    require(integrator.rtol > 0.0, "[integrator] rtol", "must be positive");
    require(integrator.atol > 0.0, "[integrator] atol", "must be positive");
    require(integrator.drift_per_100 > 0.0, "[integrator] drift_per_100", "must be positive");
    require(integrator.coupled_max_rel_drift > 0.0, "[integrator] coupled_max_rel_drift",
            "must be positive");
    require(output.sample_dt > 0.0, "[output] sample_dt", "must be positive");
    try {
        tnb.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("[tnb]: ") + e.what());
    }
}

double eval_expression(const std::string& text) { return ExpressionParser(text).parse(); }

void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key,
                   const std::string& value, const std::string& where) {
    const std::string field = "[" + section + "] " + key;
    for (const Field& f : fields()) {
        if (section == f.section && key == f.key) {
            f.set(cfg, value, where + ": " + field);
            return;
        }
    }
    throw ConfigError(where + ": unknown field " + field);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw ConfigError("--set " + assignment + ": expected section.key=value");
    }
    apply_setting(cfg, trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
                  trim(assignment.substr(eq + 1)), "--set");
}

void parse_config(std::istream& is, const std::string& source, RunConfig& cfg) {
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        const auto comment = line.find_first_of("#;");
        const std::string text = trim(comment == std::string::npos ? line : line.substr(0, comment));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']') throw ConfigError(where + ": malformed section header");
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        if (section.empty()) throw ConfigError(where + ": key outside of any section");
        apply_setting(cfg, section, trim(text.substr(0, eq)), trim(text.substr(eq + 1)), where);
    }
}

void load_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    parse_config(in, path, cfg);
}

std::string dump_config(const RunConfig& cfg) {
    std::ostringstream os;
    std::string section;
    for (const Field& f : fields()) {
        if (section != f.section) {
            if (!section.empty()) os << '\n';
            section = f.section;
            os << '[' << section << "]\n";
        }
        os << f.key << " = " << f.get(cfg) << '\n';
    }
    return os.str();
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump_config(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace flutter::cli
