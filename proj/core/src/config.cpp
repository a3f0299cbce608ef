#include "hsfem/config.hpp"

#include "hsfem/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <cmath>
#include <limits>
#include <iomanip>
#include <sstream>

extern char** environ;

namespace hsfem {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Conversion failures carry only the reason; the caller prefixes the key.
struct BadValue {
    std::string reason;
};

double to_double(const std::string& v)
{
    double out = 0.0;
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || v.empty()) {
        throw BadValue{"expected a number, got '" + v + "'"};
    }
    return out;
}

long long to_integer(const std::string& v)
{
    long long out = 0;
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || v.empty()) {
        throw BadValue{"expected an integer, got '" + v + "'"};
    }
    return out;
}

int to_int(const std::string& v)
{
    const long long x = to_integer(v);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        throw BadValue{"integer out of range: '" + v + "'"};
    }
    return static_cast<int>(x);
}

std::size_t to_count(const std::string& v)
{
    const long long x = to_integer(v);
    if (x < 0) {
        throw BadValue{"expected a nonnegative integer, got '" + v + "'"};
    }
    return static_cast<std::size_t>(x);
}

bool to_bool(const std::string& v)
{
    const std::string l = lower(v);
    if (l == "true" || l == "1" || l == "yes" || l == "on") {
        return true;
    }
    if (l == "false" || l == "0" || l == "no" || l == "off") {
        return false;
    }
    throw BadValue{"expected a boolean, got '" + v + "'"};
}

std::vector<std::string> split(const std::string& v, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

struct KeySpec {
    std::string name;
    bool required;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<KeySpec>& key_specs()
{
    static const std::vector<KeySpec> specs = [] {
        std::vector<KeySpec> s;
        s.push_back({"x0", false, [](RunConfig& c, const std::string& v) { c.box.x0 = to_double(v); },
                     [](const RunConfig& c) { return fmt(c.box.x0); }});
        s.push_back({"x1", false, [](RunConfig& c, const std::string& v) { c.box.x1 = to_double(v); },
                     [](const RunConfig& c) { return fmt(c.box.x1); }});
        s.push_back({"y0", false, [](RunConfig& c, const std::string& v) { c.box.y0 = to_double(v); },
                     [](const RunConfig& c) { return fmt(c.box.y0); }});
        s.push_back({"y1", false, [](RunConfig& c, const std::string& v) { c.box.y1 = to_double(v); },
                     [](const RunConfig& c) { return fmt(c.box.y1); }});
        s.push_back({"nx", true, [](RunConfig& c, const std::string& v) { c.nx = to_int(v); },
                     [](const RunConfig& c) { return std::to_string(c.nx); }});
        s.push_back({"ny", true, [](RunConfig& c, const std::string& v) { c.ny = to_int(v); },
                     [](const RunConfig& c) { return std::to_string(c.ny); }});
        s.push_back({"k", true, [](RunConfig& c, const std::string& v) { c.model.k = to_int(v); },
                     [](const RunConfig& c) { return std::to_string(c.model.k); }});
        s.push_back({"nu", true, [](RunConfig& c, const std::string& v) { c.model.nu = to_double(v); },
                     [](const RunConfig& c) { return fmt(c.model.nu); }});
        s.push_back({"P_max", true, [](RunConfig& c, const std::string& v) { c.model.p_max = to_double(v); },
                     [](const RunConfig& c) { return fmt(c.model.p_max); }});
        s.push_back({"alpha", true, [](RunConfig& c, const std::string& v) { c.model.alpha = to_double(v); },
                     [](const RunConfig& c) { return fmt(c.model.alpha); }});
        s.push_back({"tau", true, [](RunConfig& c, const std::string& v) { c.model.tau = to_double(v); },
                     [](const RunConfig& c) { return fmt(c.model.tau); }});
        s.push_back({"t_final", false, [](RunConfig& c, const std::string& v) { c.model.t_final = to_double(v); },
                     [](const RunConfig& c) { return fmt(c.model.t_final); }});
        s.push_back({"nonlinear", false,
                     [](RunConfig& c, const std::string& v) { c.model.nonlinear_diffusion = to_bool(v); },
                     [](const RunConfig& c) { return std::string(c.model.nonlinear_diffusion ? "true" : "false"); }});
        s.push_back({"growth", false,
                     [](RunConfig& c, const std::string& v) {
                         const std::string l = lower(v);
                         if (l == "arctan") {
                             c.model.growth.kind = GrowthLaw::Kind::Arctan;
                         } else if (l == "table") {
                             c.model.growth.kind = GrowthLaw::Kind::Table;
                         } else if (l == "zero") {
                             c.model.growth.kind = GrowthLaw::Kind::Zero;
                         } else {
                             throw BadValue{"expected arctan, table or zero, got '" + v + "'"};
                         }
                     },
                     [](const RunConfig& c) {
                         switch (c.model.growth.kind) {
                         case GrowthLaw::Kind::Table: return std::string("table");
                         case GrowthLaw::Kind::Zero: return std::string("zero");
                         default: return std::string("arctan");
                         }
                     }});
        s.push_back({"growth_scale", false,
                     [](RunConfig& c, const std::string& v) { c.model.growth.scale = to_double(v); },
                     [](const RunConfig& c) { return fmt(c.model.growth.scale); }});
        s.push_back({"growth_slope", false,
                     [](RunConfig& c, const std::string& v) { c.model.growth.slope = to_double(v); },
                     [](const RunConfig& c) { return fmt(c.model.growth.slope); }});
        s.push_back({"growth_table", false,
                     [](RunConfig& c, const std::string& v) {
                         std::vector<std::pair<double, double>> knots;
                         for (const std::string& item : split(v, ',')) {
                             const auto colon = item.find(':');
                             if (colon == std::string::npos) {
                                 throw BadValue{"expected p:G pairs, got '" + item + "'"};
                             }
                             knots.emplace_back(to_double(trim(item.substr(0, colon))),
                                                to_double(trim(item.substr(colon + 1))));
                         }
                         c.model.growth.table = std::move(knots);
                     },
                     [](const RunConfig& c) {
                         std::string out;
                         for (const auto& [p, g] : c.model.growth.table) {
                             out += (out.empty() ? "" : ", ") + fmt(p) + ":" + fmt(g);
                         }
                         return out;
                     }});
        s.push_back({"scheme", false,
                     [](RunConfig& c, const std::string& v) {
                         const std::string l = lower(v);
                         if (l == "fem") {
                             c.scheme = Scheme::Fem;
                         } else if (l == "fem2") {
                             c.scheme = Scheme::Fem2;
                         } else {
                             throw BadValue{"expected fem or fem2, got '" + v + "'"};
                         }
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.scheme)); }});
        s.push_back({"initial", false,
                     [](RunConfig& c, const std::string& v) {
                         const std::string l = lower(v);
                         if (l == "gaussian") {
                             c.initial = InitialDatum::Gaussian;
                         } else if (l == "constant") {
                             c.initial = InitialDatum::Constant;
                         } else {
                             throw BadValue{"expected gaussian or constant, got '" + v + "'"};
                         }
                     },
                     [](const RunConfig& c) {
                         return std::string(c.initial == InitialDatum::Gaussian ? "gaussian" : "constant");
                     }});
        s.push_back({"quadrature", false,
                     [](RunConfig& c, const std::string& v) {
                         const std::string l = lower(v);
                         if (l == "vertex") {
                             c.quadrature = WeightQuadrature::Vertex;
                         } else if (l == "centroid") {
                             c.quadrature = WeightQuadrature::Centroid;
                         } else {
                             throw BadValue{"expected vertex or centroid, got '" + v + "'"};
                         }
                     },
                     [](const RunConfig& c) {
                         return std::string(c.quadrature == WeightQuadrature::Vertex ? "vertex" : "centroid");
                     }});
        s.push_back({"solver_tol", false,
                     [](RunConfig& c, const std::string& v) { c.solve.tolerance = to_double(v); },
                     [](const RunConfig& c) { return fmt(c.solve.tolerance); }});
        s.push_back({"solver_max_iter", false,
                     [](RunConfig& c, const std::string& v) { c.solve.max_iterations = to_count(v); },
                     [](const RunConfig& c) { return std::to_string(c.solve.max_iterations); }});
        s.push_back({"output_every", false,
                     [](RunConfig& c, const std::string& v) { c.output_every = to_count(v); },
                     [](const RunConfig& c) { return std::to_string(c.output_every); }});
        s.push_back({"output_times", false,
                     [](RunConfig& c, const std::string& v) {
                         c.output_times.clear();
                         for (const std::string& item : split(v, ',')) {
                             c.output_times.push_back(to_double(item));
                         }
                     },
                     [](const RunConfig& c) {
                         std::string out;
                         for (double t : c.output_times) {
                             out += (out.empty() ? "" : ", ") + fmt(t);
                         }
                         return out;
                     }});
        s.push_back({"output_format", false,
                     [](RunConfig& c, const std::string& v) {
                         const std::string l = lower(v);
                         if (l == "vtk") {
                             c.formats = {FieldFormat::Vtk};
                         } else if (l == "csv") {
                             c.formats = {FieldFormat::Csv};
                         } else if (l == "both") {
                             c.formats = {FieldFormat::Vtk, FieldFormat::Csv};
                         } else if (l == "none") {
                             c.formats.clear();
                         } else {
                             throw BadValue{"expected vtk, csv, both or none, got '" + v + "'"};
                         }
                     },
                     [](const RunConfig& c) {
                         if (c.formats.empty()) {
                             return std::string("none");
                         }
                         if (c.formats.size() == 2) {
                             return std::string("both");
                         }
                         return std::string(c.formats[0] == FieldFormat::Vtk ? "vtk" : "csv");
                     }});
        s.push_back({"series_every", false,
                     [](RunConfig& c, const std::string& v) { c.series_every = to_count(v); },
                     [](const RunConfig& c) { return std::to_string(c.series_every); }});
        s.push_back({"complementarity_every", false,
                     [](RunConfig& c, const std::string& v) { c.complementarity_every = to_count(v); },
                     [](const RunConfig& c) { return std::to_string(c.complementarity_every); }});
        s.push_back({"energy_check", false,
                     [](RunConfig& c, const std::string& v) { c.energy_check = to_bool(v); },
                     [](const RunConfig& c) { return std::string(c.energy_check ? "true" : "false"); }});
        s.push_back({"clamp_report", false,
                     [](RunConfig& c, const std::string& v) { c.clamp_report = to_bool(v); },
                     [](const RunConfig& c) { return std::string(c.clamp_report ? "true" : "false"); }});
        s.push_back({"out_dir", false, [](RunConfig& c, const std::string& v) { c.out_dir = v; },
                     [](const RunConfig& c) { return c.out_dir; }});
        return s;
    }();
    return specs;
}

const KeySpec* find_key(const std::string& name)
{
    for (const KeySpec& k : key_specs()) {
        if (k.name == name) {
            return &k;
        }
    }
    return nullptr;
}

std::string join_errors(const std::vector<std::string>& errors)
{
    std::string out = "invalid configuration:";
    for (const std::string& e : errors) {
        out += "\n  " + e;
    }
    return out;
}

void collect_constraints(const RunConfig& c, std::vector<std::string>& errors)
{
    if (!(c.box.x1 > c.box.x0)) {
        errors.push_back("x1: must exceed x0");
    }
    if (!(c.box.y1 > c.box.y0)) {
        errors.push_back("y1: must exceed y0");
    }
    if (c.nx < 1) {
        errors.push_back("nx: must be >= 1");
    }
    if (c.ny < 1) {
        errors.push_back("ny: must be >= 1");
    }
    const ModelParams& m = c.model;
    if (m.k < 2) {
        errors.push_back("k: must be an integer >= 2");
    }
    if (!(m.nu >= 0.0) || !std::isfinite(m.nu)) {
        errors.push_back("nu: must be nonnegative");
    }
    if (!(m.p_max > 0.0) || !std::isfinite(m.p_max)) {
        errors.push_back("P_max: must be positive");
    }
    if (!(m.alpha > 0.0) || !std::isfinite(m.alpha)) {
        errors.push_back("alpha: must be positive");
    }
    if (!(m.tau > 0.0) || !std::isfinite(m.tau)) {
        errors.push_back("tau: must be positive");
    }
    if (!(m.t_final >= 0.0) || !std::isfinite(m.t_final)) {
        errors.push_back("t_final: must be nonnegative");
    }
    if (m.p_max > 0.0 && m.k >= 2) {
        try {
            if (m.growth.kind == GrowthLaw::Kind::Table) {
                (void)GrowthLaw::from_table(m.growth.table);
            }
            validate_growth(m.growth, m.p_max);
        } catch (const Error& e) {
            errors.push_back(std::string("growth: ") + e.what());
        }
    }
    if (!(c.solve.tolerance > 0.0)) {
        errors.push_back("solver_tol: must be positive");
    }
    if (c.output_every == 0) {
        errors.push_back("output_every: must be > 0");
    }
    if (c.series_every == 0) {
        errors.push_back("series_every: must be > 0");
    }
    if (c.complementarity_every == 0) {
        errors.push_back("complementarity_every: must be > 0");
    }
    for (double t : c.output_times) {
        if (!(t >= 0.0)) {
            errors.push_back("output_times: times must be nonnegative");
            break;
        }
    }
    // The structured generator produces axis-aligned right triangles, which
    // satisfy the mesh requirements of both schemes.
}

} // namespace

const char* to_string(Scheme scheme) { return scheme == Scheme::Fem ? "fem" : "fem2"; }

const std::vector<std::string>& required_config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const KeySpec& k : key_specs()) {
            if (k.required) {
                out.push_back(k.name);
            }
        }
        return out;
    }();
    return keys;
}

void RunConfig::validate() const
{
    std::vector<std::string> errors;
    collect_constraints(*this, errors);
    if (!errors.empty()) {
        throw ConfigError(join_errors(errors));
    }
}

ConfigMap read_config_entries(const std::string& text)
{
    ConfigMap entries;
    std::vector<std::string> errors;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            errors.push_back("line " + std::to_string(line_no) + ": empty key");
            continue;
        }
        if (entries.contains(key)) {
            errors.push_back(key + ": duplicate key (line " + std::to_string(line_no) + ")");
            continue;
        }
        entries[key] = ConfigEntry{value, line_no};
    }
    if (!errors.empty()) {
        throw ConfigError(join_errors(errors));
    }
    return entries;
}

void apply_env_overrides(ConfigMap& entries, const std::vector<std::string>& environment)
{
    static const std::string prefix = "HSFEM_";
    for (const std::string& var : environment) {
        if (var.rfind(prefix, 0) != 0) {
            continue;
        }
        const auto eq = var.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        const std::string key = lower(var.substr(prefix.size(), eq - prefix.size()));
        for (const KeySpec& spec : key_specs()) {
            if (lower(spec.name) == key) {
                entries[spec.name] = ConfigEntry{trim(var.substr(eq + 1)), 0};
                break;
            }
        }
    }
}

std::vector<std::string> process_environment()
{
    std::vector<std::string> out;
    for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
        out.emplace_back(*e);
    }
    return out;
}

RunConfig config_from_entries(const ConfigMap& entries)
{
    RunConfig config;
    std::vector<std::string> errors;
    for (const auto& [key, entry] : entries) {
        const KeySpec* spec = find_key(key);
        if (spec == nullptr) {
            errors.push_back(key + ": unknown key" +
                             (entry.line > 0 ? " (line " + std::to_string(entry.line) + ")" : std::string()));
            continue;
        }
        try {
            spec->set(config, entry.value);
        } catch (const BadValue& bad) {
            errors.push_back(key + ": " + bad.reason);
        }
    }
    for (const std::string& key : required_config_keys()) {
        if (!entries.contains(key)) {
            errors.push_back(key + ": missing required key");
        }
    }
    if (errors.empty()) {
        collect_constraints(config, errors);
    }
    if (!errors.empty()) {
        throw ConfigError(join_errors(errors));
    }
    return config;
}

RunConfig parse_config_text(const std::string& text) { return config_from_entries(read_config_entries(text)); }

RunConfig parse_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    ConfigMap entries = read_config_entries(buffer.str());
    apply_env_overrides(entries, process_environment());
    return config_from_entries(entries);
}

std::string to_config_text(const RunConfig& config)
{
    std::string out;
    for (const KeySpec& spec : key_specs()) {
        if (spec.name == "growth_table" && config.model.growth.table.empty()) {
            continue;
        }
        if (spec.name == "output_times" && config.output_times.empty()) {
            continue;
        }
        out += spec.name + " = " + spec.get(config) + "\n";
    }
    return out;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value)
{
    const KeySpec* spec = find_key(key);
    if (spec == nullptr) {
        throw ConfigError(key + ": unknown key");
    }
    try {
        spec->set(config, value);
    } catch (const BadValue& bad) {
        throw ConfigError(key + ": " + bad.reason);
    }
}

} // namespace hsfem
