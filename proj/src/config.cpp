#include "pdw/config.hpp"
#include "pdw/errors.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pdw {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& src, int line, const std::string& msg) {
    std::ostringstream os;
    os << src << ":" << line << ": " << msg;
    throw ConfigError(os.str());
}

double parse_number(const std::string& src, int line, const std::string& v) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) fail(src, line, "trailing characters after number '" + v + "'");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(src, line, "expected a number, got '" + v + "'");
    }
}

long parse_integer(const std::string& src, int line, const std::string& v) {
    double x = parse_number(src, line, v);
    if (x != std::floor(x)) fail(src, line, "expected an integer, got '" + v + "'");
    return long(x);
}

bool parse_bool(const std::string& src, int line, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    fail(src, line, "expected true or false, got '" + v + "'");
}

std::string parse_string(const std::string& src, int line, const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        return v.substr(1, v.size() - 2);
    for (char c : v)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
            c != '.' && c != '/')
            fail(src, line, "string value must be quoted: '" + v + "'");
    return v;
}

std::vector<double> parse_list(const std::string& src, int line, const std::string& v) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        fail(src, line, "expected a [..] list, got '" + v + "'");
    std::vector<double> out;
    std::string inner = v.substr(1, v.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(src, line, "empty element in list");
        out.push_back(parse_number(src, line, item));
    }
    return out;
}

} // namespace

RunConfig parse_config_text(const std::string& text, const std::string& src) {
    RunConfig c;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        // Strip comments; quoted values in this format never contain '#'.
        std::size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) fail(src, line, "expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key.empty()) fail(src, line, "missing key");
        if (val.empty()) fail(src, line, "missing value for '" + key + "'");

        auto num = [&] { return parse_number(src, line, val); };
        auto integer = [&] { return parse_integer(src, line, val); };

        if (key == "family") c.family = parse_string(src, line, val);
        else if (key == "period") c.period = num();
        else if (key == "b0") c.b0 = num();
        else if (key == "amp") c.amp = num();
        else if (key == "phase") c.phase = num();
        else if (key == "lo") c.lo = num();
        else if (key == "hi") c.hi = num();
        else if (key == "duty") c.duty = num();
        else if (key == "fourier_cos") c.fourier_cos = parse_list(src, line, val);
        else if (key == "fourier_sin") c.fourier_sin = parse_list(src, line, val);
        else if (key == "rtol") c.rtol = num();
        else if (key == "atol") c.atol = num();
        else if (key == "max_step") c.max_step = num();
        else if (key == "freq_max") c.freq_max = num();
        else if (key == "scan_points") c.scan_points = int(integer());
        else if (key == "t_points") c.t_points = int(integer());
        else if (key == "xi_points") c.xi_points = int(integer());
        else if (key == "spec_k_lo") c.spec_k_lo = num();
        else if (key == "spec_k_hi") c.spec_k_hi = num();
        else if (key == "spec_k_count") c.spec_k_count = int(integer());
        else if (key == "dimension") c.dimension = int(integer());
        else if (key == "u1_amplitude") c.u1_amplitude = num();
        else if (key == "u1_power") c.u1_power = num();
        else if (key == "u2_amplitude") c.u2_amplitude = num();
        else if (key == "u2_power") c.u2_power = num();
        else if (key == "grid_k_min") c.grid_k_min = num();
        else if (key == "grid_panels") c.grid_panels = int(integer());
        else if (key == "slope_t_lo") c.slope_t_lo = num();
        else if (key == "slope_t_hi") c.slope_t_hi = num();
        else if (key == "slope_samples") c.slope_samples = int(integer());
        else if (key == "tail_t_max") c.tail_t_max = num();
        else if (key == "tail_samples") c.tail_samples = int(integer());
        else if (key == "threads") c.threads = int(integer());
        else if (key == "seed") c.seed = std::uint64_t(integer());
        else if (key == "out_dir") c.out_dir = parse_string(src, line, val);
        else if (key == "json") c.json = parse_bool(src, line, val);
        else fail(src, line, "unknown key '" + key + "'");
    }

    if (c.family != "constant" && c.family != "sinusoid" && c.family != "square_wave" &&
        c.family != "fourier")
        throw ConfigError(src + ": unknown family '" + c.family + "'");
    if (!(c.period > 0.0)) throw ConfigError(src + ": period must be positive");
    if (!(c.rtol > 0.0) || !(c.atol > 0.0))
        throw ConfigError(src + ": tolerances must be positive");
    if (c.scan_points < 16) throw ConfigError(src + ": scan_points too small");
    if (c.t_points < 4 || c.xi_points < 4) throw ConfigError(src + ": zone grid too small");
    if (c.dimension < 1) throw ConfigError(src + ": dimension must be >= 1");
    if (c.threads < 1) throw ConfigError(src + ": threads must be >= 1");
    if (c.spec_k_count < 2 || !(c.spec_k_lo > 0.0) || !(c.spec_k_hi > c.spec_k_lo))
        throw ConfigError(src + ": bad spectrum window");
    if (!(c.grid_k_min > 0.0) || c.grid_panels < 1)
        throw ConfigError(src + ": bad radial grid");
    if (c.slope_samples < 8 || !(c.slope_t_hi > c.slope_t_lo) || !(c.slope_t_lo > 0.0))
        throw ConfigError(src + ": bad slope window");
    if (c.tail_samples < 8 || !(c.tail_t_max > 0.0))
        throw ConfigError(src + ": bad tail window");
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

DissipationProfile RunConfig::make_profile() const {
    try {
        if (family == "constant") return DissipationProfile::constant(b0, period);
        if (family == "sinusoid") return DissipationProfile::sinusoid(b0, amp, phase, period);
        if (family == "square_wave")
            return DissipationProfile::square_wave(lo, hi, duty, period);
        return DissipationProfile::fourier(b0, fourier_cos, fourier_sin, period);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("profile: ") + e.what());
    }
}

IntegratorOptions RunConfig::make_integrator() const {
    IntegratorOptions o;
    o.rtol = rtol;
    o.atol = atol;
    o.max_step = max_step;
    return o;
}

RadialData RunConfig::make_data() const {
    RadialData d;
    d.dimension = dimension;
    d.u1 = {u1_amplitude, resolved_u1_power()};
    d.u2 = {u2_amplitude, u2_power};
    return d;
}

double RunConfig::resolved_u1_power() const {
    return std::isnan(u1_power) ? -0.5 * double(dimension) : u1_power;
}

std::vector<double> RunConfig::slope_times() const {
    std::vector<double> ts(static_cast<std::size_t>(slope_samples));
    double l0 = std::log(1.0), l1 = std::log(slope_t_hi);
    for (int i = 0; i < slope_samples; ++i)
        ts[std::size_t(i)] =
            std::exp(l0 + (l1 - l0) * double(i) / double(slope_samples - 1));
    return ts;
}

std::vector<double> RunConfig::tail_times() const {
    std::vector<double> ts(static_cast<std::size_t>(tail_samples));
    for (int i = 0; i < tail_samples; ++i)
        ts[std::size_t(i)] = tail_t_max * double(i) / double(tail_samples - 1);
    return ts;
}

} // namespace pdw
