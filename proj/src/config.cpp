// config.cpp: key-value parsing and canonical emission

#include "qhe/config.hpp"

#include "qhe/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace qhe {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(trim(cur));
    return parts;
}

std::string shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double to_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    return v;
}

std::uint64_t to_u64(const std::string& s) {
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("not an unsigned integer: '" + s + "'");
    }
    return v;
}

std::optional<double> to_optional(const std::string& s) {
    if (s == "auto" || s == "none") return std::nullopt;
    return to_double(s);
}

std::string from_optional(const std::optional<double>& v) {
    return v ? shortest(*v) : std::string("auto");
}

std::array<LevelPair, 3> to_levels(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 3) throw std::invalid_argument("expected three a:b level pairs");
    std::array<LevelPair, 3> out;
    for (std::size_t k = 0; k < 3; ++k) {
        const auto ab = split(parts[k], ':');
        if (ab.size() != 2) throw std::invalid_argument("level '" + parts[k] + "' is not a:b");
        out[k] = {to_double(ab[0]), to_double(ab[1])};
    }
    return out;
}

std::string from_levels(const std::array<LevelPair, 3>& levels) {
    std::string s;
    for (std::size_t k = 0; k < 3; ++k) {
        if (k) s += ", ";
        s += shortest(levels[k].first) + ":" + shortest(levels[k].second);
    }
    return s;
}

Axis to_axis(const std::string& name, const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw std::invalid_argument("expected min:max:count");
    Axis a{name, to_double(parts[0]), to_double(parts[1]), static_cast<std::size_t>(to_u64(parts[2]))};
    if (a.count < 1) throw std::invalid_argument("axis count must be >= 1");
    if (a.max < a.min) throw std::invalid_argument("axis max must be >= min");
    return a;
}

std::string from_axis(const Axis& a) {
    return shortest(a.min) + ":" + shortest(a.max) + ":" + std::to_string(a.count);
}

using Setter = std::function<void(RunConfig&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Key {
    const char* name;
    Setter set;
    Getter get;
};

Key spec_key(const char* name, double EngineSpec::*member) {
    return {name,
            [member](RunConfig& c, const std::string& v) { c.spec.*member = to_double(v); },
            [member](const RunConfig& c) { return shortest(c.spec.*member); }};
}

Key bath_key(const char* name, double BathSpec::*member) {
    return {name,
            [member](RunConfig& c, const std::string& v) { c.baths.*member = to_double(v); },
            [member](const RunConfig& c) { return shortest(c.baths.*member); }};
}

Key levels_key(const char* name, std::array<LevelPair, 3> FactorLevels::*member) {
    return {name,
            [member](RunConfig& c, const std::string& v) { c.levels.*member = to_levels(v); },
            [member](const RunConfig& c) { return from_levels(c.levels.*member); }};
}

const std::vector<Key>& keys() {
    static const std::vector<Key> table = [] {
        std::vector<Key> k;
        k.push_back({"version",
                     [](RunConfig&, const std::string& v) {
                         if (to_u64(v) != kConfigVersion) {
                             throw std::invalid_argument("unsupported config version " + v);
                         }
                     },
                     [](const RunConfig&) { return std::to_string(kConfigVersion); }});
        k.push_back({"engine",
                     [](RunConfig& c, const std::string& v) { c.engine = parse_engine(v); },
                     [](const RunConfig& c) { return std::string(to_string(c.engine)); }});
        k.push_back(spec_key("omega10", &EngineSpec::omega10));
        k.push_back(spec_key("omega20", &EngineSpec::omega20));
        k.push_back(spec_key("lam", &EngineSpec::lam));
        k.push_back({"drive_freq",
                     [](RunConfig& c, const std::string& v) { c.spec.drive_freq = to_optional(v); },
                     [](const RunConfig& c) { return from_optional(c.spec.drive_freq); }});
        k.push_back(bath_key("beta_c", &BathSpec::beta_c));
        k.push_back(bath_key("beta_h", &BathSpec::beta_h));
        k.push_back(bath_key("g_c_res", &BathSpec::g_c_res));
        k.push_back(bath_key("g_h_res", &BathSpec::g_h_res));
        k.push_back(bath_key("g_c_det", &BathSpec::g_c_det));
        k.push_back(bath_key("g_h_det", &BathSpec::g_h_det));
        k.push_back(levels_key("levels.delta_beta", &FactorLevels::delta_beta));
        k.push_back(levels_key("levels.resonant", &FactorLevels::resonant));
        k.push_back(levels_key("levels.detuning", &FactorLevels::detuning));
        k.push_back({"grid.omega20",
                     [](RunConfig& c, const std::string& v) { c.grid.omega20 = to_axis("omega20", v); },
                     [](const RunConfig& c) { return from_axis(c.grid.omega20); }});
        k.push_back({"grid.lam",
                     [](RunConfig& c, const std::string& v) { c.grid.lam = to_axis("lam", v); },
                     [](const RunConfig& c) { return from_axis(c.grid.lam); }});
        k.push_back({"closure.mode",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "eq2") c.closure.mode = ClosureMode::Eq2Structural;
                         else if (v == "fixed") c.closure.mode = ClosureMode::FixedRate;
                         else throw std::invalid_argument("closure.mode must be eq2|fixed");
                     },
                     [](const RunConfig& c) {
                         return std::string(c.closure.mode == ClosureMode::FixedRate ? "fixed" : "eq2");
                     }});
        k.push_back({"closure.gw_fixed",
                     [](RunConfig& c, const std::string& v) { c.closure.gw_fixed = to_optional(v); },
                     [](const RunConfig& c) { return from_optional(c.closure.gw_fixed); }});
        k.push_back({"closure.width_G",
                     [](RunConfig& c, const std::string& v) { c.closure.width_G = to_optional(v); },
                     [](const RunConfig& c) { return from_optional(c.closure.width_G); }});
        k.push_back({"observables",
                     [](RunConfig& c, const std::string& v) {
                         c.observables.clear();
                         if (v == "auto") return;
                         for (const auto& name : split(v, ',')) {
                             c.observables.push_back(parse_observable(name));
                         }
                     },
                     [](const RunConfig& c) {
                         if (c.observables.empty()) return std::string("auto");
                         std::string s;
                         for (std::size_t i = 0; i < c.observables.size(); ++i) {
                             if (i) s += ",";
                             s += to_string(c.observables[i]);
                         }
                         return s;
                     }});
        k.push_back({"fixture",
                     [](RunConfig& c, const std::string& v) { c.fixture = v == "none" ? "" : v; },
                     [](const RunConfig& c) { return c.fixture.empty() ? std::string("none") : c.fixture; }});
        k.push_back({"out",
                     [](RunConfig& c, const std::string& v) { c.out_dir = v; },
                     [](const RunConfig& c) { return c.out_dir; }});
        k.push_back({"format",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "csv") c.format = OutputFormat::Csv;
                         else if (v == "json") c.format = OutputFormat::Json;
                         else throw std::invalid_argument("format must be csv|json");
                     },
                     [](const RunConfig& c) {
                         return std::string(c.format == OutputFormat::Json ? "json" : "csv");
                     }});
        k.push_back({"seed",
                     [](RunConfig& c, const std::string& v) { c.seed = to_u64(v); },
                     [](const RunConfig& c) { return std::to_string(c.seed); }});
        return k;
    }();
    return table;
}

} // namespace

RunConfig parse_config(std::string_view text, const std::string& source) {
    RunConfig config;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;

        auto fail = [&](const std::string& why) {
            throw Error(ErrorKind::InvalidConfig,
                        source + ":" + std::to_string(line_no) + ": " + why);
        };
        const auto eq = body.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));

        const auto& table = keys();
        const auto it = std::find_if(table.begin(), table.end(),
                                     [&](const Key& k) { return key == k.name; });
        if (it == table.end()) fail("unknown key '" + key + "'");
        if (!seen.insert(key).second) fail("duplicate key '" + key + "'");
        try {
            it->set(config, value);
        } catch (const std::exception& e) {
            fail("key '" + key + "': " + e.what());
        }
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidConfig, "cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string emit_config(const RunConfig& config) {
    std::string out = "# qhe run configuration\n";
    for (const auto& k : keys()) {
        out += k.name;
        out += " = ";
        out += k.get(config);
        out += '\n';
    }
    return out;
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : emit_config(config)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

EngineSettings engine_settings(const RunConfig& config) {
    EngineSettings s;
    s.engine = config.engine;
    s.omega10 = config.spec.omega10;
    s.drive_freq = config.spec.drive_freq;
    s.closure = config.closure;
    return s;
}

void apply_grid_flag(RunConfig& config, const std::string& value) {
    const auto x = value.find_first_of("xX");
    try {
        if (x == std::string::npos) throw std::invalid_argument("missing 'x'");
        const auto n = to_u64(value.substr(0, x));
        const auto m = to_u64(value.substr(x + 1));
        if (n < 1 || m < 1) throw std::invalid_argument("counts must be >= 1");
        config.grid.omega20.count = n;
        config.grid.lam.count = m;
    } catch (const std::exception& e) {
        throw Error(ErrorKind::InvalidConfig, "--grid '" + value + "': expected NxM (" + e.what() + ")");
    }
}

std::vector<Observable> effective_observables(const RunConfig& config) {
    if (!config.observables.empty()) return config.observables;
    if (config.engine == EngineKind::Gkls) {
        return {Observable::Power, Observable::Efficiency, Observable::Efficacy,
                Observable::Sigma, Observable::InvEtaNd, Observable::Mode};
    }
    return {Observable::Power, Observable::Efficiency, Observable::Efficacy, Observable::Sigma};
}

} // namespace qhe
