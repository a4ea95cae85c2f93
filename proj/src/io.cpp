// io.cpp: artifact serialization

#include "qhe/io.hpp"

#include "qhe/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace qhe {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

double round_sig9(double v) {
    if (!std::isfinite(v)) return v;
    const std::string s = format_number(v);
    double out = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

namespace {

json num(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return round_sig9(v);
}

double num(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw Error(ErrorKind::Io, "unexpected number string '" + s + "'");
    }
    return j.get<double>();
}

bool same_number(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

Factor parse_factor(const std::string& s) {
    for (Factor f : kFactors) {
        if (s == to_string(f)) return f;
    }
    throw Error(ErrorKind::Io, "unknown factor '" + s + "'");
}

Metric parse_metric(const std::string& s) {
    for (Metric m : kMetrics) {
        if (s == to_string(m)) return m;
    }
    throw Error(ErrorKind::Io, "unknown metric '" + s + "'");
}

json axis_json(const Axis& a) {
    return {{"name", a.name}, {"min", num(a.min)}, {"max", num(a.max)}, {"count", a.count}};
}

Axis axis_from(const json& j) {
    return {j.at("name").get<std::string>(), num(j.at("min")), num(j.at("max")),
            j.at("count").get<std::size_t>()};
}

json optional_level(const std::optional<int>& level) {
    return level ? json(*level) : json(nullptr);
}

std::optional<int> optional_level(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<int>();
}

std::string level_text(const std::optional<int>& level) {
    return level ? level_name(*level) : "any";
}

} // namespace

SweepArtifact make_sweep_artifact(const SweepGrid& sweep, Observable obs) {
    SweepArtifact a;
    a.grid = sweep.grid;
    a.observable = obs;
    a.meta = sweep.meta;
    a.values.reserve(sweep.cells.size());
    for (const auto& cell : sweep.cells) {
        a.values.push_back(round_sig9(value_of(cell, obs)));
    }
    return a;
}

bool same_artifact(const SweepArtifact& a, const SweepArtifact& b) {
    if (!(a.grid == b.grid) || a.observable != b.observable || a.values.size() != b.values.size() ||
        a.meta.engine != b.meta.engine || a.meta.config_hash != b.meta.config_hash ||
        a.meta.version != b.meta.version) {
        return false;
    }
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        if (!same_number(a.values[k], b.values[k])) return false;
    }
    return true;
}

std::string sweep_csv(const SweepArtifact& a) {
    std::string out = a.grid.omega20.name + "," + a.grid.lam.name + "," + to_string(a.observable) + "\n";
    for (std::size_t i = 0; i < a.grid.omega20.count; ++i) {
        const std::string x = format_number(a.grid.omega20.value(i));
        for (std::size_t j = 0; j < a.grid.lam.count; ++j) {
            out += x;
            out += ',';
            out += format_number(a.grid.lam.value(j));
            out += ',';
            out += format_number(a.values[a.grid.index(i, j)]);
            out += '\n';
        }
    }
    return out;
}

json sweep_to_json(const SweepArtifact& a) {
    json values = json::array();
    for (double v : a.values) values.push_back(num(v));
    return {
        {"metadata", {{"engine", a.meta.engine}, {"config_hash", a.meta.config_hash}, {"version", a.meta.version}}},
        {"axes", json::array({axis_json(a.grid.omega20), axis_json(a.grid.lam)})},
        {"observable", to_string(a.observable)},
        {"values", values},
    };
}

SweepArtifact sweep_from_json(const json& j) {
    SweepArtifact a;
    const auto& meta = j.at("metadata");
    a.meta = {meta.at("engine").get<std::string>(), meta.at("config_hash").get<std::string>(),
              meta.at("version").get<std::string>()};
    const auto& axes = j.at("axes");
    if (axes.size() != 2) throw Error(ErrorKind::ShapeMismatch, "sweep must have two axes");
    a.grid.omega20 = axis_from(axes[0]);
    a.grid.lam = axis_from(axes[1]);
    a.observable = parse_observable(j.at("observable").get<std::string>());
    for (const auto& v : j.at("values")) a.values.push_back(num(v));
    if (a.values.size() != a.grid.size()) {
        throw Error(ErrorKind::ShapeMismatch, "sweep value count does not match its axes");
    }
    return a;
}

std::vector<MetricRow> parse_fixture(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    bool header = false;
    std::vector<MetricRow> rows;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
        if (!header) {
            if (line != "case,P,eta,Peta") {
                throw Error(ErrorKind::ShapeMismatch, where() + "expected header 'case,P,eta,Peta'");
            }
            header = true;
            continue;
        }
        std::array<double, 4> fields{};
        std::size_t pos = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            const auto end = k < 3 ? line.find(',', pos) : line.size();
            if (end == std::string::npos) throw Error(ErrorKind::ShapeMismatch, where() + "expected 4 fields");
            const char* first = line.data() + pos;
            const char* last = line.data() + end;
            auto res = std::from_chars(first, last, fields[k]);
            if (res.ec != std::errc{} || res.ptr != last) {
                throw Error(ErrorKind::ShapeMismatch, where() + "malformed number");
            }
            pos = end + 1;
        }
        if (fields[0] != static_cast<double>(rows.size() + 1)) {
            throw Error(ErrorKind::ShapeMismatch, where() + "cases must be numbered 1..9 in order");
        }
        rows.push_back({fields[1], fields[2], fields[3]});
    }
    if (rows.size() != 9) {
        throw Error(ErrorKind::ShapeMismatch, "expected 9 cases, got " + std::to_string(rows.size()));
    }
    return rows;
}

std::vector<MetricRow> read_fixture(const std::string& name_or_path) {
    if (name_or_path == "table4") return table4_fixture();
    return parse_fixture(read_file(name_or_path), name_or_path);
}

std::string results_csv(const std::vector<DoeResultRow>& rows) {
    std::string out = "case,delta_beta,D_r,D_d,P,eta,Peta,min_sigma\n";
    for (const auto& r : rows) {
        out += std::to_string(r.design_case.id);
        for (Factor f : kFactors) {
            out += ',';
            out += level_name(r.design_case.level_of(f));
        }
        for (double v : r.metrics) out += "," + format_number(v);
        out += "," + (r.min_sigma ? format_number(*r.min_sigma) : std::string());
        out += '\n';
    }
    return out;
}

std::string range_csv(const RangeTable& range) {
    std::string out = "metric,factor,K1,K2,K3,Kbar1,Kbar2,Kbar3,R,optimal_level,rank\n";
    for (Metric m : kMetrics) {
        for (Factor f : kFactors) {
            const auto& e = range.at(m, f);
            const auto& order = range.ranking[static_cast<int>(m)];
            const auto rank = std::find(order.begin(), order.end(), f) - order.begin() + 1;
            out += std::string(to_string(m)) + "," + to_string(f);
            for (double k : e.K) out += "," + format_number(k);
            for (double k : e.Kbar) out += "," + format_number(k);
            out += "," + format_number(e.R) + "," + level_text(e.optimal_level) + "," + std::to_string(rank) + "\n";
        }
    }
    return out;
}

std::string anova_csv(const AnovaTable& anova) {
    std::string out = "metric,source,S,df,mean_square,F,p,mark\n";
    for (Metric m : kMetrics) {
        const int mi = static_cast<int>(m);
        for (Factor f : kFactors) {
            const auto& r = anova.at(m, f);
            out += std::string(to_string(m)) + "," + to_string(f) + "," + format_number(r.S) + "," +
                   std::to_string(r.df) + "," + format_number(r.mean_square) + "," + format_number(r.F) +
                   "," + format_number(r.p) + "," + significance_mark(r.mark) + "\n";
        }
        const auto& e = anova.error[mi];
        out += std::string(to_string(m)) + ",error," + format_number(e.S) + "," + std::to_string(e.df) + "," +
               format_number(e.mean_square) + ",,," + (e.saturated ? "saturated" : "") + "\n";
        out += std::string(to_string(m)) + ",total," + format_number(anova.total_S[mi]) + ",8,,,,\n";
    }
    return out;
}

std::string best_csv(const std::array<BestCombination, 3>& best) {
    // Same column order as the published best-combination table.
    std::string out = "metric,D_d,D_r,delta_beta,order,consistent,note\n";
    for (const auto& b : best) {
        auto level_for = [&](Factor f) {
            const auto k = std::find(b.order.begin(), b.order.end(), f) - b.order.begin();
            return level_text(b.level[k]);
        };
        std::string order;
        for (std::size_t k = 0; k < 3; ++k) order += (k ? " > " : "") + std::string(to_string(b.order[k]));
        out += std::string(to_string(b.metric)) + "," + level_for(Factor::Detuning) + "," +
               level_for(Factor::Resonant) + "," + level_for(Factor::DeltaBeta) + "," + order + "," +
               (b.consistent ? "yes" : "no") + "," + b.note + "\n";
    }
    return out;
}

json results_to_json(const std::vector<DoeResultRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        json levels = json::object();
        for (Factor f : kFactors) levels[to_string(f)] = r.design_case.level_of(f);
        json metrics = json::object();
        for (Metric m : kMetrics) metrics[to_string(m)] = num(r.metrics[static_cast<int>(m)]);
        json row = {{"case", r.design_case.id}, {"levels", levels}, {"metrics", metrics}};
        row["min_sigma"] = r.min_sigma ? num(*r.min_sigma) : json(nullptr);
        arr.push_back(row);
    }
    return {{"results", arr}};
}

std::vector<DoeResultRow> results_from_json(const json& j) {
    std::vector<DoeResultRow> rows;
    for (const auto& row : j.at("results")) {
        DoeResultRow r;
        r.design_case.id = row.at("case").get<int>();
        for (Factor f : kFactors) {
            r.design_case.level[static_cast<int>(f)] = row.at("levels").at(to_string(f)).get<int>();
        }
        for (Metric m : kMetrics) r.metrics[static_cast<int>(m)] = num(row.at("metrics").at(to_string(m)));
        if (!row.at("min_sigma").is_null()) r.min_sigma = num(row.at("min_sigma"));
        rows.push_back(r);
    }
    return rows;
}

json range_to_json(const RangeTable& range) {
    json metrics = json::object();
    for (Metric m : kMetrics) {
        json factors = json::object();
        for (Factor f : kFactors) {
            const auto& e = range.at(m, f);
            json K = json::array(), Kbar = json::array();
            for (int l = 0; l < 3; ++l) {
                K.push_back(num(e.K[l]));
                Kbar.push_back(num(e.Kbar[l]));
            }
            factors[to_string(f)] = {{"K", K}, {"Kbar", Kbar}, {"R", num(e.R)},
                                     {"optimal_level", optional_level(e.optimal_level)}};
        }
        json ranking = json::array();
        for (Factor f : range.ranking[static_cast<int>(m)]) ranking.push_back(to_string(f));
        metrics[to_string(m)] = {{"factors", factors}, {"ranking", ranking}};
    }
    return {{"range", metrics}};
}

RangeTable range_from_json(const json& j) {
    RangeTable t;
    for (Metric m : kMetrics) {
        const int mi = static_cast<int>(m);
        const auto& jm = j.at("range").at(to_string(m));
        for (Factor f : kFactors) {
            const auto& jf = jm.at("factors").at(to_string(f));
            auto& e = t.entries[mi][static_cast<int>(f)];
            for (int l = 0; l < 3; ++l) {
                e.K[l] = num(jf.at("K").at(l));
                e.Kbar[l] = num(jf.at("Kbar").at(l));
            }
            e.R = num(jf.at("R"));
            e.optimal_level = optional_level(jf.at("optimal_level"));
        }
        for (int k = 0; k < 3; ++k) t.ranking[mi][k] = parse_factor(jm.at("ranking").at(k).get<std::string>());
    }
    return t;
}

json anova_to_json(const AnovaTable& anova) {
    json metrics = json::object();
    for (Metric m : kMetrics) {
        const int mi = static_cast<int>(m);
        json factors = json::object();
        for (Factor f : kFactors) {
            const auto& r = anova.at(m, f);
            factors[to_string(f)] = {{"S", num(r.S)}, {"df", r.df}, {"mean_square", num(r.mean_square)},
                                     {"F", num(r.F)}, {"p", num(r.p)}, {"mark", significance_mark(r.mark)}};
        }
        const auto& e = anova.error[mi];
        metrics[to_string(m)] = {
            {"factors", factors},
            {"error", {{"S", num(e.S)}, {"df", e.df}, {"mean_square", num(e.mean_square)}, {"saturated", e.saturated}}},
            {"total_S", num(anova.total_S[mi])},
        };
    }
    return {{"anova", metrics}};
}

AnovaTable anova_from_json(const json& j) {
    AnovaTable t;
    for (Metric m : kMetrics) {
        const int mi = static_cast<int>(m);
        const auto& jm = j.at("anova").at(to_string(m));
        for (Factor f : kFactors) {
            const auto& jf = jm.at("factors").at(to_string(f));
            auto& r = t.rows[mi][static_cast<int>(f)];
            r.S = num(jf.at("S"));
            r.df = jf.at("df").get<int>();
            r.mean_square = num(jf.at("mean_square"));
            r.F = num(jf.at("F"));
            r.p = num(jf.at("p"));
            const auto mark = jf.at("mark").get<std::string>();
            r.mark = mark == "**" ? Significance::HighlySignificant
                   : mark == "*"  ? Significance::Significant
                                  : Significance::None;
        }
        const auto& je = jm.at("error");
        t.error[mi] = {num(je.at("S")), je.at("df").get<int>(), num(je.at("mean_square")),
                       je.at("saturated").get<bool>()};
        t.total_S[mi] = num(jm.at("total_S"));
    }
    return t;
}

json best_to_json(const std::array<BestCombination, 3>& best) {
    json arr = json::array();
    for (const auto& b : best) {
        json order = json::array(), levels = json::array();
        for (int k = 0; k < 3; ++k) {
            order.push_back(to_string(b.order[k]));
            levels.push_back(optional_level(b.level[k]));
        }
        arr.push_back({{"metric", to_string(b.metric)}, {"order", order}, {"level", levels},
                       {"consistent", b.consistent}, {"note", b.note}});
    }
    return {{"best", arr}};
}

std::array<BestCombination, 3> best_from_json(const json& j) {
    std::array<BestCombination, 3> out;
    const auto& arr = j.at("best");
    if (arr.size() != 3) throw Error(ErrorKind::ShapeMismatch, "expected 3 best-combination rows");
    for (int m = 0; m < 3; ++m) {
        auto& b = out[m];
        b.metric = parse_metric(arr[m].at("metric").get<std::string>());
        for (int k = 0; k < 3; ++k) {
            b.order[k] = parse_factor(arr[m].at("order").at(k).get<std::string>());
            b.level[k] = optional_level(arr[m].at("level").at(k));
        }
        b.consistent = arr[m].at("consistent").get<bool>();
        b.note = arr[m].at("note").get<std::string>();
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw Error(ErrorKind::Io, "cannot create output directory '" + dir + "'");
    }
}

} // namespace qhe
