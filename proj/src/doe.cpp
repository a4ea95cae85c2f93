// doe.cpp: orthogonal design, case evaluation, range analysis and ANOVA

#include "qhe/doe.hpp"

#include "qhe/error.hpp"

#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <utility>

namespace qhe {

const char* to_string(Factor f) noexcept {
    switch (f) {
    case Factor::DeltaBeta: return "delta_beta";
    case Factor::Resonant: return "D_r";
    case Factor::Detuning: return "D_d";
    }
    return "?";
}

const char* to_string(Metric m) noexcept {
    switch (m) {
    case Metric::Power: return "P";
    case Metric::Efficiency: return "eta";
    case Metric::Efficacy: return "Peta";
    }
    return "?";
}

const char* level_name(int level) noexcept {
    switch (level) {
    case 1: return "low";
    case 2: return "medium";
    case 3: return "high";
    default: return "none";
    }
}

void FactorLevels::validate() const {
    for (const auto& t : delta_beta) {
        if (!(t.first > 0.0 && t.second > 0.0)) {
            throw Error(ErrorKind::InvalidConfig, "factor levels: temperatures must be > 0");
        }
        if (t.first < t.second) {
            throw Error(ErrorKind::NotAnEngine, "not an engine configuration: level with beta_c < beta_h");
        }
    }
    for (const auto* rates : {&resonant, &detuning}) {
        for (const auto& g : *rates) {
            if (!(g.first >= 0.0 && g.second >= 0.0)) {
                throw Error(ErrorKind::InvalidConfig, "factor levels: rates must be >= 0");
            }
        }
    }
}

bool DoeDesign::is_orthogonal() const {
    if (cases.size() != 9) return false;
    for (int f = 0; f < 3; ++f) {
        std::array<int, 3> count{};
        for (const auto& c : cases) {
            if (c.level[f] < 1 || c.level[f] > 3) return false;
            ++count[c.level[f] - 1];
        }
        if (count != std::array<int, 3>{3, 3, 3}) return false;
    }
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            std::set<std::pair<int, int>> seen;
            for (const auto& c : cases) seen.emplace(c.level[a], c.level[b]);
            if (seen.size() != 9) return false;
        }
    }
    return true;
}

DoeDesign build_design(const FactorLevels& levels) {
    levels.validate();
    static constexpr std::array<std::array<int, 3>, 9> kL9{{
        {1, 1, 1}, {1, 2, 3}, {1, 3, 2},
        {2, 1, 3}, {2, 2, 2}, {2, 3, 1},
        {3, 1, 2}, {3, 2, 1}, {3, 3, 3},
    }};
    DoeDesign design;
    for (std::size_t k = 0; k < kL9.size(); ++k) {
        design.cases.push_back({static_cast<int>(k + 1), kL9[k]});
    }
    if (!design.is_orthogonal()) {
        throw Error(ErrorKind::InternalConsistency, "L9 layout is not orthogonal");
    }
    return design;
}

BathSpec bath_for(const DoeCase& c, const FactorLevels& levels) {
    const auto& t = levels.delta_beta[c.level_of(Factor::DeltaBeta) - 1];
    const auto& r = levels.resonant[c.level_of(Factor::Resonant) - 1];
    const auto& d = levels.detuning[c.level_of(Factor::Detuning) - 1];
    BathSpec b;
    b.beta_c = t.first;
    b.beta_h = t.second;
    b.g_c_res = r.first;
    b.g_h_res = r.second;
    b.g_c_det = d.first;
    b.g_h_det = d.second;
    return b;
}

CaseResult reduce_case(int case_id, std::shared_ptr<const SweepGrid> grid) {
    CaseResult out;
    out.case_id = case_id;
    const GridSpec& g = grid->grid;
    std::array<bool, 3> found{};
    bool any_sigma = false;
    out.min_sigma = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < g.omega20.count; ++i) {
        for (std::size_t j = 0; j < g.lam.count; ++j) {
            const CellObservables& c = grid->cells[g.index(i, j)];
            if (c.status != CellStatus::Ok) continue;
            if (c.sigma < out.min_sigma) out.min_sigma = c.sigma;
            any_sigma = true;

            const std::array<std::pair<bool, double>, 3> candidates{{
                {c.engine, c.power},
                {c.engine || c.efficiency_limit, c.efficiency},
                {c.engine, c.efficacy},
            }};
            for (int m = 0; m < 3; ++m) {
                const auto& [eligible, v] = candidates[m];
                if (!eligible) continue;
                if (!found[m] || v > out.best[m]) {
                    found[m] = true;
                    out.best[m] = v;
                    out.argmax[m] = {i, j};
                    out.argmax_omega20[m] = g.omega20.value(i);
                    out.argmax_lam[m] = g.lam.value(j);
                }
            }
        }
    }
    if (!any_sigma) out.min_sigma = 0.0;
    out.never_engine = !found[0] && !found[1] && !found[2];
    out.grid = std::move(grid);
    return out;
}

CaseResult evaluate_case(const DoeCase& c, const FactorLevels& levels, const GridSpec& grid,
                         const EngineSettings& engine, bool parallel) {
    const BathSpec baths = bath_for(c, levels);
    const CellFunction fn = make_cell_function(engine, baths);
    auto sweep = std::make_shared<SweepGrid>(parallel ? sweep_parallel(grid, fn)
                                                      : sweep_serial(grid, fn));
    sweep->meta.engine = to_string(engine.engine);
    return reduce_case(c.id, std::move(sweep));
}

namespace {

void check_aligned(const DoeDesign& design, std::span<const MetricRow> results) {
    if (design.cases.size() != 9 || results.size() != 9) {
        throw Error(ErrorKind::ShapeMismatch,
                    "expected 9 cases, got " + std::to_string(results.size()));
    }
}

std::array<double, 3> level_sums(const DoeDesign& design, std::span<const MetricRow> results,
                                 int metric, int factor) {
    std::array<double, 3> K{};
    for (std::size_t k = 0; k < design.cases.size(); ++k) {
        K[design.cases[k].level[factor] - 1] += results[k][metric];
    }
    return K;
}

} // namespace

RangeTable range_analysis(const DoeDesign& design, std::span<const MetricRow> results) {
    check_aligned(design, results);
    RangeTable table;
    for (int m = 0; m < 3; ++m) {
        for (int f = 0; f < 3; ++f) {
            RangeEntry& e = table.entries[m][f];
            e.K = level_sums(design, results, m, f);
            for (int l = 0; l < 3; ++l) e.Kbar[l] = e.K[l] / 3.0;
            const auto [lo, hi] = std::minmax_element(e.Kbar.begin(), e.Kbar.end());
            e.R = *hi - *lo;
            if (e.R > 0.0) e.optimal_level = static_cast<int>(hi - e.Kbar.begin()) + 1;
        }
        std::array<Factor, 3> order = kFactors;
        std::stable_sort(order.begin(), order.end(), [&](Factor a, Factor b) {
            return table.entries[m][static_cast<int>(a)].R > table.entries[m][static_cast<int>(b)].R;
        });
        table.ranking[m] = order;
    }
    return table;
}

double f_survival(double F, double d1, double d2) {
    if (!(d1 >= 1.0) || !(d2 >= 1.0) || !std::isfinite(d1) || !std::isfinite(d2)) {
        throw Error(ErrorKind::InvalidConfig, "f_survival: degrees of freedom must be >= 1");
    }
    if (std::isnan(F) || F < 0.0) {
        throw Error(ErrorKind::InvalidConfig, "f_survival: F must be >= 0");
    }
    if (std::isinf(F)) return 0.0;
    const boost::math::fisher_f_distribution<double> dist(d1, d2);
    return boost::math::cdf(boost::math::complement(dist, F));
}

Significance classify_significance(double p) noexcept {
    if (p < 0.01) return Significance::HighlySignificant;
    if (p < 0.05) return Significance::Significant;
    return Significance::None;
}

const char* significance_mark(Significance s) noexcept {
    switch (s) {
    case Significance::None: return "";
    case Significance::Significant: return "*";
    case Significance::HighlySignificant: return "**";
    }
    return "";
}

AnovaTable anova(const DoeDesign& design, std::span<const MetricRow> results) {
    check_aligned(design, results);
    AnovaTable table;
    for (int m = 0; m < 3; ++m) {
        double mean = 0.0;
        for (const auto& r : results) mean += r[m];
        mean /= static_cast<double>(results.size());
        double total = 0.0, sum_sq = 0.0;
        for (const auto& r : results) {
            total += (r[m] - mean) * (r[m] - mean);
            sum_sq += r[m] * r[m];
        }
        // sums of squares below this are rounding noise of the mean
        const double noise = 1e-28 * sum_sq;
        if (total <= noise) total = 0.0;
        table.total_S[m] = total;

        double explained = 0.0;
        for (int f = 0; f < 3; ++f) {
            const auto K = level_sums(design, results, m, f);
            double s = 0.0;
            for (double k : K) {
                const double d = k / 3.0 - mean;
                s += d * d;
            }
            AnovaRow& row = table.rows[m][f];
            row.S = 3.0 * s <= noise ? 0.0 : 3.0 * s;
            row.df = 2;
            row.mean_square = row.S / row.df;
            explained += row.S;
        }

        AnovaErrorRow& err = table.error[m];
        err.df = 2;  // 8 total - 3 factors x 2
        err.S = total - explained;
        if (err.S <= 1e-12 * total) {
            err.saturated = err.S < 0.0 || total > 0.0;
            err.S = std::max(err.S, 0.0);
        }
        err.mean_square = err.S / err.df;

        for (int f = 0; f < 3; ++f) {
            AnovaRow& row = table.rows[m][f];
            if (row.S == 0.0) {
                row.F = 0.0;
                row.p = 1.0;
            } else if (err.mean_square == 0.0) {
                row.F = std::numeric_limits<double>::infinity();
                row.p = 0.0;
            } else {
                row.F = row.mean_square / err.mean_square;
                row.p = f_survival(row.F, row.df, err.df);
            }
            row.mark = classify_significance(row.p);
        }
    }
    return table;
}

std::array<BestCombination, 3> select_best(const RangeTable& range, const AnovaTable& anova) {
    std::array<BestCombination, 3> out;
    for (int m = 0; m < 3; ++m) {
        BestCombination& best = out[m];
        best.metric = kMetrics[m];
        best.order = range.ranking[m];
        for (int k = 0; k < 3; ++k) {
            best.level[k] = range.entries[m][static_cast<int>(best.order[k])].optimal_level;
        }

        std::array<Factor, 3> by_p = kFactors;
        std::stable_sort(by_p.begin(), by_p.end(), [&](Factor a, Factor b) {
            return anova.rows[m][static_cast<int>(a)].p < anova.rows[m][static_cast<int>(b)].p;
        });
        best.consistent = by_p == best.order;
        if (!best.consistent) {
            best.note = "range ranking and ANOVA p ranking disagree";
        }
        if (std::none_of(best.level.begin(), best.level.end(),
                         [](const auto& l) { return l.has_value(); })) {
            best.note = "no preference";
        }
    }
    return out;
}

std::vector<MetricRow> table4_fixture() {
    return {
        {0.023, 0.800, 0.014},
        {0.012, 0.401, 0.002},
        {0.057, 0.561, 0.022},
        {0.019, 0.591, 0.007},
        {0.048, 0.671, 0.023},
        {0.105, 0.800, 0.067},
        {0.024, 0.695, 0.013},
        {0.045, 0.800, 0.031},
        {0.038, 0.378, 0.009},
    };
}

} // namespace qhe
