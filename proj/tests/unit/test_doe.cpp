#include "qhe/doe.hpp"
#include "qhe/error.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace qhe;
using Catch::Approx;

namespace {

std::vector<MetricRow> random_rows(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<MetricRow> rows(9);
    for (auto& r : rows) r = {u(rng), u(rng), u(rng)};
    return rows;
}

} // namespace

TEST_CASE("L9 design") {
    const DoeDesign d = build_design(FactorLevels{});
    REQUIRE(d.cases.size() == 9);
    CHECK(d.is_orthogonal());
    CHECK(d.cases[5].level == std::array<int, 3>{2, 3, 1});
    for (int f = 0; f < 3; ++f) {
        std::array<int, 3> count{};
        for (const auto& c : d.cases) ++count[c.level[f] - 1];
        CHECK(count == std::array<int, 3>{3, 3, 3});
    }
    std::set<std::pair<int, int>> pairs;
    for (const auto& c : d.cases) pairs.insert({c.level[0], c.level[1]});
    CHECK(pairs.size() == 9);

    const BathSpec b = bath_for(d.cases[5], FactorLevels{});
    CHECK(b.beta_c == 2.5);
    CHECK(b.beta_h == 0.5);
    CHECK(b.g_c_res == 2.0);
    CHECK(b.g_h_det == 0.0);
}

TEST_CASE("property: orthogonality survives any relabelling of levels") {
    const DoeDesign base = build_design(FactorLevels{});
    std::array<int, 3> perm{1, 2, 3};
    do {
        for (int f = 0; f < 3; ++f) {
            DoeDesign d = base;
            for (auto& c : d.cases) c.level[f] = perm[c.level[f] - 1];
            REQUIRE(d.is_orthogonal());
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    DoeDesign broken = base;
    broken.cases[0].level[1] = 2;
    CHECK_FALSE(broken.is_orthogonal());
}

TEST_CASE("range analysis on the published results") {
    const DoeDesign d = build_design(FactorLevels{});
    const auto rows = table4_fixture();
    const RangeTable t = range_analysis(d, rows);
    const auto& p_db = t.at(Metric::Power, Factor::DeltaBeta);
    CHECK(p_db.K[0] == Approx(0.092).margin(1e-12));
    CHECK(p_db.Kbar[0] == Approx(0.031).margin(0.0005));
    CHECK(p_db.R == Approx(0.026).margin(0.0015));
    CHECK(t.at(Metric::Efficiency, Factor::Detuning).R == Approx(0.343).margin(0.0005));
    double largest = 0.0;
    for (Metric m : kMetrics)
        for (Factor f : kFactors) largest = std::max(largest, t.at(m, f).R);
    CHECK(largest == t.at(Metric::Efficiency, Factor::Detuning).R);
    CHECK(t.ranking[1] == std::array<Factor, 3>{Factor::Detuning, Factor::Resonant, Factor::DeltaBeta});
}

TEST_CASE("constant results carry no information") {
    const DoeDesign d = build_design(FactorLevels{});
    const std::vector<MetricRow> rows(9, MetricRow{0.1, 0.5, 0.05});
    const RangeTable t = range_analysis(d, rows);
    const AnovaTable a = anova(d, rows);
    const auto best = select_best(t, a);
    for (Metric m : kMetrics) {
        for (Factor f : kFactors) {
            CHECK(t.at(m, f).R == Approx(0.0).margin(1e-15));
            CHECK(a.at(m, f).mark == Significance::None);
        }
        CHECK(best[static_cast<int>(m)].note == "no preference");
    }
}

TEST_CASE("misaligned results are rejected") {
    const DoeDesign d = build_design(FactorLevels{});
    auto rows = table4_fixture();
    rows.pop_back();
    try {
        range_analysis(d, rows);
        FAIL("expected a shape mismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ShapeMismatch);
        CHECK(std::string(e.what()).find("expected 9 cases") != std::string::npos);
    }
    CHECK_THROWS_AS(anova(d, rows), Error);
}

TEST_CASE("F survival function") {
    for (double F : {0.1, 1.0, 10.0, 100.0, 1e4}) {
        CHECK(std::abs(f_survival(F, 2, 2) - 1.0 / (1.0 + F)) <= 1e-12);
    }
    CHECK(f_survival(98.592, 2, 2) == Approx(0.010).margin(0.0005));
    CHECK(f_survival(18.208, 2, 2) == Approx(0.052).margin(0.0005));
    CHECK(f_survival(1.0, 2, 2) == Approx(0.5).epsilon(1e-14));
    // d1 = 2 has a closed form for any d2
    for (double d2 : {1.0, 3.0, 7.0, 20.0}) {
        for (double F : {0.3, 2.0, 9.0}) {
            CHECK(f_survival(F, 2, d2) == Approx(std::pow(d2 / (d2 + 2.0 * F), d2 / 2.0)).epsilon(1e-12));
        }
    }
    CHECK(f_survival(0.0, 3, 4) == 1.0);
    CHECK_THROWS_AS(f_survival(1.0, 0.0, 2.0), Error);
    CHECK_THROWS_AS(f_survival(-1.0, 2.0, 2.0), Error);
}

TEST_CASE("significance marks") {
    CHECK(classify_significance(0.0099) == Significance::HighlySignificant);
    CHECK(classify_significance(0.010) == Significance::Significant);
    CHECK(classify_significance(0.049) == Significance::Significant);
    CHECK(classify_significance(0.05) == Significance::None);
    CHECK(std::string(significance_mark(Significance::Significant)) == "*");
}

TEST_CASE("a purely additive response saturates the error term") {
    const DoeDesign d = build_design(FactorLevels{});
    std::vector<MetricRow> rows;
    const std::array<double, 3> a{0.0, 1.0, 4.0}, b{0.0, 2.0, 3.0}, c{0.0, 0.5, 0.25};
    for (const auto& cs : d.cases) {
        const double y = a[cs.level[0] - 1] + b[cs.level[1] - 1] + c[cs.level[2] - 1];
        rows.push_back({y, y, y});
    }
    const AnovaTable t = anova(d, rows);
    CHECK(t.error[0].saturated);
    CHECK(t.error[0].S == 0.0);
    CHECK(std::isinf(t.at(Metric::Power, Factor::DeltaBeta).F));
    CHECK(t.at(Metric::Power, Factor::DeltaBeta).p == 0.0);
}

TEST_CASE("property: ANOVA decomposition against a direct computation") {
    std::mt19937_64 rng(41);
    const DoeDesign d = build_design(FactorLevels{});
    for (int k = 0; k < 500; ++k) {
        const auto rows = random_rows(rng);
        const AnovaTable t = anova(d, rows);
        for (int m = 0; m < 3; ++m) {
            double mean = 0.0;
            for (const auto& r : rows) mean += r[m] / 9.0;
            double total = 0.0;
            for (const auto& r : rows) total += std::pow(r[m] - mean, 2);
            double explained = 0.0;
            for (int f = 0; f < 3; ++f) {
                double s = 0.0;
                for (int level = 1; level <= 3; ++level) {
                    double avg = 0.0;
                    for (std::size_t c = 0; c < 9; ++c)
                        if (d.cases[c].level[f] == level) avg += rows[c][m] / 3.0;
                    s += 3.0 * std::pow(avg - mean, 2);
                }
                REQUIRE(t.rows[m][f].S == Approx(s).epsilon(1e-12));
                explained += t.rows[m][f].S;
                if (t.error[m].S > 0.0) {
                    REQUIRE(t.rows[m][f].p == Approx(1.0 / (1.0 + t.rows[m][f].F)).epsilon(1e-12));
                }
            }
            REQUIRE(t.total_S[m] == Approx(total).epsilon(1e-12));
            REQUIRE(std::abs(explained + t.error[m].S - t.total_S[m]) <= 1e-12);
        }
    }
}

TEST_CASE("property: metric scaling equivariance") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> us(0.01, 100.0);
    const DoeDesign d = build_design(FactorLevels{});
    for (int k = 0; k < 300; ++k) {
        const auto rows = random_rows(rng);
        const double s = us(rng);
        auto scaled = rows;
        for (auto& r : scaled)
            for (double& v : r) v *= s;
        const RangeTable r0 = range_analysis(d, rows), r1 = range_analysis(d, scaled);
        const AnovaTable a0 = anova(d, rows), a1 = anova(d, scaled);
        for (int m = 0; m < 3; ++m) {
            REQUIRE(r0.ranking[m] == r1.ranking[m]);
            for (int f = 0; f < 3; ++f) {
                const auto &e0 = r0.entries[m][f], &e1 = r1.entries[m][f];
                for (int l = 0; l < 3; ++l) {
                    REQUIRE(e1.K[l] == Approx(s * e0.K[l]).epsilon(1e-12));
                    REQUIRE(e1.Kbar[l] == Approx(s * e0.Kbar[l]).epsilon(1e-12));
                }
                REQUIRE(e1.R == Approx(s * e0.R).epsilon(1e-10));
                REQUIRE(e1.optimal_level == e0.optimal_level);
                REQUIRE(a1.rows[m][f].S == Approx(s * s * a0.rows[m][f].S).epsilon(1e-10));
                REQUIRE(a1.rows[m][f].F == Approx(a0.rows[m][f].F).epsilon(1e-8));
                REQUIRE(a1.rows[m][f].p == Approx(a0.rows[m][f].p).epsilon(1e-8));
                REQUIRE(a1.rows[m][f].mark == a0.rows[m][f].mark);
            }
        }
    }
}

TEST_CASE("case reduction picks independent maxima with a row-major tie-break") {
    auto grid = std::make_shared<SweepGrid>();
    grid->grid.omega20 = {"omega20", 1.0, 2.0, 2};
    grid->grid.lam = {"lam", 0.0, 1.0, 2};
    grid->cells.resize(4);
    grid->cells[0] = {0.0, 0.6, 0.0, 0.0, NAN, 0, false, true, CellStatus::Ok};
    grid->cells[1] = {0.3, 0.2, 0.06, 0.1, NAN, 0, true, false, CellStatus::Ok};
    grid->cells[2] = {0.1, 0.6, 0.06, 0.05, NAN, 0, true, false, CellStatus::Ok};
    grid->cells[3] = {9.0, 0.9, 8.1, -5.0, NAN, 0, true, false, CellStatus::Excluded};
    const CaseResult r = reduce_case(4, grid);
    CHECK(r.metric(Metric::Power) == 0.3);
    CHECK(r.metric(Metric::Efficiency) == 0.6);
    CHECK(r.argmax[1].omega20 == 0);
    CHECK(r.argmax[1].lam == 0);
    CHECK(r.argmax[2].omega20 == 0);
    CHECK(r.argmax[2].lam == 1);
    CHECK(r.min_sigma == 0.0);
    CHECK_FALSE(r.never_engine);
}

TEST_CASE("a case without engine cells is flagged") {
    FactorLevels levels;
    GridSpec g;
    g.omega20 = {"omega20", 4.5, 5.0, 3};
    g.lam = {"lam", 0.0, 0.05, 3};
    EngineSettings s;
    levels.delta_beta[0] = {1.1, 1.0};
    const DoeDesign d = build_design(levels);
    const CaseResult r = evaluate_case(d.cases[0], levels, g, s, false);
    CHECK(r.never_engine);
    CHECK(r.metric(Metric::Efficiency) == 0.0);
    CHECK(r.min_sigma >= 0.0);
}

TEST_CASE("factor levels are validated") {
    FactorLevels bad;
    bad.delta_beta[1] = {0.5, 2.5};
    CHECK_THROWS_AS(bad.validate(), Error);
    FactorLevels neg;
    neg.detuning[2] = {-1.0, 0.0};
    CHECK_THROWS_AS(neg.validate(), Error);
}
