// doe.hpp: L9(3^3) orthogonal test over temperature difference and dissipation modes
//
// Factors: delta-beta (bath temperatures), resonant dissipation D_r and
// detuning dissipation D_d. Levels are 1-based (1 = low, 2 = medium, 3 = high).

#pragma once

#include "qhe/dressed_model.hpp"
#include "qhe/sweep.hpp"

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qhe {

enum class Factor { DeltaBeta = 0, Resonant = 1, Detuning = 2 };
enum class Metric { Power = 0, Efficiency = 1, Efficacy = 2 };

inline constexpr std::array<Factor, 3> kFactors{Factor::DeltaBeta, Factor::Resonant, Factor::Detuning};
inline constexpr std::array<Metric, 3> kMetrics{Metric::Power, Metric::Efficiency, Metric::Efficacy};

const char* to_string(Factor f) noexcept;
const char* to_string(Metric m) noexcept;
const char* level_name(int level) noexcept;  // "low" | "medium" | "high"

struct LevelPair {
    double first{0.0};
    double second{0.0};

    bool operator==(const LevelPair&) const = default;
};

struct FactorLevels {
    std::array<LevelPair, 3> delta_beta{{{5.0, 1.0}, {2.5, 0.5}, {1.0, 0.2}}};  // (beta_c, beta_h)
    std::array<LevelPair, 3> resonant{{{0.5, 0.5}, {1.0, 1.0}, {2.0, 2.0}}};    // (g_c_res, g_h_res)
    std::array<LevelPair, 3> detuning{{{0.0, 0.0}, {0.5, 0.5}, {2.0, 2.0}}};    // (g_c_det, g_h_det)

    void validate() const;

    bool operator==(const FactorLevels&) const = default;
};

struct DoeCase {
    int id{0};
    std::array<int, 3> level{1, 1, 1};  // indexed by Factor

    int level_of(Factor f) const noexcept { return level[static_cast<int>(f)]; }
};

struct DoeDesign {
    std::vector<DoeCase> cases;

    // Every level appears 3 times per column and every ordered pair of levels
    // appears exactly once for each pair of columns.
    bool is_orthogonal() const;
};

DoeDesign build_design(const FactorLevels& levels);
BathSpec bath_for(const DoeCase& c, const FactorLevels& levels);

struct CellIndex {
    std::size_t omega20{0};
    std::size_t lam{0};
};

struct CaseResult {
    int case_id{0};
    std::array<double, 3> best{0.0, 0.0, 0.0};  // indexed by Metric
    std::array<CellIndex, 3> argmax{};
    std::array<double, 3> argmax_omega20{};
    std::array<double, 3> argmax_lam{};
    double min_sigma{0.0};
    bool never_engine{false};
    std::shared_ptr<const SweepGrid> grid;

    double metric(Metric m) const noexcept { return best[static_cast<int>(m)]; }
};

CaseResult evaluate_case(const DoeCase& c, const FactorLevels& levels, const GridSpec& grid,
                         const EngineSettings& engine, bool parallel = true);

// Maxima of P, eta, P*eta over an already evaluated grid; ties go to the first
// cell in row-major order.
CaseResult reduce_case(int case_id, std::shared_ptr<const SweepGrid> grid);

// One row of performance values per design case, in design order.
using MetricRow = std::array<double, 3>;

struct RangeEntry {
    std::array<double, 3> K{};
    std::array<double, 3> Kbar{};
    double R{0.0};
    std::optional<int> optimal_level;  // empty when every level mean ties
};

struct RangeTable {
    std::array<std::array<RangeEntry, 3>, 3> entries{};      // [metric][factor]
    std::array<std::array<Factor, 3>, 3> ranking{};           // [metric], descending R

    const RangeEntry& at(Metric m, Factor f) const {
        return entries[static_cast<int>(m)][static_cast<int>(f)];
    }
};

RangeTable range_analysis(const DoeDesign& design, std::span<const MetricRow> results);

enum class Significance { None, Significant, HighlySignificant };
const char* significance_mark(Significance s) noexcept;  // "", "*", "**"

struct AnovaRow {
    double S{0.0};
    int df{2};
    double mean_square{0.0};
    double F{0.0};
    double p{1.0};
    Significance mark{Significance::None};
};

struct AnovaErrorRow {
    double S{0.0};
    int df{2};
    double mean_square{0.0};
    bool saturated{false};  // S_e floored at 0
};

struct AnovaTable {
    std::array<std::array<AnovaRow, 3>, 3> rows{};  // [metric][factor]
    std::array<AnovaErrorRow, 3> error{};
    std::array<double, 3> total_S{};

    const AnovaRow& at(Metric m, Factor f) const {
        return rows[static_cast<int>(m)][static_cast<int>(f)];
    }
};

AnovaTable anova(const DoeDesign& design, std::span<const MetricRow> results);

// Upper tail of the Fisher F distribution.
double f_survival(double F, double d1, double d2);

Significance classify_significance(double p) noexcept;

struct BestCombination {
    Metric metric{Metric::Power};
    std::array<Factor, 3> order{};               // by descending impact
    std::array<std::optional<int>, 3> level{};   // optimal level per entry of order
    bool consistent{true};                       // range and p rankings agree
    std::string note;
};

std::array<BestCombination, 3> select_best(const RangeTable& range, const AnovaTable& anova);

// The published orthogonal-test results (P, eta, P*eta per case).
std::vector<MetricRow> table4_fixture();

} // namespace qhe
