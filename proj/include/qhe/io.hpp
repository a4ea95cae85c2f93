// io.hpp: CSV/JSON artifacts and fixture files
//
// Numbers are written with 9 significant digits, '.' as decimal separator,
// independent of the process locale.

#pragma once

#include "qhe/doe.hpp"
#include "qhe/sweep.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace qhe {

std::string format_number(double v);  // "nan", "inf", "-inf" for non-finite values
double round_sig9(double v);

// One observable of a sweep as written to disk. Values are already rounded.
struct SweepArtifact {
    GridSpec grid;
    Observable observable{Observable::Power};
    std::vector<double> values;  // row-major, NaN for cells without a value
    SweepMetadata meta;
};

SweepArtifact make_sweep_artifact(const SweepGrid& sweep, Observable obs);
bool same_artifact(const SweepArtifact& a, const SweepArtifact& b);  // NaN equals NaN

std::string sweep_csv(const SweepArtifact& a);
nlohmann::json sweep_to_json(const SweepArtifact& a);
SweepArtifact sweep_from_json(const nlohmann::json& j);

// "table4" selects the bundled copy of the published results.
std::vector<MetricRow> read_fixture(const std::string& name_or_path);
std::vector<MetricRow> parse_fixture(const std::string& text, const std::string& source);

struct DoeResultRow {
    DoeCase design_case;
    MetricRow metrics{};
    std::optional<double> min_sigma;  // only for evaluated cases
    bool operator==(const DoeResultRow& o) const {
        return design_case.id == o.design_case.id && design_case.level == o.design_case.level &&
               metrics == o.metrics && min_sigma == o.min_sigma;
    }
};

struct DoeReport {
    std::vector<DoeResultRow> results;
    RangeTable range;
    AnovaTable anova;
    std::array<BestCombination, 3> best;
};

std::string results_csv(const std::vector<DoeResultRow>& rows);
std::string range_csv(const RangeTable& range);
std::string anova_csv(const AnovaTable& anova);
std::string best_csv(const std::array<BestCombination, 3>& best);

nlohmann::json results_to_json(const std::vector<DoeResultRow>& rows);
nlohmann::json range_to_json(const RangeTable& range);
nlohmann::json anova_to_json(const AnovaTable& anova);
nlohmann::json best_to_json(const std::array<BestCombination, 3>& best);

std::vector<DoeResultRow> results_from_json(const nlohmann::json& j);
RangeTable range_from_json(const nlohmann::json& j);
AnovaTable anova_from_json(const nlohmann::json& j);
std::array<BestCombination, 3> best_from_json(const nlohmann::json& j);

// Throws Error{Io}.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);
void ensure_directory(const std::string& dir);

} // namespace qhe
