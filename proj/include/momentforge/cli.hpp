#pragma once

/**
 * @file cli.hpp
 * @brief Scenario files, the batch pipeline and its reports.
 *
 * A scenario is a line-oriented text file with `[section]` headers and
 * `key = value` lines; `#` starts a comment.
 *
 *     [manifold]
 *     torus = 2                 # even dimension, omit for none
 *     omega = 0 1 ; -1 0        # rows separated by ';', or "standard [coef]"
 *     spheres = 1 1             # one area coefficient per sphere
 *
 *     [action]
 *     sign = plus
 *     generator = 1 0 | 0 0     # translation | sphere speeds (repeatable)
 *
 *     [pipeline]
 *     seed = 0
 *     max_denominator = 1000
 *     samples = 1000
 *     coverage_samples = 100000
 *     coverage_grid = 50
 *     extremum_grid = 50
 *     heredity_samples = 10000
 *     coverage_min = 0.99
 *     checks = all              # or a list of stage names
 *
 *     [reduce]
 *     stage = 1 : 0             # 1-based generators : levels (repeatable)
 *
 *     [expect]
 *     c = 0
 *     r = 2
 *     k = 1
 *     z = 0 1 ; -1 0
 *     omega_prime = 0 1 ; -1 0
 *     mu2_covectors = 0 1 ; -1 0
 *     fiber_d = 1 1
 *     heredity = pass
 *     betti = pass
 */

#include "momentforge/convex.hpp"
#include "momentforge/equiv.hpp"
#include "momentforge/hamclass.hpp"
#include "momentforge/moment.hpp"
#include "momentforge/reduce.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace momentforge::cli {

using geom::ActionSpec;
using geom::ProductManifold;
using geom::SignConvention;
using ratlin::Integer;
using ratlin::IntMatrix;

/// Malformed or unreadable input; the message carries "origin:line:col: ".
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Stage { Classify, Integralize, Moment, Equivariance, Convexity, Reduce, Betti };

inline constexpr Stage kAllStages[] = {Stage::Classify,     Stage::Integralize, Stage::Moment, Stage::Equivariance,
                                       Stage::Convexity,    Stage::Reduce,      Stage::Betti};

std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view name);

struct SourcePos {
    std::size_t line = 0;
    std::size_t column = 0;
};

struct ReduceStage {
    std::vector<std::size_t> generators;  ///< 0-based, relative to the action at that stage
    std::vector<double> levels;
    SourcePos pos;
};

struct Expectation {
    std::string raw;
    std::optional<IntMatrix> matrix;  ///< for matrix-valued keys
    std::optional<Integer> integer;   ///< for integer-valued keys
    std::optional<bool> verdict;      ///< for pass/fail keys
    SourcePos pos;
};

struct Scenario {
    std::string name;
    std::optional<ProductManifold> manifold;
    std::optional<ActionSpec> action;
    std::optional<std::uint64_t> seed;
    Integer max_denominator = 1000;
    std::size_t samples = 1000;
    std::size_t coverage_samples = 100000;
    std::size_t coverage_grid = 50;
    std::size_t extremum_grid = 50;
    std::size_t heredity_samples = 10000;
    double coverage_min = 0.99;
    std::vector<Stage> checks{std::begin(kAllStages), std::end(kAllStages)};
    std::vector<ReduceStage> reduce;
    std::map<std::string, Expectation> expect;
};

/// `origin` prefixes diagnostics; the scenario name is its stem.
Scenario parse_scenario(std::string_view text, const std::string& origin);
Scenario load_scenario(const std::filesystem::path& path);

struct RunOptions {
    std::optional<std::uint64_t> seed;  ///< already resolved against the environment
    std::optional<SignConvention> sign;
    std::optional<Integer> max_denominator;
    std::vector<Stage> stages;  ///< empty: the scenario's checks
};

/// Flag, then MOMENTFORGE_SEED, then the scenario, then 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const char* env, const Scenario& s);

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
};

struct MatrixEntry {
    std::string name;
    std::size_t i = 0, j = 0;
    std::string value;
};

struct Report {
    std::string scenario;
    std::uint64_t seed = 0;
    SignConvention sign = SignConvention::Plus;
    std::vector<Section> sections;
    std::vector<Check> checks;
    std::vector<MatrixEntry> matrices;
    std::optional<Table> moment_samples;
    std::optional<Table> coverage;

    bool passed() const;
    std::string text() const;
};

/// Intermediate objects of a run, for callers that inspect more than the report.
struct PipelineState {
    std::optional<hamclass::PeriodMatrix> periods;
    std::optional<hamclass::ActionClassification> classification;
    std::optional<hamclass::IntegralizationResult> integralization;
    std::optional<moment::GeneralizedMoment> moment;
    std::optional<IntMatrix> z;
    std::vector<reduce::ReducedSpace> reductions;
};

Report run_scenario(const Scenario& s, const RunOptions& opts, PipelineState* state = nullptr);

/// report.txt, matrices.csv and, when present, moment_samples.csv and coverage.csv.
void emit_report(const Report& r, const std::filesystem::path& dir);
std::string to_csv(const Table& t);
std::string matrices_csv(const Report& r);

/// Shortest round-trip decimal; negative zero prints as 0.
std::string format_double(double x);

}  // namespace momentforge::cli
