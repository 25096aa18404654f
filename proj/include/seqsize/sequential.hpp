#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seqsize/bootstrap.hpp"

namespace seqsize {

enum class RuleMetric { CorrectedSlope, OptimismC, MeanUiWidth, MeanDelta, Evpi, MeanMisclass };

enum class Comparator { Ge, Le };

const char* rule_metric_name(RuleMetric metric);
RuleMetric parse_rule_metric(const std::string& name);

// A stopping criterion: comparator(metric, threshold) must hold over k
// consecutive usable increments.
struct StoppingRule {
    RuleMetric metric = RuleMetric::CorrectedSlope;
    Comparator comparator = Comparator::Ge;
    double threshold = 0.9;
    int k = 2;

    std::string name() const;  // e.g. corrected_slope_ge0.9_k2
};

struct SequentialConfig {
    int n_initial = 100;
    int n_new = 100;
    int n_max = 3000;
    int b = 200;
    StrategySpec spec;
    UtilityConfig utility;
    std::vector<StoppingRule> rules;
    std::uint64_t seed = 0;
    bool early_stop = false;  // stop recruiting once every rule is confirmed
    int threads = 0;
    BootstrapOptions engine;

    void validate() const;
};

// One learning-curve point: everything measured at sample size n. An
// increment whose model fit failed is kept with usable=false and NaN
// statistics so the curve's n-grid stays contiguous.
struct IncrementRecord {
    int n = 0;
    bool usable = false;
    double apparent_c = 0.0;
    double optimism_c = 0.0;
    double corrected_c = 0.0;
    double corrected_slope = 0.0;
    double mean_ui_width = 0.0, ui_width_p2_5 = 0.0, ui_width_p97_5 = 0.0;
    double mean_delta = 0.0, delta_p2_5 = 0.0, delta_p97_5 = 0.0;
    double evpi = 0.0;
    double mean_misclass = 0.0, misclass_p2_5 = 0.0, misclass_p97_5 = 0.0;
    std::vector<bool> rule_pass;
    int replicate_failures = 0;

    double metric_value(RuleMetric metric) const;
};

struct LearningCurve {
    std::vector<IncrementRecord> records;
    std::vector<std::optional<int>> n_stop_per_rule;  // aligned with config rules
    std::optional<int> n_stop_overall;
};

// Assigns a fresh uniform-random recruitment order; the input is untouched.
Cohort recruitment_stream(const Cohort& cohort, std::uint64_t seed);

// Replays recruitment in increments of n_new, runs the bootstrap engine at
// each stage on the recruitment prefix, and evaluates the stopping rules.
// Each stage derives its own RNG substream keyed by n, so the record at a
// given n is identical whether produced inside a longer run or alone.
LearningCurve run_sequential(const Cohort& cohort, const SequentialConfig& cfg);

struct RuleEvaluation {
    std::vector<std::optional<int>> n_stop_per_rule;
    std::optional<int> n_stop_overall;
};

// A rule's n_stop is the n of the first increment of the earliest run of k
// consecutive passes; unusable increments break runs. The overall n_stop is
// the smallest n from which every rule passes through its own confirmation.
RuleEvaluation evaluate_rules(const std::vector<IncrementRecord>& records,
                              const std::vector<StoppingRule>& rules);

}  // namespace seqsize
