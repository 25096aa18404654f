#pragma once

#include <string>
#include <vector>

#include "seqsize/sequential.hpp"

namespace seqsize {

// Which learning-curve metrics to draw; defaults to the six rule metrics.
struct SvgOptions {
    std::vector<RuleMetric> metrics{RuleMetric::CorrectedSlope, RuleMetric::OptimismC,
                                    RuleMetric::MeanUiWidth,   RuleMetric::MeanDelta,
                                    RuleMetric::Evpi,          RuleMetric::MeanMisclass};
    std::string description;  // embedded verbatim in <desc> for provenance
};

// One panel per selected metric: the curve against n, 2.5/97.5 percentile
// bands for the individual-level metrics, a horizontal line per matching
// rule threshold and a vertical marker at that rule's n_stop. Identical
// inputs produce identical bytes.
std::string render_learning_curve_svg(const LearningCurve& curve,
                                      const std::vector<StoppingRule>& rules,
                                      const SvgOptions& options = {});

void write_learning_curve_svg(const LearningCurve& curve, const std::vector<StoppingRule>& rules,
                              const std::string& path, const SvgOptions& options = {});

}  // namespace seqsize
