#pragma once

#include <map>
#include <string>
#include <vector>

#include "seqsize/cohort.hpp"
#include "seqsize/sequential.hpp"

namespace seqsize {

// Header: id,order,outcome,<predictor names...>; `order` optional. Leading
// '#' lines are skipped.
Cohort read_cohort_csv(const std::string& path);

// Values written with enough digits to round-trip exactly. Comment lines
// (provenance) go above the header, prefixed with '# '.
void write_cohort_csv(const Cohort& cohort, const std::string& path,
                      const std::vector<std::string>& comments = {});

// Fixed column order: n, the performance and stability statistics, one pass
// flag per rule (named after the rule), replicate_failures. Floats printed
// with 6 significant digits.
std::string learning_curve_csv(const LearningCurve& curve, const std::vector<StoppingRule>& rules);

void write_learning_curve_csv(const LearningCurve& curve, const std::vector<StoppingRule>& rules,
                              const std::string& path);

// JSON mirror of the CSV fields plus the per-rule/overall n_stop map and the
// resolved configuration echo. Numeric fields are rounded to the printed
// CSV precision so a read-back reproduces them exactly.
std::string learning_curve_json(const LearningCurve& curve, const std::vector<StoppingRule>& rules,
                                const std::map<std::string, std::string>& config_echo);

void write_learning_curve_json(const LearningCurve& curve, const std::vector<StoppingRule>& rules,
                               const std::map<std::string, std::string>& config_echo,
                               const std::string& path);

struct CurveFile {
    LearningCurve curve;
    std::vector<StoppingRule> rules;  // reconstructed from the pass-flag columns
};

CurveFile read_learning_curve_csv(const std::string& path);

}  // namespace seqsize
