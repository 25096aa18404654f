#pragma once

#include <Eigen/Dense>

#include "seqsize/errors.hpp"

namespace seqsize {

// Decision threshold z: estimated risks >= z trigger treatment.
struct UtilityConfig {
    double threshold = 0.10;
};

// Bootstrap-model risks on the original data (one row per replicate),
// next to the original model's risks.
struct StabilityMatrix {
    Eigen::VectorXd original_risks;  // length n
    Eigen::MatrixXd boot_risks;      // b rows, n columns
    int b = 0;

    Eigen::Index individuals() const { return original_risks.size(); }
};

struct SummaryStats {
    double mean = 0.0;
    double p2_5 = 0.0;
    double p97_5 = 0.0;
};

// Percentile with linear interpolation between closest ranks: the value at
// 1-based position q*(m-1)+1 of the sorted sample.
double percentile(Eigen::VectorXd values, double q);

// Concordance probability; ties in risk count one half. Rank-based O(n log n),
// identical to the all-pairs definition.
double c_statistic(const Eigen::Ref<const Eigen::VectorXd>& risks,
                   const Eigen::Ref<const Eigen::VectorXd>& y);

// Slope from refitting y on logit(risks) with an intercept.
double calibration_slope(const Eigen::Ref<const Eigen::VectorXd>& risks,
                         const Eigen::Ref<const Eigen::VectorXd>& y);

// Per-individual 95% uncertainty interval: 2.5th/97.5th percentiles of the
// bootstrap risks. Column 0 lower, column 1 upper.
Eigen::MatrixX2d ui_bounds(const StabilityMatrix& matrix);

Eigen::VectorXd ui_widths(const StabilityMatrix& matrix);

// Max distance from the original risk to either interval bound.
Eigen::VectorXd delta_stat(const StabilityMatrix& matrix);

// Fraction of the bootstrap risk distribution on the opposite side of the
// threshold from the original risk; a risk exactly at the threshold counts
// as a treat decision.
Eigen::VectorXd misclassification_prob(const StabilityMatrix& matrix, const UtilityConfig& cfg);

// Mean plus across-individual 2.5th/97.5th percentiles.
SummaryStats summarize(const Eigen::Ref<const Eigen::VectorXd>& per_individual);

// Net benefit of treating everyone, with `truth_risks` standing in for the
// true risks.
double nb_all(const Eigen::Ref<const Eigen::VectorXd>& truth_risks, const UtilityConfig& cfg);

// Net benefit of treating by `decision_risks >= z`, scored under `truth_risks`.
double nb_model(const Eigen::Ref<const Eigen::VectorXd>& decision_risks,
                const Eigen::Ref<const Eigen::VectorXd>& truth_risks, const UtilityConfig& cfg);

// Net benefit of treating by the truth-proxy model itself.
double nb_max(const Eigen::Ref<const Eigen::VectorXd>& truth_risks, const UtilityConfig& cfg);

struct EvpiResult {
    double value = 0.0;
    bool clamped = false;  // a tiny negative was clamped to zero
};

// ENB_Max - max(0, ENB_Model, ENB_All), floored at zero.
EvpiResult evpi(double enb_all, double enb_model, double enb_max);

}  // namespace seqsize
