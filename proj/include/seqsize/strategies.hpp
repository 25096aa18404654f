#pragma once

#include <Eigen/Dense>
#include <vector>

#include "seqsize/cohort.hpp"
#include "seqsize/logistic.hpp"
#include "seqsize/metrics.hpp"
#include "seqsize/rng.hpp"

namespace seqsize {

// One of the four model development strategies, with its tuning knobs.
struct StrategySpec {
    StrategyKind kind = StrategyKind::Unpenalised;
    int inner_bootstrap_b = 200;  // bootstrap-shrinkage inner replicates (final model)
    int nested_inner_b = 50;      // inner replicates when developing inside an outer bootstrap
    int cv_folds = 10;
    std::vector<double> lambda_grid;  // strictly descending; empty -> default path
    double cv_rel_tol = 1e-3;         // CV-loss plateau width treated as a tie

    void validate() const;
};

struct DevelopOptions {
    bool identity_resample = false;  // force internal bootstraps to resample the original rows
    bool nested = false;             // developing inside an outer bootstrap replicate
    UtilityConfig utility;           // threshold for any internal net-benefit accounting
};

// Applies the full pre-specified strategy to a cohort. Pure function of
// (spec, cohort, rng stream): same inputs give a bitwise-identical model.
FittedModel develop(const StrategySpec& spec, const Cohort& cohort, const RngStream& rng,
                    const DevelopOptions& options = {});

struct ShrinkageFactor {
    double value = 0.0;
    bool zero_chi2 = false;  // chi2 below tolerance, value fell back to 0
};

// (chi2 - df) / chi2, clamped to [0,1].
ShrinkageFactor heuristic_shrinkage_factor(double chi2, int df);

// Scales the slopes by s and re-estimates the intercept by an intercept-only
// fit with offset s*(X beta), restoring calibration-in-the-large.
FittedModel apply_uniform_shrinkage(const FittedModel& model, double s, const Cohort& cohort);

// Unpenalised fit shrunk by the bootstrap-corrected calibration slope.
FittedModel bootstrap_shrinkage_develop(const Cohort& cohort, int inner_b, const RngStream& rng,
                                        const DevelopOptions& options = {});

// L1-penalised logistic regression by coordinate descent on internally
// standardized predictors (intercept unpenalised); coefficients are returned
// on the original predictor scale. The penalty is lambda * sum|beta_std|
// against the mean (1/n) negative log-likelihood.
FittedModel lasso_fit(const Cohort& cohort, double lambda);

// Smallest lambda that zeroes every slope, for the default path.
double lasso_lambda_max(const Cohort& cohort);

std::vector<double> default_lambda_grid(const Cohort& cohort);

// Selects lambda by cross-validated mean squared error between held-out
// outcomes and predicted risks, folds stratified by outcome. The CV loss is
// flat to within noise near its minimum, so the reported lambda* is the
// largest lambda whose loss lies within cv_rel_tol of the minimum.
FittedModel lasso_cv_develop(const Cohort& cohort, int folds, std::vector<double> lambda_grid,
                             const RngStream& rng, double cv_rel_tol = 1e-3);

// Stratified fold assignment (values 0..folds-1 per row). Re-randomizes up
// to ten times until every fold holds both outcome classes.
std::vector<int> make_stratified_folds(const Cohort& cohort, int folds, RngStream rng);

}  // namespace seqsize
