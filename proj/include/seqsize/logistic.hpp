#pragma once

#include <Eigen/Dense>
#include <optional>

#include "seqsize/cohort.hpp"

namespace seqsize {

enum class StrategyKind { Unpenalised, HeuristicShrinkage, BootstrapShrinkage, Lasso };

const char* strategy_name(StrategyKind kind);

// A fitted risk model: risk = inv_logit(intercept + X * coefficients).
struct FittedModel {
    double intercept = 0.0;
    Eigen::VectorXd coefficients;
    StrategyKind strategy_tag = StrategyKind::Unpenalised;
    std::optional<double> shrinkage_factor;
    std::optional<double> penalty;
    bool converged = false;
    int iterations = 0;
    bool shrinkage_zero_chi2 = false;   // heuristic factor fell back to 0
    std::optional<double> develop_evpi; // per-model EVPI from an internal bootstrap
};

struct FitOptions {
    double score_tol = 1e-8;  // max |score| component at convergence
    int max_iterations = 100;
};

inline double inv_logit(double t) {
    return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// Maximum-likelihood logistic regression by iteratively reweighted least
// squares, intercept always included. `offset` is added to the linear
// predictor but carries no fitted parameter (used to re-estimate an
// intercept around a shrunken linear predictor). X may have zero columns
// for an intercept-only fit.
FittedModel fit_logistic(const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXd>& y,
                         const std::optional<Eigen::VectorXd>& offset = std::nullopt,
                         const FitOptions& options = {});

FittedModel fit_logistic(const Cohort& cohort,
                         const std::optional<Eigen::VectorXd>& offset = std::nullopt,
                         const FitOptions& options = {});

// intercept + X * coefficients
Eigen::VectorXd linear_predictor(const FittedModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X);

// Elementwise inverse logit of the linear predictor, clamped to stay inside
// (0,1) in floating point.
Eigen::VectorXd predict_risk(const FittedModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X);

// Binomial log-likelihood of risks against outcomes, risks clamped to
// [1e-12, 1-1e-12].
double log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& risks,
                      const Eigen::Ref<const Eigen::VectorXd>& y);

// Likelihood-ratio statistic 2*(loglik(model) - loglik(intercept-only)).
double lr_chi2(const FittedModel& model, const Cohort& cohort);

}  // namespace seqsize
