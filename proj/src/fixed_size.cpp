#include "seqsize/fixed_size.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "seqsize/errors.hpp"
#include "seqsize/logistic.hpp"
#include "seqsize/normal.hpp"
#include "seqsize/rng.hpp"

namespace seqsize {

void FixedSizeInputs::validate() const {
    if (!(prevalence > 0.0 && prevalence < 1.0)) throw ConfigError("prevalence must lie in (0,1)");
    if (!(c_statistic >= 0.5 && c_statistic < 1.0)) throw ConfigError("c-statistic must lie in [0.5,1)");
    if (parameters < 1) throw ConfigError("parameter count must be positive");
    if (!(shrinkage_target > 0.0 && shrinkage_target < 1.0)) throw ConfigError("shrinkage target must lie in (0,1)");
    if (!(optimism_target > 0.0)) throw ConfigError("optimism target must be positive");
    if (!(risk_margin > 0.0)) throw ConfigError("risk margin must be positive");
    if (mc_draws < 1000) throw ConfigError("mc_draws too small for a stable conversion");
}

long criterion_overall_risk(double prevalence, double margin) {
    if (!(prevalence > 0.0 && prevalence < 1.0)) throw ConfigError("prevalence must lie in (0,1)");
    const double raw = 1.96 * 1.96 * prevalence * (1.0 - prevalence) / (margin * margin);
    return static_cast<long>(std::ceil(raw));
}

double cstat_to_r2cs(double c_statistic, double prevalence, long mc_draws, std::uint64_t seed) {
    // Event/non-event linear predictors a fixed distance apart: two unit
    // normals with mean separation sqrt(2)*probit(c) have concordance c.
    const double mu = std::sqrt(2.0) * probit(c_statistic);
    const long n_events = std::lround(prevalence * static_cast<double>(mc_draws));
    const long n = mc_draws;

    RngStream stream = RngStream(seed).derive(StreamPurpose::MonteCarlo, 0);
    Eigen::MatrixXd lp(n, 1);
    Eigen::VectorXd y(n);
    for (long i = 0; i < n; ++i) {
        const bool event = i < n_events;
        lp(i, 0) = stream.normal() + (event ? mu : 0.0);
        y[i] = event ? 1.0 : 0.0;
    }

    // Absolute score tolerance scaled with n: summation noise in the score
    // grows with the sample, while parameter precision stays far better than
    // the Monte Carlo error either way.
    FitOptions options;
    options.score_tol = 1e-8 * std::max(1.0, static_cast<double>(n) / 1e4);
    options.max_iterations = 200;
    const FittedModel fit = fit_logistic(lp, y, std::nullopt, options);
    const Eigen::VectorXd risks = predict_risk(fit, lp);
    const double ll_model = log_likelihood(risks, y);
    const double ybar = y.mean();
    const double ll_null =
        static_cast<double>(n) * (ybar * std::log(ybar) + (1.0 - ybar) * std::log(1.0 - ybar));
    const double lr = 2.0 * (ll_model - ll_null);
    return 1.0 - std::exp(-lr / static_cast<double>(n));
}

namespace {

// n such that the expected global shrinkage is s: p / ((s-1) ln(1 - r2/s)).
double shrinkage_criterion(int parameters, double r2, double s) {
    if (r2 >= s) throw InvalidR2("Cox-Snell R^2 (" + std::to_string(r2) +
                                 ") must be below the shrinkage target " + std::to_string(s));
    return static_cast<double>(parameters) / ((s - 1.0) * std::log(1.0 - r2 / s));
}

}  // namespace

FixedSizeResult riley_minimum(const FixedSizeInputs& inputs) {
    inputs.validate();
    FixedSizeResult result;

    result.r2_cs = cstat_to_r2cs(inputs.c_statistic, inputs.prevalence, inputs.mc_draws, inputs.mc_seed);
    const double phi = inputs.prevalence;
    result.max_r2_cs = 1.0 - std::pow(std::pow(phi, phi) * std::pow(1.0 - phi, 1.0 - phi), 2.0);

    // (i) expected uniform shrinkage of at least the target
    result.raw_shrinkage = shrinkage_criterion(inputs.parameters, result.r2_cs, inputs.shrinkage_target);
    result.n_shrinkage = static_cast<long>(std::ceil(result.raw_shrinkage));

    // (ii) small absolute optimism in the apparent fit, via the shrinkage
    // bound with s chosen so that R^2 degrades by at most the target
    const double s_optimism = result.r2_cs / (result.r2_cs + inputs.optimism_target * result.max_r2_cs);
    result.raw_optimism = shrinkage_criterion(inputs.parameters, result.r2_cs, s_optimism);
    result.n_optimism = static_cast<long>(std::ceil(result.raw_optimism));

    // (iii) precise overall outcome risk
    result.raw_overall_risk = 1.96 * 1.96 * phi * (1.0 - phi) / (inputs.risk_margin * inputs.risk_margin);
    result.n_overall_risk = static_cast<long>(std::ceil(result.raw_overall_risk));

    result.n_total = std::max({result.n_shrinkage, result.n_optimism, result.n_overall_risk});
    result.events = static_cast<long>(std::ceil(static_cast<double>(result.n_total) * phi));
    return result;
}

}  // namespace seqsize
