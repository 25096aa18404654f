#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "seqsize/cohort.hpp"

namespace seqsize {

// Synthetic cohort generator: independent standard-normal predictors, a
// logistic outcome model calibrated to a target prevalence and c-statistic,
// and a random recruitment order.
struct GeneratorSpec {
    Eigen::Index n = 20413;
    double target_prevalence = 0.173;
    double target_c = 0.67;
    int p = 6;
    std::uint64_t seed = 0;
    std::optional<double> intercept;           // explicit truth overrides targets
    std::optional<Eigen::VectorXd> coefficients;
    std::optional<Eigen::MatrixXd> correlation;  // predictor correlation, identity if absent
    long calibration_draws = 200'000;

    void validate() const;
};

struct TrueModel {
    double intercept = 0.0;
    Eigen::VectorXd coefficients;
};

// Equal slopes scaled so sd(LP) = sqrt(2)*probit(target_c); the intercept is
// solved by bisection so the Monte Carlo mean risk matches the target
// prevalence. Deterministic given the seed.
TrueModel calibrate(const GeneratorSpec& spec);

Cohort generate(const GeneratorSpec& spec);

}  // namespace seqsize
