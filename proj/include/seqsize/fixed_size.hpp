#pragma once

#include <cstdint>

namespace seqsize {

// Inputs to the a-priori minimum sample size calculation for developing a
// binary-outcome risk model.
struct FixedSizeInputs {
    double prevalence = 0.173;
    double c_statistic = 0.78;
    int parameters = 6;
    double shrinkage_target = 0.9;
    double optimism_target = 0.05;
    double risk_margin = 0.05;
    long mc_draws = 1'000'000;
    std::uint64_t mc_seed = 54;

    void validate() const;
};

// Smallest n with 1.96*sqrt(phi(1-phi)/n) <= margin.
long criterion_overall_risk(double prevalence, double margin);

// Monte Carlo conversion of an anticipated c-statistic to a Cox-Snell R^2:
// linear predictors are simulated as two normals a sqrt(2)*probit(c) apart
// (the separation that yields concordance c), split by prevalence, and a
// univariate logistic refit supplies the likelihood-ratio statistic.
double cstat_to_r2cs(double c_statistic, double prevalence, long mc_draws, std::uint64_t seed);

struct FixedSizeResult {
    long n_shrinkage = 0;      // criterion (i): global shrinkage >= target
    long n_optimism = 0;       // criterion (ii): small optimism in apparent fit
    long n_overall_risk = 0;   // criterion (iii): precise overall risk
    double raw_shrinkage = 0;  // unrounded per-criterion values
    double raw_optimism = 0;
    double raw_overall_risk = 0;
    double r2_cs = 0.0;
    double max_r2_cs = 0.0;
    long n_total = 0;  // max of the three criteria
    long events = 0;   // ceil(n_total * prevalence)
};

FixedSizeResult riley_minimum(const FixedSizeInputs& inputs);

}  // namespace seqsize
