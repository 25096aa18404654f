#include "seqsize/datagen.hpp"

#include <cmath>

#include "seqsize/logistic.hpp"
#include "seqsize/normal.hpp"
#include "seqsize/rng.hpp"
#include "seqsize/sequential.hpp"

namespace seqsize {

void GeneratorSpec::validate() const {
    if (n < 1) throw ConfigError("generator row count must be positive");
    if (!(target_prevalence > 0.0 && target_prevalence < 1.0))
        throw ConfigError("target prevalence must lie in (0,1)");
    if (!(target_c >= 0.5 && target_c < 1.0)) throw ConfigError("target c-statistic must lie in [0.5,1)");
    if (p < 0) throw ConfigError("predictor count must be non-negative");
    if (coefficients && coefficients->size() != p)
        throw ConfigError("explicit coefficient vector length must equal p");
    if (coefficients.has_value() != intercept.has_value())
        throw ConfigError("explicit truth needs both intercept and coefficients");
    if (correlation) {
        if (correlation->rows() != p || correlation->cols() != p)
            throw ConfigError("correlation matrix must be p x p");
    }
    if (calibration_draws < 1000) throw ConfigError("calibration_draws too small");
}

TrueModel calibrate(const GeneratorSpec& spec) {
    spec.validate();
    if (spec.coefficients) return {*spec.intercept, *spec.coefficients};

    // Equal slopes; sd(LP) = sqrt(2)*probit(C) makes a normal linear
    // predictor with concordance C.
    const double sigma = std::sqrt(2.0) * probit(spec.target_c);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(spec.p);
    if (spec.p > 0 && sigma > 0.0) beta.setConstant(sigma / std::sqrt(static_cast<double>(spec.p)));

    RngStream stream = RngStream(spec.seed).derive(StreamPurpose::Calibrate, 0);
    Eigen::VectorXd lp(spec.calibration_draws);
    for (long i = 0; i < spec.calibration_draws; ++i) lp[i] = sigma * stream.normal();

    const auto mean_risk = [&](double alpha) {
        double sum = 0.0;
        for (long i = 0; i < spec.calibration_draws; ++i) sum += inv_logit(alpha + lp[i]);
        return sum / static_cast<double>(spec.calibration_draws);
    };

    double lo = logit(spec.target_prevalence) - 40.0, hi = logit(spec.target_prevalence) + 40.0;
    if (mean_risk(lo) > spec.target_prevalence || mean_risk(hi) < spec.target_prevalence)
        throw RootBracketFailure("could not bracket the intercept for the target prevalence");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mean_risk(mid) < spec.target_prevalence ? lo : hi) = mid;
        if (hi - lo < 1e-12) break;
    }
    return {0.5 * (lo + hi), beta};
}

Cohort generate(const GeneratorSpec& spec) {
    const TrueModel truth = calibrate(spec);

    Eigen::MatrixXd chol;
    if (spec.correlation) {
        Eigen::LLT<Eigen::MatrixXd> llt(*spec.correlation);
        if (llt.info() != Eigen::Success)
            throw ConfigError("correlation matrix is not positive definite");
        chol = llt.matrixL();
    }

    const RngStream root(spec.seed);
    Cohort cohort;
    cohort.X.resize(spec.n, spec.p);
    cohort.y.resize(spec.n);
    cohort.ids.reserve(static_cast<std::size_t>(spec.n));
    for (int j = 0; j < spec.p; ++j) cohort.predictor_names.push_back("x" + std::to_string(j + 1));

    Eigen::VectorXd row(spec.p);
    for (Eigen::Index i = 0; i < spec.n; ++i) {
        RngStream rs = root.derive(StreamPurpose::Row, static_cast<std::uint64_t>(i));
        for (int j = 0; j < spec.p; ++j) row[j] = rs.normal();
        if (chol.size() > 0) row = chol * row;
        cohort.X.row(i) = row.transpose();
        const double risk = inv_logit(truth.intercept + truth.coefficients.dot(row));
        cohort.y[i] = rs.bernoulli(risk) ? 1.0 : 0.0;
        cohort.ids.push_back(std::to_string(i + 1));
    }

    return recruitment_stream(cohort, spec.seed);
}

}  // namespace seqsize
