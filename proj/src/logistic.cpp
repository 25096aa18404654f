#include "seqsize/logistic.hpp"

#include <cmath>

namespace seqsize {

namespace {

constexpr double kRiskFloor = 1e-12;
constexpr double kSeparationTol = 1e-10;

Eigen::VectorXd clamp_risks(Eigen::VectorXd risks) {
    for (Eigen::Index i = 0; i < risks.size(); ++i)
        risks[i] = std::min(std::max(risks[i], kRiskFloor), 1.0 - kRiskFloor);
    return risks;
}

double deviance(const Eigen::VectorXd& risks, const Eigen::Ref<const Eigen::VectorXd>& y) {
    double dev = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double p = std::min(std::max(risks[i], kRiskFloor), 1.0 - kRiskFloor);
        dev -= 2.0 * (y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p));
    }
    return dev;
}

}  // namespace

const char* strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Unpenalised: return "unpenalised";
        case StrategyKind::HeuristicShrinkage: return "heuristic_shrinkage";
        case StrategyKind::BootstrapShrinkage: return "bootstrap_shrinkage";
        case StrategyKind::Lasso: return "lasso";
    }
    return "?";
}

FittedModel fit_logistic(const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXd>& y,
                         const std::optional<Eigen::VectorXd>& offset, const FitOptions& options) {
    const Eigen::Index n = y.size();
    const Eigen::Index p = X.cols();
    if (X.rows() != n) throw DimensionMismatch("design rows do not match outcome length");
    if (offset && offset->size() != n) throw DimensionMismatch("offset length mismatch");
    if (n == 0) throw DegenerateOutcome();

    const double ybar = y.mean();
    if (ybar <= 0.0 || ybar >= 1.0) throw DegenerateOutcome();

    // Design with the intercept in column 0.
    Eigen::MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    if (p > 0) design.rightCols(p) = X;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
    beta[0] = logit(ybar);
    if (offset) beta[0] -= offset->mean();

    Eigen::VectorXd eta(n), risks(n);
    auto update_risks = [&](const Eigen::VectorXd& coefs) {
        eta = design * coefs;
        if (offset) eta += *offset;
        risks.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) risks[i] = inv_logit(eta[i]);
    };
    update_risks(beta);
    double dev = deviance(risks, y);

    auto check_separation = [&]() {
        for (Eigen::Index i = 0; i < n; ++i)
            if (risks[i] < kSeparationTol || risks[i] > 1.0 - kSeparationTol) throw QuasiSeparation();
    };

    FittedModel model;
    for (int iter = 0;; ++iter) {
        const Eigen::VectorXd score = design.transpose() * (y - risks);
        if (score.cwiseAbs().maxCoeff() < options.score_tol) {
            // Converged; refuse to return a fit whose risks are pinned.
            check_separation();
            model.converged = true;
            model.iterations = iter;
            break;
        }
        if (iter == options.max_iterations) {
            check_separation();
            throw NonConvergence(options.max_iterations);
        }

        Eigen::VectorXd w(n);
        for (Eigen::Index i = 0; i < n; ++i) w[i] = risks[i] * (1.0 - risks[i]);

        // Weighted least squares step on sqrt(W)-scaled design; column-pivoted
        // QR flags rank deficiency.
        const Eigen::VectorXd sw = w.cwiseSqrt();
        Eigen::MatrixXd wls = sw.asDiagonal() * design;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(wls);
        qr.setThreshold(1e-10);
        if (qr.rank() < p + 1) {
            check_separation();
            throw SingularDesign();
        }
        Eigen::VectorXd z(n);  // working response, already sqrt(W)-scaled
        for (Eigen::Index i = 0; i < n; ++i) z[i] = sw[i] * eta[i] + (y[i] - risks[i]) / sw[i];
        if (offset)
            for (Eigen::Index i = 0; i < n; ++i) z[i] -= sw[i] * (*offset)[i];
        Eigen::VectorXd proposal = qr.solve(z);

        // Step-halve if the deviance increases beyond summation noise.
        const double dev_slack = 1e-9 * (std::abs(dev) + 1.0);
        update_risks(proposal);
        double new_dev = deviance(risks, y);
        for (int half = 0; half < 30 && new_dev > dev + dev_slack; ++half) {
            proposal = 0.5 * (beta + proposal);
            update_risks(proposal);
            new_dev = deviance(risks, y);
        }
        beta = proposal;
        dev = new_dev;
    }

    model.intercept = beta[0];
    model.coefficients = beta.tail(p);
    return model;
}

FittedModel fit_logistic(const Cohort& cohort, const std::optional<Eigen::VectorXd>& offset,
                         const FitOptions& options) {
    return fit_logistic(cohort.X, cohort.y, offset, options);
}

Eigen::VectorXd linear_predictor(const FittedModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X) {
    if (X.cols() != model.coefficients.size())
        throw DimensionMismatch("matrix has " + std::to_string(X.cols()) + " columns, model expects " +
                                std::to_string(model.coefficients.size()));
    return (X * model.coefficients).array() + model.intercept;
}

Eigen::VectorXd predict_risk(const FittedModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X) {
    Eigen::VectorXd lp = linear_predictor(model, X);
    for (Eigen::Index i = 0; i < lp.size(); ++i) lp[i] = inv_logit(lp[i]);
    return clamp_risks(std::move(lp));
}

double log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& risks,
                      const Eigen::Ref<const Eigen::VectorXd>& y) {
    if (risks.size() != y.size()) throw DimensionMismatch("risk/outcome length mismatch");
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double p = std::min(std::max(risks[i], kRiskFloor), 1.0 - kRiskFloor);
        ll += y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p);
    }
    return ll;
}

double lr_chi2(const FittedModel& model, const Cohort& cohort) {
    const Eigen::VectorXd risks = predict_risk(model, cohort.X);
    const Eigen::MatrixXd empty(cohort.n(), 0);
    const FittedModel null_model = fit_logistic(empty, cohort.y);
    const Eigen::VectorXd null_risks = predict_risk(null_model, empty);
    return 2.0 * (log_likelihood(risks, cohort.y) - log_likelihood(null_risks, cohort.y));
}

}  // namespace seqsize
