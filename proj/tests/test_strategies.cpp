#include <doctest.h>

#include <cmath>

#include "seqsize/bootstrap.hpp"
#include "seqsize/strategies.hpp"

using namespace seqsize;

namespace {

Cohort synthetic_cohort(Eigen::Index n, Eigen::Index p, std::uint64_t seed,
                        const Eigen::VectorXd* beta = nullptr, double intercept = -1.6) {
    RngStream rng(seed);
    Cohort c;
    c.X.resize(n, p);
    c.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double lp = intercept;
        for (Eigen::Index j = 0; j < p; ++j) {
            c.X(i, j) = rng.normal();
            lp += (beta ? (*beta)[j] : 0.3) * c.X(i, j);
        }
        c.y[i] = rng.bernoulli(inv_logit(lp)) ? 1.0 : 0.0;
    }
    return c;
}

// Population-standardized coordinates for KKT checks.
struct Std {
    Eigen::MatrixXd X;
    Eigen::VectorXd sd;
};

Std standardize_for_test(const Eigen::MatrixXd& X) {
    Std s;
    s.X.resizeLike(X);
    s.sd.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double mean = X.col(j).mean();
        s.sd[j] = std::sqrt((X.col(j).array() - mean).square().mean());
        s.X.col(j) = (X.col(j).array() - mean) / s.sd[j];
    }
    return s;
}

double penalized_objective(const Cohort& c, const FittedModel& m, double lambda) {
    const Eigen::VectorXd lp = linear_predictor(m, c.X);
    double nll = 0.0;
    for (Eigen::Index i = 0; i < c.n(); ++i)
        nll += std::log(1.0 + std::exp(lp[i])) - c.y[i] * lp[i];
    nll /= static_cast<double>(c.n());
    const Std s = standardize_for_test(c.X);
    double l1 = 0.0;
    for (Eigen::Index j = 0; j < c.p(); ++j) l1 += std::abs(m.coefficients[j] * s.sd[j]);
    return nll + lambda * l1;
}

}  // namespace

TEST_SUITE_BEGIN("strategies");

TEST_CASE("unpenalised develop equals a plain fit") {
    const Cohort c = synthetic_cohort(300, 4, 7);
    const FittedModel direct = fit_logistic(c);
    const FittedModel dev = develop({}, c, RngStream(1));
    CHECK(dev.intercept == direct.intercept);
    CHECK((dev.coefficients - direct.coefficients).cwiseAbs().maxCoeff() == 0.0);
    CHECK(dev.strategy_tag == StrategyKind::Unpenalised);
}

TEST_CASE("heuristic shrinkage factor arithmetic") {
    CHECK(heuristic_shrinkage_factor(60.0, 6).value == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(heuristic_shrinkage_factor(6.0, 6).value == 0.0);
    CHECK(heuristic_shrinkage_factor(12.0, 6).value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(heuristic_shrinkage_factor(3.0, 6).value == 0.0);  // clamped

    const ShrinkageFactor zero = heuristic_shrinkage_factor(1e-14, 6);
    CHECK(zero.value == 0.0);
    CHECK(zero.zero_chi2);
    CHECK_FALSE(heuristic_shrinkage_factor(60.0, 6).zero_chi2);
}

TEST_CASE("uniform shrinkage endpoints and calibration-in-the-large") {
    const Cohort c = synthetic_cohort(400, 3, 13);
    const FittedModel base = fit_logistic(c);

    const FittedModel s1 = apply_uniform_shrinkage(base, 1.0, c);
    CHECK((s1.coefficients - base.coefficients).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s1.intercept == doctest::Approx(base.intercept).epsilon(1e-6));

    const FittedModel s0 = apply_uniform_shrinkage(base, 0.0, c);
    CHECK(s0.coefficients.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s0.intercept == doctest::Approx(logit(c.y.mean())).epsilon(1e-8));

    const FittedModel s5 = apply_uniform_shrinkage(base, 0.5, c);
    for (Eigen::Index j = 0; j < c.p(); ++j)
        CHECK(s5.coefficients[j] == doctest::Approx(0.5 * base.coefficients[j]).epsilon(1e-15));
    CHECK(predict_risk(s5, c.X).mean() == doctest::Approx(c.y.mean()).epsilon(1e-8));
    CHECK(s5.shrinkage_factor == 0.5);
}

TEST_CASE("shrunk models stay calibrated in the large for any factor") {
    const Cohort c = synthetic_cohort(250, 4, 17);
    const FittedModel base = fit_logistic(c);
    for (double s : {0.1, 0.37, 0.64, 0.92}) {
        const FittedModel shrunk = apply_uniform_shrinkage(base, s, c);
        CHECK(predict_risk(shrunk, c.X).mean() == doctest::Approx(c.y.mean()).epsilon(1e-8));
    }
}

TEST_CASE("heuristic strategy composes fit, chi2 and shrinkage") {
    const Cohort c = synthetic_cohort(350, 5, 19);
    StrategySpec spec;
    spec.kind = StrategyKind::HeuristicShrinkage;
    const FittedModel dev = develop(spec, c, RngStream(3));

    const FittedModel base = fit_logistic(c);
    const ShrinkageFactor h = heuristic_shrinkage_factor(lr_chi2(base, c), static_cast<int>(c.p()));
    const FittedModel expected = apply_uniform_shrinkage(base, h.value, c);
    CHECK(dev.strategy_tag == StrategyKind::HeuristicShrinkage);
    CHECK(dev.shrinkage_factor == h.value);
    CHECK((dev.coefficients - expected.coefficients).cwiseAbs().maxCoeff() == 0.0);
    CHECK(dev.intercept == expected.intercept);
    CHECK(*dev.shrinkage_factor >= 0.0);
    CHECK(*dev.shrinkage_factor <= 1.0);
}

TEST_CASE("lasso at lambda zero matches the MLE") {
    const Cohort c = synthetic_cohort(500, 4, 23);
    const FittedModel mle = fit_logistic(c);
    const FittedModel lasso = lasso_fit(c, 0.0);
    CHECK(std::abs(lasso.intercept - mle.intercept) < 1e-4);
    for (Eigen::Index j = 0; j < c.p(); ++j)
        CHECK(std::abs(lasso.coefficients[j] - mle.coefficients[j]) < 1e-4);
}

TEST_CASE("lasso at lambda_max zeroes every slope") {
    const Cohort c = synthetic_cohort(300, 5, 29);
    const double lmax = lasso_lambda_max(c);
    for (double lambda : {lmax, 2.0 * lmax}) {
        const FittedModel m = lasso_fit(c, lambda);
        CHECK(m.coefficients.cwiseAbs().maxCoeff() == 0.0);
        CHECK(m.intercept == doctest::Approx(logit(c.y.mean())).epsilon(1e-8));
    }
}

TEST_CASE("lasso satisfies the subgradient KKT conditions") {
    Eigen::VectorXd beta(6);
    beta << 0.8, 0.5, 0.0, 0.0, 0.0, 0.0;
    const Cohort c = synthetic_cohort(200, 6, 31, &beta);
    const double lambda = 0.4 * lasso_lambda_max(c);
    const FittedModel m = lasso_fit(c, lambda);

    const Std s = standardize_for_test(c.X);
    const Eigen::VectorXd risks = predict_risk(m, c.X);
    for (Eigen::Index j = 0; j < c.p(); ++j) {
        const double grad = (s.X.col(j).array() * (risks - c.y).array()).mean();
        const double beta_std = m.coefficients[j] * s.sd[j];
        if (beta_std != 0.0) {
            CHECK(std::abs(grad + lambda * (beta_std > 0 ? 1.0 : -1.0)) < 1e-6);
        } else {
            CHECK(std::abs(grad) <= lambda + 1e-6);
        }
    }
    // at least one coordinate should actually be zero at this penalty
    CHECK((m.coefficients.array() == 0.0).any());
}

TEST_CASE("pathwise solutions are optimal for their own penalty") {
    const Cohort c = synthetic_cohort(250, 4, 37);
    const double lmax = lasso_lambda_max(c);
    const std::vector<double> grid = {0.8 * lmax, 0.4 * lmax, 0.1 * lmax, 0.01 * lmax};
    std::vector<FittedModel> fits;
    for (double l : grid) fits.push_back(lasso_fit(c, l));
    for (std::size_t a = 0; a < grid.size(); ++a)
        for (std::size_t b = 0; b < grid.size(); ++b) {
            // evaluating b's objective at a's solution cannot beat b's own
            CHECK(penalized_objective(c, fits[a], grid[b]) >=
                  penalized_objective(c, fits[b], grid[b]) - 1e-9);
        }
}

TEST_CASE("stratified folds keep both classes everywhere") {
    const Cohort c = synthetic_cohort(97, 3, 41);
    const std::vector<int> folds = make_stratified_folds(c, 7, RngStream(5));
    std::vector<int> ev(7, 0), ne(7, 0);
    for (Eigen::Index i = 0; i < c.n(); ++i) ++(c.y[i] > 0.5 ? ev : ne)[static_cast<std::size_t>(folds[static_cast<std::size_t>(i)])];
    for (int f = 0; f < 7; ++f) {
        CHECK(ev[static_cast<std::size_t>(f)] > 0);
        CHECK(ne[static_cast<std::size_t>(f)] > 0);
    }
}

TEST_CASE("folds are unsplittable when a class has fewer members than folds") {
    Cohort c = synthetic_cohort(40, 2, 43);
    c.y.setZero();
    c.y.head(3).setOnes();  // 3 events, 10 folds
    CHECK_THROWS_AS(make_stratified_folds(c, 10, RngStream(5)), UnsplittableCohort);
}

TEST_CASE("lasso CV with a single huge lambda gives the intercept-only model") {
    const Cohort c = synthetic_cohort(300, 4, 47);
    const FittedModel m = lasso_cv_develop(c, 5, {1e6}, RngStream(11));
    CHECK(m.coefficients.cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.intercept == doctest::Approx(logit(c.y.mean())).epsilon(1e-8));
    CHECK(m.penalty == 1e6);
}

TEST_CASE("lasso CV with only lambda zero reduces to the MLE") {
    const Cohort c = synthetic_cohort(300, 3, 53);
    const FittedModel mle = fit_logistic(c);
    const FittedModel m = lasso_cv_develop(c, 5, {0.0}, RngStream(11));
    CHECK(std::abs(m.intercept - mle.intercept) < 1e-4);
    for (Eigen::Index j = 0; j < c.p(); ++j)
        CHECK(std::abs(m.coefficients[j] - mle.coefficients[j]) < 1e-4);
}

TEST_CASE("lasso CV prunes truly null coefficients on most seeds") {
    Eigen::VectorXd beta(6);
    beta << 0.5, 0.4, 0.3, 0.0, 0.0, 0.0;
    int pruned = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Cohort c = synthetic_cohort(2000, 6, 1000 + seed, &beta);
        StrategySpec spec;
        spec.kind = StrategyKind::Lasso;
        spec.cv_folds = 10;
        const FittedModel m = develop(spec, c, RngStream(seed));
        const bool any_null_zero =
            m.coefficients[3] == 0.0 || m.coefficients[4] == 0.0 || m.coefficients[5] == 0.0;
        if (any_null_zero) ++pruned;
    }
    CHECK(pruned >= 8);
}

TEST_CASE("develop is deterministic in the seed") {
    const Cohort c = synthetic_cohort(400, 6, 59);
    for (StrategyKind kind : {StrategyKind::Unpenalised, StrategyKind::HeuristicShrinkage,
                              StrategyKind::BootstrapShrinkage, StrategyKind::Lasso}) {
        StrategySpec spec;
        spec.kind = kind;
        spec.inner_bootstrap_b = 50;
        const FittedModel a = develop(spec, c, RngStream(77));
        const FittedModel b = develop(spec, c, RngStream(77));
        CHECK(a.intercept == b.intercept);
        CHECK((a.coefficients - b.coefficients).cwiseAbs().maxCoeff() == 0.0);
        if (a.shrinkage_factor) CHECK(*a.shrinkage_factor == *b.shrinkage_factor);
        if (a.penalty) CHECK(*a.penalty == *b.penalty);
    }
}

TEST_CASE("bootstrap shrinkage with identity resampling returns the unpenalised fit") {
    const Cohort c = synthetic_cohort(300, 4, 61);
    DevelopOptions opts;
    opts.identity_resample = true;
    const FittedModel m = bootstrap_shrinkage_develop(c, 50, RngStream(9), opts);
    const FittedModel base = fit_logistic(c);
    CHECK(*m.shrinkage_factor == doctest::Approx(1.0).epsilon(1e-5));
    for (Eigen::Index j = 0; j < c.p(); ++j)
        CHECK(m.coefficients[j] == doctest::Approx(base.coefficients[j]).epsilon(1e-4));
    CHECK(m.intercept == doctest::Approx(base.intercept).epsilon(1e-4));
    REQUIRE(m.develop_evpi.has_value());
    CHECK(*m.develop_evpi == 0.0);
}

TEST_CASE("bootstrap shrinkage shrinks a noisy small-sample model") {
    // pure noise: any apparent fit is overfitting, so the corrected slope
    // must land clearly below 1
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(6);
    const Cohort c = synthetic_cohort(150, 6, 67, &beta, -1.2);
    const FittedModel m = bootstrap_shrinkage_develop(c, 200, RngStream(21));
    REQUIRE(m.shrinkage_factor.has_value());
    CHECK(*m.shrinkage_factor < 1.0);
    CHECK(m.strategy_tag == StrategyKind::BootstrapShrinkage);
}

TEST_SUITE_END();
