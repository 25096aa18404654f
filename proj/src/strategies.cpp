#include "seqsize/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqsize/bootstrap.hpp"

namespace seqsize {

void StrategySpec::validate() const {
    if (inner_bootstrap_b < 1) throw ConfigError("inner_bootstrap_b must be >= 1");
    if (nested_inner_b < 1) throw ConfigError("nested_inner_b must be >= 1");
    if (cv_folds < 2) throw ConfigError("cv_folds must be >= 2");
    for (std::size_t i = 0; i + 1 < lambda_grid.size(); ++i)
        if (!(lambda_grid[i] > lambda_grid[i + 1]))
            throw ConfigError("lambda_grid must be strictly descending");
    for (double lambda : lambda_grid)
        if (!(lambda >= 0.0)) throw ConfigError("lambda values must be non-negative");
}

ShrinkageFactor heuristic_shrinkage_factor(double chi2, int df) {
    if (df < 1) throw ConfigError("degrees of freedom must be positive");
    if (chi2 < 1e-12) return {0.0, true};
    const double h = (chi2 - static_cast<double>(df)) / chi2;
    return {std::min(std::max(h, 0.0), 1.0), false};
}

FittedModel apply_uniform_shrinkage(const FittedModel& model, double s, const Cohort& cohort) {
    if (model.coefficients.size() != cohort.p())
        throw DimensionMismatch("model does not match cohort predictor count");
    const Eigen::VectorXd offset = s * (cohort.X * model.coefficients);
    const Eigen::MatrixXd empty(cohort.n(), 0);
    const FittedModel intercept_fit = fit_logistic(empty, cohort.y, offset);

    FittedModel out = model;
    out.intercept = intercept_fit.intercept;
    out.coefficients = s * model.coefficients;
    out.shrinkage_factor = s;
    out.converged = intercept_fit.converged;
    out.iterations = intercept_fit.iterations;
    return out;
}

FittedModel bootstrap_shrinkage_develop(const Cohort& cohort, int inner_b, const RngStream& rng,
                                        const DevelopOptions& options) {
    StrategySpec inner_spec;
    inner_spec.kind = StrategyKind::Unpenalised;
    BootstrapOptions inner_opts;
    inner_opts.identity_resample = options.identity_resample;
    inner_opts.threads = 1;  // nested inside outer replicates; no thread fan-out

    const BootstrapResult inner =
        harrell_bootstrap(cohort, inner_spec, inner_b, options.utility, rng, inner_opts);
    const double s = std::min(std::max(inner.corrected_slope, 0.0), 1.0);

    FittedModel out = apply_uniform_shrinkage(inner.original_model, s, cohort);
    out.strategy_tag = StrategyKind::BootstrapShrinkage;
    out.develop_evpi = inner.evpi;
    return out;
}

namespace {

struct Standardized {
    Eigen::MatrixXd X;        // columns centred and scaled
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;       // population sd; zero-variance columns keep sd=0
    std::vector<bool> active; // false for zero-variance columns
};

Standardized standardize(const Eigen::MatrixXd& X) {
    Standardized s;
    const Eigen::Index n = X.rows(), p = X.cols();
    s.X.resize(n, p);
    s.mean.resize(p);
    s.sd.resize(p);
    s.active.assign(static_cast<std::size_t>(p), true);
    for (Eigen::Index j = 0; j < p; ++j) {
        s.mean[j] = X.col(j).mean();
        const double var = (X.col(j).array() - s.mean[j]).square().mean();
        s.sd[j] = std::sqrt(var);
        if (s.sd[j] < 1e-12) {
            // constant column: excluded from the penalised fit, slope stays 0
            s.active[static_cast<std::size_t>(j)] = false;
            s.X.col(j).setZero();
            s.sd[j] = 0.0;
        } else {
            s.X.col(j) = (X.col(j).array() - s.mean[j]) / s.sd[j];
        }
    }
    return s;
}

inline double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

// Penalised weighted least squares by cyclic coordinate descent inside an
// IRLS loop (quadratic approximation of the logistic likelihood). Weights
// use risks clamped to [1e-5, 1-1e-5] to keep the working response finite.
struct LassoCore {
    double intercept = 0.0;
    Eigen::VectorXd beta;  // standardized scale
    bool converged = false;
    int iterations = 0;
};

LassoCore lasso_cd(const Standardized& s, const Eigen::VectorXd& y, double lambda,
                   const LassoCore* warm) {
    const Eigen::Index n = y.size(), p = s.X.cols();
    const double ybar = y.mean();
    if (ybar <= 0.0 || ybar >= 1.0) throw DegenerateOutcome();

    LassoCore state;
    if (warm) {
        state = *warm;
    } else {
        state.intercept = logit(ybar);
        state.beta = Eigen::VectorXd::Zero(p);
    }

    Eigen::VectorXd eta = s.X * state.beta;
    eta.array() += state.intercept;

    const int max_outer = 200;
    const double outer_tol = 1e-11;
    for (int outer = 1; outer <= max_outer; ++outer) {
        Eigen::VectorXd w(n), z(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double risk = inv_logit(eta[i]);
            risk = std::min(std::max(risk, 1e-5), 1.0 - 1e-5);
            w[i] = risk * (1.0 - risk);
            z[i] = eta[i] + (y[i] - risk) / w[i];
        }
        const double w_sum = w.sum();
        Eigen::VectorXd wx2(p);  // (1/n) sum w x^2 per coordinate
        for (Eigen::Index j = 0; j < p; ++j)
            wx2[j] = s.active[static_cast<std::size_t>(j)]
                         ? (w.array() * s.X.col(j).array().square()).sum() / static_cast<double>(n)
                         : 0.0;

        Eigen::VectorXd r = z - eta;  // residual of the working response
        double outer_change = 0.0;

        for (int pass = 0; pass < 10000; ++pass) {
            double pass_change = 0.0;
            // intercept, unpenalised
            {
                const double delta = (w.array() * r.array()).sum() / w_sum;
                state.intercept += delta;
                r.array() -= delta;
                pass_change = std::max(pass_change, std::abs(delta));
            }
            for (Eigen::Index j = 0; j < p; ++j) {
                if (!s.active[static_cast<std::size_t>(j)]) continue;
                const double old = state.beta[j];
                const double grad =
                    (w.array() * s.X.col(j).array() * r.array()).sum() / static_cast<double>(n) +
                    wx2[j] * old;
                const double updated = soft_threshold(grad, lambda) / wx2[j];
                if (updated != old) {
                    state.beta[j] = updated;
                    r -= (updated - old) * s.X.col(j);
                    pass_change = std::max(pass_change, std::abs(updated - old));
                }
            }
            outer_change = std::max(outer_change, pass_change);
            if (pass_change < 1e-13) break;
        }

        eta = s.X * state.beta;
        eta.array() += state.intercept;

        if (outer_change < outer_tol) {
            state.converged = true;
            state.iterations = outer;
            return state;
        }
    }
    throw NonConvergence(max_outer);
}

FittedModel to_original_scale(const LassoCore& core, const Standardized& s, double lambda) {
    FittedModel model;
    model.strategy_tag = StrategyKind::Lasso;
    model.penalty = lambda;
    model.converged = core.converged;
    model.iterations = core.iterations;
    const Eigen::Index p = s.sd.size();
    model.coefficients.resize(p);
    double intercept = core.intercept;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (s.active[static_cast<std::size_t>(j)]) {
            model.coefficients[j] = core.beta[j] / s.sd[j];
            intercept -= core.beta[j] * s.mean[j] / s.sd[j];
        } else {
            model.coefficients[j] = 0.0;
        }
    }
    model.intercept = intercept;
    return model;
}

}  // namespace

FittedModel lasso_fit(const Cohort& cohort, double lambda) {
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
    const Standardized s = standardize(cohort.X);
    const LassoCore core = lasso_cd(s, cohort.y, lambda, nullptr);
    return to_original_scale(core, s, lambda);
}

double lasso_lambda_max(const Cohort& cohort) {
    const Standardized s = standardize(cohort.X);
    const double ybar = cohort.y.mean();
    double lmax = 0.0;
    for (Eigen::Index j = 0; j < cohort.p(); ++j) {
        if (!s.active[static_cast<std::size_t>(j)]) continue;
        const double g = (s.X.col(j).array() * (cohort.y.array() - ybar)).sum() /
                         static_cast<double>(cohort.n());
        lmax = std::max(lmax, std::abs(g));
    }
    return lmax;
}

std::vector<double> default_lambda_grid(const Cohort& cohort) {
    const double lmax = lasso_lambda_max(cohort);
    if (lmax <= 0.0) return {0.0};
    const int count = 100;
    const double lmin = 1e-4 * lmax;
    std::vector<double> grid(count);
    const double step = std::log(lmin / lmax) / static_cast<double>(count - 1);
    for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = lmax * std::exp(step * i);
    return grid;
}

std::vector<int> make_stratified_folds(const Cohort& cohort, int folds, RngStream rng) {
    if (folds < 2) throw ConfigError("folds must be >= 2");
    const Eigen::Index n = cohort.n();
    std::vector<Eigen::Index> events, nonevents;
    for (Eigen::Index i = 0; i < n; ++i) (cohort.y[i] > 0.5 ? events : nonevents).push_back(i);

    auto shuffle = [&rng](std::vector<Eigen::Index>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[rng.uniform_below(i)]);
    };

    for (int attempt = 0; attempt < 10; ++attempt) {
        shuffle(events);
        shuffle(nonevents);
        std::vector<int> assignment(static_cast<std::size_t>(n), 0);
        for (std::size_t k = 0; k < events.size(); ++k)
            assignment[static_cast<std::size_t>(events[k])] = static_cast<int>(k % folds);
        for (std::size_t k = 0; k < nonevents.size(); ++k)
            assignment[static_cast<std::size_t>(nonevents[k])] = static_cast<int>(k % folds);

        std::vector<int> fold_events(static_cast<std::size_t>(folds), 0);
        std::vector<int> fold_nonevents(static_cast<std::size_t>(folds), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto f = static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)]);
            ++(cohort.y[i] > 0.5 ? fold_events : fold_nonevents)[f];
        }
        const bool valid =
            std::all_of(fold_events.begin(), fold_events.end(), [](int c) { return c > 0; }) &&
            std::all_of(fold_nonevents.begin(), fold_nonevents.end(), [](int c) { return c > 0; });
        if (valid) return assignment;
    }
    throw UnsplittableCohort();
}

FittedModel lasso_cv_develop(const Cohort& cohort, int folds, std::vector<double> lambda_grid,
                             const RngStream& rng, double cv_rel_tol) {
    if (lambda_grid.empty()) lambda_grid = default_lambda_grid(cohort);
    const std::size_t n_lambda = lambda_grid.size();
    const std::vector<int> assignment = make_stratified_folds(cohort, folds, rng.derive(StreamPurpose::Folds, 0));

    std::vector<double> sse(n_lambda, 0.0);
    for (int f = 0; f < folds; ++f) {
        std::vector<Eigen::Index> train, test;
        for (Eigen::Index i = 0; i < cohort.n(); ++i)
            (assignment[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
        const Cohort train_cohort = cohort.subset(train);
        const Cohort test_cohort = cohort.subset(test);

        const Standardized s = standardize(train_cohort.X);
        LassoCore warm;
        bool have_warm = false;
        for (std::size_t li = 0; li < n_lambda; ++li) {
            const LassoCore core = lasso_cd(s, train_cohort.y, lambda_grid[li], have_warm ? &warm : nullptr);
            warm = core;
            have_warm = true;
            const FittedModel model = to_original_scale(core, s, lambda_grid[li]);
            const Eigen::VectorXd risks = predict_risk(model, test_cohort.X);
            sse[li] += (test_cohort.y - risks).squaredNorm();
        }
    }

    // Largest lambda whose loss sits within the plateau around the minimum
    // (the grid is descending, so that is the first qualifying index).
    std::size_t min_idx = 0;
    for (std::size_t li = 1; li < n_lambda; ++li)
        if (sse[li] < sse[min_idx]) min_idx = li;
    const double cutoff = sse[min_idx] * (1.0 + std::max(cv_rel_tol, 0.0));
    std::size_t best = min_idx;
    for (std::size_t li = 0; li < n_lambda; ++li)
        if (sse[li] <= cutoff) {
            best = li;
            break;
        }

    FittedModel model = lasso_fit(cohort, lambda_grid[best]);
    model.penalty = lambda_grid[best];
    return model;
}

FittedModel develop(const StrategySpec& spec, const Cohort& cohort, const RngStream& rng,
                    const DevelopOptions& options) {
    spec.validate();
    switch (spec.kind) {
        case StrategyKind::Unpenalised: {
            FittedModel model = fit_logistic(cohort);
            model.strategy_tag = StrategyKind::Unpenalised;
            return model;
        }
        case StrategyKind::HeuristicShrinkage: {
            FittedModel base = fit_logistic(cohort);
            const double chi2 = lr_chi2(base, cohort);
            const ShrinkageFactor h = heuristic_shrinkage_factor(chi2, static_cast<int>(cohort.p()));
            FittedModel model = apply_uniform_shrinkage(base, h.value, cohort);
            model.strategy_tag = StrategyKind::HeuristicShrinkage;
            model.shrinkage_zero_chi2 = h.zero_chi2;
            return model;
        }
        case StrategyKind::BootstrapShrinkage: {
            const int inner_b = options.nested ? spec.nested_inner_b : spec.inner_bootstrap_b;
            return bootstrap_shrinkage_develop(cohort, inner_b,
                                               rng.derive(StreamPurpose::InnerBootstrap, 0), options);
        }
        case StrategyKind::Lasso:
            return lasso_cv_develop(cohort, spec.cv_folds, spec.lambda_grid, rng, spec.cv_rel_tol);
    }
    throw ConfigError("unknown strategy kind");
}

}  // namespace seqsize
