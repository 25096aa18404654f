#include "seqsize/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "seqsize/logistic.hpp"

namespace seqsize {

double percentile(Eigen::VectorXd values, double q) {
    const Eigen::Index m = values.size();
    if (m == 0) throw DimensionMismatch("percentile of an empty sample");
    std::sort(values.data(), values.data() + m);
    if (m == 1) return values[0];
    const double h = q * static_cast<double>(m - 1);
    const Eigen::Index lo = static_cast<Eigen::Index>(std::floor(h));
    if (lo >= m - 1) return values[m - 1];
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double c_statistic(const Eigen::Ref<const Eigen::VectorXd>& risks,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
    const Eigen::Index n = risks.size();
    if (y.size() != n) throw DimensionMismatch("risk/outcome length mismatch");

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return risks[a] < risks[b]; });

    // Mid-rank Mann-Whitney: rank sums stay multiples of 0.5, so the result
    // is bit-identical to counting all pairs with ties worth one half.
    double event_rank_sum = 0.0;
    long n_events = 0;
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i;
        while (j + 1 < n && risks[idx[j + 1]] == risks[idx[i]]) ++j;
        const double mid_rank = 0.5 * static_cast<double>((i + 1) + (j + 1));
        for (Eigen::Index k = i; k <= j; ++k) {
            if (y[idx[k]] > 0.5) {
                event_rank_sum += mid_rank;
                ++n_events;
            }
        }
        i = j + 1;
    }
    const long n_nonevents = n - n_events;
    if (n_events == 0 || n_nonevents == 0) throw DegenerateOutcome();
    const double u = event_rank_sum - 0.5 * static_cast<double>(n_events) * static_cast<double>(n_events + 1);
    return u / (static_cast<double>(n_events) * static_cast<double>(n_nonevents));
}

double calibration_slope(const Eigen::Ref<const Eigen::VectorXd>& risks,
                         const Eigen::Ref<const Eigen::VectorXd>& y) {
    const Eigen::Index n = risks.size();
    if (y.size() != n) throw DimensionMismatch("risk/outcome length mismatch");
    Eigen::MatrixXd lp(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = std::min(std::max(risks[i], 1e-12), 1.0 - 1e-12);
        lp(i, 0) = logit(p);
    }
    const double mean = lp.col(0).mean();
    const double var = (lp.col(0).array() - mean).square().mean();
    if (var < 1e-12) throw ConstantLogit();
    const FittedModel refit = fit_logistic(lp, y);
    return refit.coefficients[0];
}

Eigen::MatrixX2d ui_bounds(const StabilityMatrix& matrix) {
    const Eigen::Index n = matrix.individuals();
    if (matrix.boot_risks.cols() != n) throw DimensionMismatch("stability matrix column count mismatch");
    Eigen::MatrixX2d bounds(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd column = matrix.boot_risks.col(i);
        std::sort(column.data(), column.data() + column.size());
        const Eigen::Index m = column.size();
        auto at = [&](double q) {
            if (m == 1) return column[0];
            const double h = q * static_cast<double>(m - 1);
            const Eigen::Index lo = static_cast<Eigen::Index>(std::floor(h));
            if (lo >= m - 1) return column[m - 1];
            return column[lo] + (h - static_cast<double>(lo)) * (column[lo + 1] - column[lo]);
        };
        bounds(i, 0) = at(0.025);
        bounds(i, 1) = at(0.975);
    }
    return bounds;
}

Eigen::VectorXd ui_widths(const StabilityMatrix& matrix) {
    const Eigen::MatrixX2d bounds = ui_bounds(matrix);
    return bounds.col(1) - bounds.col(0);
}

Eigen::VectorXd delta_stat(const StabilityMatrix& matrix) {
    const Eigen::MatrixX2d bounds = ui_bounds(matrix);
    const Eigen::Index n = matrix.individuals();
    Eigen::VectorXd delta(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double original = matrix.original_risks[i];
        delta[i] = std::max(original - bounds(i, 0), bounds(i, 1) - original);
    }
    return delta;
}

Eigen::VectorXd misclassification_prob(const StabilityMatrix& matrix, const UtilityConfig& cfg) {
    const Eigen::Index n = matrix.individuals();
    const Eigen::Index b = matrix.boot_risks.rows();
    const double z = cfg.threshold;
    Eigen::VectorXd prob(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool treat = matrix.original_risks[i] >= z;
        long opposite = 0;
        for (Eigen::Index r = 0; r < b; ++r) {
            const bool boot_treat = matrix.boot_risks(r, i) >= z;
            if (boot_treat != treat) ++opposite;
        }
        prob[i] = static_cast<double>(opposite) / static_cast<double>(b);
    }
    return prob;
}

SummaryStats summarize(const Eigen::Ref<const Eigen::VectorXd>& per_individual) {
    SummaryStats s;
    s.mean = per_individual.mean();
    s.p2_5 = percentile(per_individual, 0.025);
    s.p97_5 = percentile(per_individual, 0.975);
    return s;
}

namespace {

inline double net_benefit_term(double truth, double z) { return truth - (1.0 - truth) * z / (1.0 - z); }

}  // namespace

double nb_all(const Eigen::Ref<const Eigen::VectorXd>& truth_risks, const UtilityConfig& cfg) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < truth_risks.size(); ++i) sum += net_benefit_term(truth_risks[i], cfg.threshold);
    return sum / static_cast<double>(truth_risks.size());
}

double nb_model(const Eigen::Ref<const Eigen::VectorXd>& decision_risks,
                const Eigen::Ref<const Eigen::VectorXd>& truth_risks, const UtilityConfig& cfg) {
    if (decision_risks.size() != truth_risks.size()) throw DimensionMismatch("risk vector length mismatch");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < truth_risks.size(); ++i)
        if (decision_risks[i] >= cfg.threshold) sum += net_benefit_term(truth_risks[i], cfg.threshold);
    return sum / static_cast<double>(truth_risks.size());
}

double nb_max(const Eigen::Ref<const Eigen::VectorXd>& truth_risks, const UtilityConfig& cfg) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < truth_risks.size(); ++i)
        if (truth_risks[i] >= cfg.threshold) sum += net_benefit_term(truth_risks[i], cfg.threshold);
    return sum / static_cast<double>(truth_risks.size());
}

EvpiResult evpi(double enb_all, double enb_model, double enb_max) {
    EvpiResult result;
    result.value = enb_max - std::max({0.0, enb_model, enb_all});
    if (result.value < 0.0) {
        result.value = 0.0;
        result.clamped = true;
    }
    return result;
}

}  // namespace seqsize
