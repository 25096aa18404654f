#include "seqsize/bootstrap.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "seqsize/parallel.hpp"

namespace seqsize {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double slope_or_nan(const Eigen::VectorXd& risks, const Eigen::VectorXd& y) {
    try {
        return calibration_slope(risks, y);
    } catch (const ConstantLogit&) {
        return kNaN;
    }
}

}  // namespace

BootstrapResult harrell_bootstrap(const Cohort& cohort, const StrategySpec& spec, int b,
                                  const UtilityConfig& cfg, const RngStream& rng,
                                  const BootstrapOptions& options) {
    if (b < 1) throw ConfigError("bootstrap replicate count must be >= 1");
    const Eigen::Index n = cohort.n();

    DevelopOptions develop_opts;
    develop_opts.identity_resample = options.identity_resample;
    develop_opts.utility = cfg;

    const RngStream original_rng = rng.derive(StreamPurpose::Develop, 0);
    BootstrapResult result;
    result.original_model = develop(spec, cohort, original_rng, develop_opts);

    const Eigen::VectorXd original_risks = predict_risk(result.original_model, cohort.X);
    result.apparent_c = c_statistic(original_risks, cohort.y);
    result.apparent_slope = slope_or_nan(original_risks, cohort.y);

    // Per-replicate slots; filled independently, reduced in slot order so the
    // result never depends on scheduling.
    Eigen::MatrixXd boot_risks(b, n);
    std::vector<double> opt_c(static_cast<std::size_t>(b), kNaN);
    std::vector<double> opt_slope(static_cast<std::size_t>(b), kNaN);
    std::vector<double> rep_nb_all(static_cast<std::size_t>(b), 0.0);
    std::vector<double> rep_nb_model(static_cast<std::size_t>(b), 0.0);
    std::vector<double> rep_nb_max(static_cast<std::size_t>(b), 0.0);
    std::vector<double> rep_develop_evpi(static_cast<std::size_t>(b), kNaN);
    std::vector<int> failures(static_cast<std::size_t>(b), 0);
    std::vector<char> exhausted(static_cast<std::size_t>(b), 0);

    DevelopOptions replicate_opts = develop_opts;
    replicate_opts.nested = true;

    parallel_for(b, options.threads, [&](long slot) {
        const auto s = static_cast<std::size_t>(slot);
        RngStream slot_rng = rng.derive(StreamPurpose::Replicate, static_cast<std::uint64_t>(slot));

        for (int attempt = 0; attempt < options.redraw_cap; ++attempt) {
            std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
            if (options.identity_resample) {
                std::iota(idx.begin(), idx.end(), 0);
            } else {
                for (auto& v : idx)
                    v = static_cast<Eigen::Index>(slot_rng.uniform_below(static_cast<std::uint64_t>(n)));
            }
            const Cohort resample = cohort.subset(idx);

            FittedModel replicate_model;
            try {
                const RngStream dev_rng = options.identity_resample
                                              ? original_rng
                                              : slot_rng.derive(StreamPurpose::Develop,
                                                                static_cast<std::uint64_t>(attempt));
                replicate_model = develop(spec, resample, dev_rng, replicate_opts);
            } catch (const FitError&) {
                ++failures[s];
                continue;
            }

            const Eigen::VectorXd in_sample = predict_risk(replicate_model, resample.X);
            const Eigen::VectorXd on_original = predict_risk(replicate_model, cohort.X);

            const double c_in = c_statistic(in_sample, resample.y);
            const double c_out = c_statistic(on_original, cohort.y);
            opt_c[s] = c_in - c_out;

            const double slope_in = slope_or_nan(in_sample, resample.y);
            const double slope_out = slope_or_nan(on_original, cohort.y);
            opt_slope[s] = slope_in - slope_out;  // NaN if either is undefined

            boot_risks.row(slot) = on_original.transpose();
            rep_nb_all[s] = nb_all(on_original, cfg);
            rep_nb_model[s] = nb_model(original_risks, on_original, cfg);
            rep_nb_max[s] = nb_max(on_original, cfg);
            if (replicate_model.develop_evpi) rep_develop_evpi[s] = *replicate_model.develop_evpi;
            return;
        }
        exhausted[s] = 1;
    });

    int total_failures = 0;
    bool any_exhausted = false;
    for (int slot = 0; slot < b; ++slot) {
        total_failures += failures[static_cast<std::size_t>(slot)];
        any_exhausted = any_exhausted || exhausted[static_cast<std::size_t>(slot)];
    }
    result.replicate_failures = total_failures;
    if (any_exhausted || total_failures > options.max_failure_fraction * b)
        throw TooManyDegenerateReplicates(total_failures, b);

    double sum_opt_c = 0.0, sum_opt_slope = 0.0;
    double sum_nb_all = 0.0, sum_nb_model = 0.0, sum_nb_max = 0.0;
    int slope_defined = 0;
    for (int slot = 0; slot < b; ++slot) {
        const auto s = static_cast<std::size_t>(slot);
        sum_opt_c += opt_c[s];
        if (std::isnan(opt_slope[s])) {
            ++result.slope_undefined_replicates;
        } else {
            sum_opt_slope += opt_slope[s];
            ++slope_defined;
        }
        sum_nb_all += rep_nb_all[s];
        sum_nb_model += rep_nb_model[s];
        sum_nb_max += rep_nb_max[s];
    }

    result.optimism_c = sum_opt_c / b;
    result.corrected_c = result.apparent_c - result.optimism_c;
    result.optimism_slope = slope_defined > 0 ? sum_opt_slope / slope_defined : kNaN;
    result.corrected_slope = result.apparent_slope - result.optimism_slope;

    result.enb_all = sum_nb_all / b;
    result.enb_model = sum_nb_model / b;
    result.enb_max = sum_nb_max / b;
    const EvpiResult e = evpi(result.enb_all, result.enb_model, result.enb_max);
    result.evpi = e.value;
    result.evpi_clamped = e.clamped;

    if (spec.kind == StrategyKind::BootstrapShrinkage && result.original_model.develop_evpi) {
        // One EVPI per developed shrinkage model (original + every replicate),
        // averaged.
        double sum = *result.original_model.develop_evpi;
        int count = 1;
        for (int slot = 0; slot < b; ++slot) {
            const double v = rep_develop_evpi[static_cast<std::size_t>(slot)];
            if (!std::isnan(v)) {
                sum += v;
                ++count;
            }
        }
        result.evpi = sum / count;
        result.evpi_clamped = false;
    }

    result.stability.original_risks = original_risks;
    result.stability.boot_risks = std::move(boot_risks);
    result.stability.b = b;
    return result;
}

CorrectedPerformance corrected_performance(const BootstrapResult& result) {
    return {result.corrected_c, result.corrected_slope, result.optimism_c, result.optimism_slope};
}

}  // namespace seqsize
