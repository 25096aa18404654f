#pragma once

#include "seqsize/cohort.hpp"
#include "seqsize/metrics.hpp"
#include "seqsize/rng.hpp"
#include "seqsize/strategies.hpp"

namespace seqsize {

struct BootstrapOptions {
    int redraw_cap = 5;                 // resample attempts per replicate slot
    double max_failure_fraction = 0.10; // failed fits tolerated before giving up
    bool identity_resample = false;     // every resample is the original sample
    int threads = 0;                    // 0 = hardware concurrency
};

struct BootstrapResult {
    FittedModel original_model;

    double apparent_c = 0.0;
    double apparent_slope = 0.0;
    double optimism_c = 0.0;      // mean over replicates of (apparent_b - test_b)
    double optimism_slope = 0.0;
    double corrected_c = 0.0;
    double corrected_slope = 0.0;

    StabilityMatrix stability;

    double enb_all = 0.0;
    double enb_model = 0.0;
    double enb_max = 0.0;
    double evpi = 0.0;
    bool evpi_clamped = false;

    int replicate_failures = 0;
    int slope_undefined_replicates = 0;  // replicates whose test slope was undefined
};

struct CorrectedPerformance {
    double corrected_c = 0.0;
    double corrected_slope = 0.0;
    double optimism_c = 0.0;
    double optimism_slope = 0.0;
};

// Optimism bootstrap: each replicate resamples n rows with replacement,
// re-runs the full development strategy, and is scored both in its own
// resample and back on the original data. Replicate streams are keyed by
// slot index, so results are independent of thread count; failed fits are
// redrawn from the same slot stream up to the cap.
BootstrapResult harrell_bootstrap(const Cohort& cohort, const StrategySpec& spec, int b,
                                  const UtilityConfig& cfg, const RngStream& rng,
                                  const BootstrapOptions& options = {});

CorrectedPerformance corrected_performance(const BootstrapResult& result);

}  // namespace seqsize
