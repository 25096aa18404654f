#include "seqsize/sequential.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace seqsize {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

const char* rule_metric_name(RuleMetric metric) {
    switch (metric) {
        case RuleMetric::CorrectedSlope: return "corrected_slope";
        case RuleMetric::OptimismC: return "optimism_c";
        case RuleMetric::MeanUiWidth: return "mean_ui_width";
        case RuleMetric::MeanDelta: return "mean_delta";
        case RuleMetric::Evpi: return "evpi";
        case RuleMetric::MeanMisclass: return "mean_misclass";
    }
    return "?";
}

RuleMetric parse_rule_metric(const std::string& name) {
    for (RuleMetric m : {RuleMetric::CorrectedSlope, RuleMetric::OptimismC, RuleMetric::MeanUiWidth,
                         RuleMetric::MeanDelta, RuleMetric::Evpi, RuleMetric::MeanMisclass})
        if (name == rule_metric_name(m)) return m;
    throw ConfigError("unknown stopping-rule metric: " + name);
}

std::string StoppingRule::name() const {
    char threshold_str[32];
    std::snprintf(threshold_str, sizeof threshold_str, "%.6g", threshold);
    return std::string(rule_metric_name(metric)) + (comparator == Comparator::Ge ? "_ge" : "_le") +
           threshold_str + "_k" + std::to_string(k);
}

void SequentialConfig::validate() const {
    if (n_initial < 1) throw ConfigError("n_initial must be positive");
    if (n_new < 1) throw ConfigError("n_new must be positive");
    if (n_initial > n_max) throw ConfigError("n_initial must not exceed n_max");
    if (b < 2) throw ConfigError("bootstrap replicates must be >= 2");
    for (const StoppingRule& rule : rules)
        if (rule.k < 1) throw ConfigError("rule confirmation count k must be >= 1");
    spec.validate();
    if (!(utility.threshold > 0.0 && utility.threshold < 1.0))
        throw ConfigError("decision threshold must lie in (0,1)");
}

double IncrementRecord::metric_value(RuleMetric metric) const {
    switch (metric) {
        case RuleMetric::CorrectedSlope: return corrected_slope;
        case RuleMetric::OptimismC: return optimism_c;
        case RuleMetric::MeanUiWidth: return mean_ui_width;
        case RuleMetric::MeanDelta: return mean_delta;
        case RuleMetric::Evpi: return evpi;
        case RuleMetric::MeanMisclass: return mean_misclass;
    }
    return kNaN;
}

Cohort recruitment_stream(const Cohort& cohort, std::uint64_t seed) {
    Cohort out = cohort;
    const Eigen::Index n = out.n();
    RngStream stream = RngStream(seed).derive(StreamPurpose::Permutation, 0);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[stream.uniform_below(i)]);
    out.order.assign(static_cast<std::size_t>(n), 0);
    for (Eigen::Index pos = 0; pos < n; ++pos)
        out.order[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos)])] = static_cast<int>(pos) + 1;
    return out;
}

namespace {

bool rule_passes(const StoppingRule& rule, const IncrementRecord& record) {
    const double v = record.metric_value(rule.metric);
    if (std::isnan(v)) return false;
    return rule.comparator == Comparator::Ge ? v >= rule.threshold : v <= rule.threshold;
}

IncrementRecord make_unusable(int n, std::size_t rule_count) {
    IncrementRecord rec;
    rec.n = n;
    rec.usable = false;
    rec.apparent_c = rec.optimism_c = rec.corrected_c = rec.corrected_slope = kNaN;
    rec.mean_ui_width = rec.ui_width_p2_5 = rec.ui_width_p97_5 = kNaN;
    rec.mean_delta = rec.delta_p2_5 = rec.delta_p97_5 = kNaN;
    rec.evpi = kNaN;
    rec.mean_misclass = rec.misclass_p2_5 = rec.misclass_p97_5 = kNaN;
    rec.rule_pass.assign(rule_count, false);
    return rec;
}

}  // namespace

RuleEvaluation evaluate_rules(const std::vector<IncrementRecord>& records,
                              const std::vector<StoppingRule>& rules) {
    RuleEvaluation eval;
    const std::size_t t_count = records.size();
    const std::size_t r_count = rules.size();

    // streak_pass[r][t]: rule r passes at t and the increment is usable
    std::vector<std::vector<bool>> streak_pass(r_count, std::vector<bool>(t_count, false));
    for (std::size_t r = 0; r < r_count; ++r)
        for (std::size_t t = 0; t < t_count; ++t)
            streak_pass[r][t] = records[t].usable && rule_passes(rules[r], records[t]);

    auto confirmed_from = [&](std::size_t r, std::size_t t) {
        const auto k = static_cast<std::size_t>(rules[r].k);
        if (t + k > t_count) return false;
        for (std::size_t s = t; s < t + k; ++s)
            if (!streak_pass[r][s]) return false;
        return true;
    };

    eval.n_stop_per_rule.assign(r_count, std::nullopt);
    for (std::size_t r = 0; r < r_count; ++r)
        for (std::size_t t = 0; t < t_count; ++t)
            if (confirmed_from(r, t)) {
                eval.n_stop_per_rule[r] = records[t].n;
                break;
            }

    if (!rules.empty()) {
        for (std::size_t t = 0; t < t_count && !eval.n_stop_overall; ++t) {
            bool all = true;
            for (std::size_t r = 0; r < r_count; ++r)
                if (!confirmed_from(r, t)) {
                    all = false;
                    break;
                }
            if (all) eval.n_stop_overall = records[t].n;
        }
    }
    return eval;
}

LearningCurve run_sequential(const Cohort& cohort, const SequentialConfig& cfg) {
    cfg.validate();
    cohort.validate();
    if (!cohort.has_order()) throw DataError("cohort has no recruitment order; assign one first");
    if (cohort.n() < cfg.n_initial)
        throw CohortTooSmall("cohort has " + std::to_string(cohort.n()) + " rows, n_initial is " +
                             std::to_string(cfg.n_initial));

    const RngStream root(cfg.seed);
    BootstrapOptions engine_opts = cfg.engine;
    engine_opts.threads = cfg.threads;

    LearningCurve curve;
    const int limit = static_cast<int>(std::min<Eigen::Index>(cfg.n_max, cohort.n()));
    for (int n = cfg.n_initial; n <= limit; n += cfg.n_new) {
        const Cohort stage = cohort.recruitment_prefix(n);
        const RngStream stage_rng = root.derive(StreamPurpose::Stage, static_cast<std::uint64_t>(n));

        IncrementRecord rec;
        try {
            const BootstrapResult result =
                harrell_bootstrap(stage, cfg.spec, cfg.b, cfg.utility, stage_rng, engine_opts);
            rec.n = n;
            rec.usable = true;
            rec.apparent_c = result.apparent_c;
            rec.optimism_c = result.optimism_c;
            rec.corrected_c = result.corrected_c;
            rec.corrected_slope = result.corrected_slope;
            const SummaryStats width = summarize(ui_widths(result.stability));
            rec.mean_ui_width = width.mean;
            rec.ui_width_p2_5 = width.p2_5;
            rec.ui_width_p97_5 = width.p97_5;
            const SummaryStats delta = summarize(delta_stat(result.stability));
            rec.mean_delta = delta.mean;
            rec.delta_p2_5 = delta.p2_5;
            rec.delta_p97_5 = delta.p97_5;
            rec.evpi = result.evpi;
            const SummaryStats misclass = summarize(misclassification_prob(result.stability, cfg.utility));
            rec.mean_misclass = misclass.mean;
            rec.misclass_p2_5 = misclass.p2_5;
            rec.misclass_p97_5 = misclass.p97_5;
            rec.replicate_failures = result.replicate_failures;
            rec.rule_pass.reserve(cfg.rules.size());
            for (const StoppingRule& rule : cfg.rules) rec.rule_pass.push_back(rule_passes(rule, rec));
        } catch (const FitError&) {
            rec = make_unusable(n, cfg.rules.size());
        }
        curve.records.push_back(std::move(rec));

        if (cfg.early_stop && !cfg.rules.empty()) {
            const RuleEvaluation eval = evaluate_rules(curve.records, cfg.rules);
            if (eval.n_stop_overall) break;
        }
    }

    RuleEvaluation eval = evaluate_rules(curve.records, cfg.rules);
    curve.n_stop_per_rule = std::move(eval.n_stop_per_rule);
    curve.n_stop_overall = eval.n_stop_overall;
    return curve;
}

}  // namespace seqsize
