#include "seqsize/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace seqsize {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

long to_long(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end != value.c_str() + value.size()) throw ConfigError("key " + key + " expects an integer, got \"" + value + "\"");
    return v;
}

double to_real(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size()) throw ConfigError("key " + key + " expects a number, got \"" + value + "\"");
    return v;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("key " + key + " expects true/false, got \"" + value + "\"");
}

StrategyKind to_strategy(const std::string& key, const std::string& value) {
    if (value == "unpenalised") return StrategyKind::Unpenalised;
    if (value == "heuristic_shrinkage") return StrategyKind::HeuristicShrinkage;
    if (value == "bootstrap_shrinkage") return StrategyKind::BootstrapShrinkage;
    if (value == "lasso") return StrategyKind::Lasso;
    throw ConfigError("key " + key + ": unknown strategy \"" + value + "\"");
}

Comparator to_comparator(const std::string& key, const std::string& value) {
    if (value == ">=" || value == "ge") return Comparator::Ge;
    if (value == "<=" || value == "le") return Comparator::Le;
    throw ConfigError("key " + key + " expects >= or <=, got \"" + value + "\"");
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        if (!kv.emplace(key, value).second)
            throw ConfigError(origin + ": duplicate key " + key);
    }

    RunConfig cfg;
    std::vector<StoppingRule> rules;
    std::map<int, StoppingRule> rule_map;
    bool generator_used = false;
    GeneratorSpec gen;

    auto take = [&kv](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("seed")) {
        cfg.sequential.seed = static_cast<std::uint64_t>(to_long("seed", *v));
        cfg.seed_set = true;
    }
    if (auto v = take("threads")) cfg.sequential.threads = static_cast<int>(to_long("threads", *v));

    if (auto v = take("sequential.n_initial")) cfg.sequential.n_initial = static_cast<int>(to_long("sequential.n_initial", *v));
    if (auto v = take("sequential.n_new")) cfg.sequential.n_new = static_cast<int>(to_long("sequential.n_new", *v));
    if (auto v = take("sequential.n_max")) cfg.sequential.n_max = static_cast<int>(to_long("sequential.n_max", *v));
    if (auto v = take("sequential.b")) cfg.sequential.b = static_cast<int>(to_long("sequential.b", *v));
    if (auto v = take("sequential.early_stop")) cfg.sequential.early_stop = to_bool("sequential.early_stop", *v);

    if (auto v = take("strategy.kind")) cfg.sequential.spec.kind = to_strategy("strategy.kind", *v);
    if (auto v = take("strategy.inner_b")) cfg.sequential.spec.inner_bootstrap_b = static_cast<int>(to_long("strategy.inner_b", *v));
    if (auto v = take("strategy.nested_inner_b")) cfg.sequential.spec.nested_inner_b = static_cast<int>(to_long("strategy.nested_inner_b", *v));
    if (auto v = take("strategy.cv_folds")) cfg.sequential.spec.cv_folds = static_cast<int>(to_long("strategy.cv_folds", *v));
    if (auto v = take("strategy.lambda_grid")) {
        std::istringstream ls(*v);
        std::string tok;
        while (std::getline(ls, tok, ','))
            cfg.sequential.spec.lambda_grid.push_back(to_real("strategy.lambda_grid", trim(tok)));
    }

    if (auto v = take("utility.threshold")) cfg.sequential.utility.threshold = to_real("utility.threshold", *v);

    if (auto v = take("engine.redraw_cap")) cfg.sequential.engine.redraw_cap = static_cast<int>(to_long("engine.redraw_cap", *v));
    if (auto v = take("engine.max_failure_fraction")) cfg.sequential.engine.max_failure_fraction = to_real("engine.max_failure_fraction", *v);
    if (auto v = take("engine.identity_resample")) cfg.sequential.engine.identity_resample = to_bool("engine.identity_resample", *v);

    if (auto v = take("data.cohort_csv")) cfg.cohort_csv = *v;
    if (auto v = take("data.order_seed")) cfg.order_seed = static_cast<std::uint64_t>(to_long("data.order_seed", *v));

    if (auto v = take("generator.n")) { gen.n = to_long("generator.n", *v); generator_used = true; }
    if (auto v = take("generator.prevalence")) { gen.target_prevalence = to_real("generator.prevalence", *v); generator_used = true; }
    if (auto v = take("generator.c")) { gen.target_c = to_real("generator.c", *v); generator_used = true; }
    if (auto v = take("generator.p")) { gen.p = static_cast<int>(to_long("generator.p", *v)); generator_used = true; }
    if (auto v = take("generator.seed")) { gen.seed = static_cast<std::uint64_t>(to_long("generator.seed", *v)); generator_used = true; }

    if (auto v = take("output.csv")) cfg.out_csv = *v;
    if (auto v = take("output.json")) cfg.out_json = *v;
    if (auto v = take("output.svg")) cfg.out_svg = *v;

    // rules.<i>.{metric,comparator,threshold,k}
    for (auto it = kv.begin(); it != kv.end();) {
        const std::string& key = it->first;
        if (key.rfind("rules.", 0) != 0) {
            ++it;
            continue;
        }
        const std::size_t dot = key.find('.', 6);
        if (dot == std::string::npos) throw ConfigError("malformed rule key: " + key);
        const int index = static_cast<int>(to_long(key, key.substr(6, dot - 6)));
        const std::string field = key.substr(dot + 1);
        StoppingRule& rule = rule_map[index];
        if (field == "metric") rule.metric = parse_rule_metric(it->second);
        else if (field == "comparator") rule.comparator = to_comparator(key, it->second);
        else if (field == "threshold") rule.threshold = to_real(key, it->second);
        else if (field == "k") rule.k = static_cast<int>(to_long(key, it->second));
        else throw ConfigError("unknown rule field: " + key);
        it = kv.erase(it);
    }

    if (!kv.empty()) throw ConfigError(origin + ": unknown key " + kv.begin()->first);

    if (!rule_map.empty()) {
        int expected = 0;
        for (const auto& [index, rule] : rule_map) {
            if (index != expected++)
                throw ConfigError("rule indices must be contiguous from 0; missing rules." +
                                  std::to_string(expected - 1));
            rules.push_back(rule);
        }
    } else {
        rules = {
            {RuleMetric::CorrectedSlope, Comparator::Ge, 0.9, 2},
            {RuleMetric::OptimismC, Comparator::Le, 0.02, 2},
            {RuleMetric::MeanUiWidth, Comparator::Le, 0.1, 2},
            {RuleMetric::MeanDelta, Comparator::Le, 0.05, 2},
            {RuleMetric::Evpi, Comparator::Le, 0.001, 2},
            {RuleMetric::MeanMisclass, Comparator::Le, 0.1, 2},
        };
    }
    cfg.sequential.rules = std::move(rules);

    if (generator_used) {
        if (cfg.cohort_csv) throw ConfigError("configure either data.cohort_csv or generator.*, not both");
        cfg.generator = gen;
    }
    return cfg;
}

RunConfig parse_run_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config_text(buf.str(), path);
}

std::map<std::string, std::string> RunConfig::echo() const {
    // `threads` is deliberately absent: results are independent of worker
    // count, so it carries no provenance.
    std::map<std::string, std::string> out;
    out["seed"] = std::to_string(sequential.seed);
    out["sequential.n_initial"] = std::to_string(sequential.n_initial);
    out["sequential.n_new"] = std::to_string(sequential.n_new);
    out["sequential.n_max"] = std::to_string(sequential.n_max);
    out["sequential.b"] = std::to_string(sequential.b);
    out["sequential.early_stop"] = sequential.early_stop ? "true" : "false";
    out["strategy.kind"] = strategy_name(sequential.spec.kind);
    out["strategy.inner_b"] = std::to_string(sequential.spec.inner_bootstrap_b);
    out["strategy.nested_inner_b"] = std::to_string(sequential.spec.nested_inner_b);
    out["strategy.cv_folds"] = std::to_string(sequential.spec.cv_folds);
    if (!sequential.spec.lambda_grid.empty()) {
        std::string grid;
        for (double l : sequential.spec.lambda_grid) {
            if (!grid.empty()) grid += ",";
            grid += fmt6(l);
        }
        out["strategy.lambda_grid"] = grid;
    }
    out["utility.threshold"] = fmt6(sequential.utility.threshold);
    out["engine.redraw_cap"] = std::to_string(sequential.engine.redraw_cap);
    out["engine.max_failure_fraction"] = fmt6(sequential.engine.max_failure_fraction);
    out["engine.identity_resample"] = sequential.engine.identity_resample ? "true" : "false";
    for (std::size_t r = 0; r < sequential.rules.size(); ++r) {
        const std::string prefix = "rules." + std::to_string(r) + ".";
        const StoppingRule& rule = sequential.rules[r];
        out[prefix + "metric"] = rule_metric_name(rule.metric);
        out[prefix + "comparator"] = rule.comparator == Comparator::Ge ? ">=" : "<=";
        out[prefix + "threshold"] = fmt6(rule.threshold);
        out[prefix + "k"] = std::to_string(rule.k);
    }
    if (cohort_csv) out["data.cohort_csv"] = *cohort_csv;
    if (order_seed) out["data.order_seed"] = std::to_string(*order_seed);
    if (generator) {
        out["generator.n"] = std::to_string(generator->n);
        out["generator.prevalence"] = fmt6(generator->target_prevalence);
        out["generator.c"] = fmt6(generator->target_c);
        out["generator.p"] = std::to_string(generator->p);
        out["generator.seed"] = std::to_string(generator->seed);
    }
    out["output.csv"] = out_csv;
    out["output.json"] = out_json;
    if (out_svg) out["output.svg"] = *out_svg;
    return out;
}

}  // namespace seqsize
