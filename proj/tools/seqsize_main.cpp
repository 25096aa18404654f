#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>

#include "seqsize/config.hpp"
#include "seqsize/csv.hpp"
#include "seqsize/datagen.hpp"
#include "seqsize/fixed_size.hpp"
#include "seqsize/svg.hpp"

namespace {

using namespace seqsize;

int cmd_fixed_size(const FixedSizeInputs& inputs) {
    const FixedSizeResult res = riley_minimum(inputs);
    std::printf("a-priori minimum sample size (binary outcome)\n");
    std::printf("  prevalence=%.6g  c-statistic=%.6g  parameters=%d\n", inputs.prevalence,
                inputs.c_statistic, inputs.parameters);
    std::printf("  Cox-Snell R2 = %.6g (max %.6g)\n", res.r2_cs, res.max_r2_cs);
    std::printf("  criterion (i)   shrinkage >= %.6g      : n = %ld\n", inputs.shrinkage_target,
                res.n_shrinkage);
    std::printf("  criterion (ii)  apparent-fit optimism <= %.6g : n = %ld\n", inputs.optimism_target,
                res.n_optimism);
    std::printf("  criterion (iii) risk margin +/- %.6g    : n = %ld\n", inputs.risk_margin,
                res.n_overall_risk);
    std::printf("recommended minimum n: %ld (events: %ld)\n", res.n_total, res.events);
    return 0;
}

int cmd_generate(const GeneratorSpec& spec, const std::string& out_path) {
    const Cohort cohort = generate(spec);
    std::vector<std::string> comments = {
        "generator.n = " + std::to_string(spec.n),
        "generator.prevalence = " + std::to_string(spec.target_prevalence),
        "generator.c = " + std::to_string(spec.target_c),
        "generator.p = " + std::to_string(spec.p),
        "generator.seed = " + std::to_string(spec.seed),
    };
    write_cohort_csv(cohort, out_path, comments);
    std::printf("wrote %lld rows (%lld events) to %s\n", static_cast<long long>(cohort.n()),
                static_cast<long long>(cohort.events()), out_path.c_str());
    return 0;
}

int cmd_run(const RunConfig& cfg) {
    Cohort cohort;
    if (cfg.generator) {
        GeneratorSpec gen = *cfg.generator;
        cohort = generate(gen);
    } else if (cfg.cohort_csv) {
        cohort = read_cohort_csv(*cfg.cohort_csv);
        if (!cohort.has_order()) {
            const std::uint64_t order_seed = cfg.order_seed ? *cfg.order_seed : cfg.sequential.seed;
            cohort = recruitment_stream(cohort, order_seed);
        }
    } else {
        throw ConfigError("run needs data.cohort_csv or generator.* settings");
    }

    const LearningCurve curve = run_sequential(cohort, cfg.sequential);

    const auto echo = cfg.echo();
    write_learning_curve_csv(curve, cfg.sequential.rules, cfg.out_csv);
    write_learning_curve_json(curve, cfg.sequential.rules, echo, cfg.out_json);
    if (cfg.out_svg) {
        SvgOptions svg_opts;
        std::string desc;
        for (const auto& [k, v] : echo) desc += k + " = " + v + "\n";
        svg_opts.description = desc;
        write_learning_curve_svg(curve, cfg.sequential.rules, *cfg.out_svg, svg_opts);
    }

    for (std::size_t r = 0; r < cfg.sequential.rules.size(); ++r) {
        const StoppingRule& rule = cfg.sequential.rules[r];
        std::printf("rule %-28s : ", rule.name().c_str());
        if (curve.n_stop_per_rule[r])
            std::printf("n_stop = %d\n", *curve.n_stop_per_rule[r]);
        else
            std::printf("not met by n = %d\n", curve.records.back().n);
    }
    if (curve.n_stop_overall)
        std::printf("all rules confirmed          : n_stop = %d\n", *curve.n_stop_overall);
    else
        std::printf("all rules confirmed          : not reached\n");
    return 0;
}

int cmd_plot(const std::string& in_path, const std::string& out_path) {
    const CurveFile file = read_learning_curve_csv(in_path);
    SvgOptions opts;
    opts.description = "rendered from " + in_path;
    write_learning_curve_svg(file.curve, file.rules, out_path, opts);
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sequential sample-size determination for risk prediction models"};
    app.require_subcommand(1);

    // fixed-size
    auto* fixed = app.add_subcommand("fixed-size", "a-priori minimum sample size");
    FixedSizeInputs inputs;
    fixed->add_option("--prevalence", inputs.prevalence, "anticipated outcome prevalence")->required();
    fixed->add_option("--cstat", inputs.c_statistic, "anticipated c-statistic")->required();
    fixed->add_option("--parameters", inputs.parameters, "number of predictor parameters")->required();
    fixed->add_option("--shrinkage", inputs.shrinkage_target, "target expected shrinkage");
    fixed->add_option("--optimism", inputs.optimism_target, "target apparent-fit optimism");
    fixed->add_option("--margin", inputs.risk_margin, "overall risk margin");
    fixed->add_option("--mc-draws", inputs.mc_draws, "Monte Carlo draws for the R2 conversion");
    fixed->add_option("--mc-seed", inputs.mc_seed, "Monte Carlo seed");

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "write a synthetic cohort CSV");
    GeneratorSpec gen;
    long gen_n = static_cast<long>(gen.n);
    std::string gen_out = "cohort.csv";
    gen_cmd->add_option("--n", gen_n, "rows");
    gen_cmd->add_option("--prevalence", gen.target_prevalence, "target prevalence");
    gen_cmd->add_option("--cstat", gen.target_c, "target c-statistic");
    gen_cmd->add_option("--p", gen.p, "predictor count");
    gen_cmd->add_option("--seed", gen.seed, "generator seed");
    gen_cmd->add_option("--out", gen_out, "output CSV path");

    // run
    auto* run_cmd = app.add_subcommand("run", "sequential replay and learning curve");
    std::string config_path;
    std::optional<long> run_seed, run_threads, run_b, run_n_initial, run_n_new, run_n_max;
    std::optional<std::string> run_cohort, run_out_csv, run_out_json, run_out_svg;
    bool run_early_stop = false;
    run_cmd->add_option("--config", config_path, "config file (flat dotted keys)");
    run_cmd->add_option("--seed", run_seed, "root seed (overrides config)");
    run_cmd->add_option("--threads", run_threads, "bootstrap worker threads");
    run_cmd->add_option("--b", run_b, "bootstrap replicates");
    run_cmd->add_option("--n-initial", run_n_initial, "initial sample size");
    run_cmd->add_option("--n-new", run_n_new, "recruitment increment");
    run_cmd->add_option("--n-max", run_n_max, "maximum sample size");
    run_cmd->add_flag("--early-stop", run_early_stop, "stop recruiting once every rule is confirmed");
    run_cmd->add_option("--cohort", run_cohort, "cohort CSV (overrides config data source)");
    run_cmd->add_option("--out-csv", run_out_csv, "learning-curve CSV path");
    run_cmd->add_option("--out-json", run_out_json, "learning-curve JSON path");
    run_cmd->add_option("--out-svg", run_out_svg, "learning-curve SVG path");

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "render a learning-curve CSV as SVG");
    std::string plot_in, plot_out = "learning_curve.svg";
    plot_cmd->add_option("--in", plot_in, "learning-curve CSV")->required();
    plot_cmd->add_option("--out", plot_out, "output SVG path");

    try {
        app.parse(argc, argv);

        if (fixed->parsed()) return cmd_fixed_size(inputs);

        if (gen_cmd->parsed()) {
            if (gen_cmd->count("--seed") == 0) throw seqsize::ConfigError("generate requires --seed");
            gen.n = gen_n;
            return cmd_generate(gen, gen_out);
        }

        if (run_cmd->parsed()) {
            RunConfig cfg = config_path.empty() ? parse_run_config_text("", "<flags>")
                                                : parse_run_config_file(config_path);
            if (run_seed) {
                cfg.sequential.seed = static_cast<std::uint64_t>(*run_seed);
                cfg.seed_set = true;
            }
            if (run_threads) cfg.sequential.threads = static_cast<int>(*run_threads);
            if (run_b) cfg.sequential.b = static_cast<int>(*run_b);
            if (run_n_initial) cfg.sequential.n_initial = static_cast<int>(*run_n_initial);
            if (run_n_new) cfg.sequential.n_new = static_cast<int>(*run_n_new);
            if (run_n_max) cfg.sequential.n_max = static_cast<int>(*run_n_max);
            if (run_early_stop) cfg.sequential.early_stop = true;
            if (run_cohort) {
                cfg.cohort_csv = run_cohort;
                cfg.generator.reset();
            }
            if (run_out_csv) cfg.out_csv = *run_out_csv;
            if (run_out_json) cfg.out_json = *run_out_json;
            if (run_out_svg) cfg.out_svg = run_out_svg;
            if (!cfg.seed_set) throw seqsize::ConfigError("run requires a seed (config key or --seed)");
            if (cfg.generator && !cfg.generator->seed) cfg.generator->seed = cfg.sequential.seed;
            return cmd_run(cfg);
        }

        if (plot_cmd->parsed()) return cmd_plot(plot_in, plot_out);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    } catch (const seqsize::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const seqsize::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const seqsize::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
