#include <doctest.h>

#include <cstdio>
#include <cmath>
#include <limits>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "seqsize/config.hpp"
#include "seqsize/csv.hpp"
#include "seqsize/datagen.hpp"
#include "seqsize/svg.hpp"

using namespace seqsize;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("seqsize_test_" + name);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

LearningCurve sample_curve(std::size_t rule_count, int increments = 3) {
    LearningCurve curve;
    for (int i = 0; i < increments; ++i) {
        IncrementRecord r;
        r.n = 100 * (i + 1);
        r.usable = true;
        r.apparent_c = 0.7123456 + 0.001 * i;
        r.optimism_c = 0.05 - 0.01 * i;
        r.corrected_c = r.apparent_c - r.optimism_c;
        r.corrected_slope = 0.82 + 0.05 * i;
        r.mean_ui_width = 0.30 - 0.08 * i;
        r.ui_width_p2_5 = r.mean_ui_width / 3;
        r.ui_width_p97_5 = r.mean_ui_width * 2;
        r.mean_delta = 0.2 - 0.05 * i;
        r.delta_p2_5 = 0.01;
        r.delta_p97_5 = 0.4;
        r.evpi = 0.01 / (i + 1);
        r.mean_misclass = 0.2 - 0.04 * i;
        r.misclass_p2_5 = 0.0;
        r.misclass_p97_5 = 0.5;
        r.rule_pass.assign(rule_count, i > 0);
        r.replicate_failures = i;
        curve.records.push_back(r);
    }
    return curve;
}

const std::vector<StoppingRule> kRules = {{RuleMetric::CorrectedSlope, Comparator::Ge, 0.9, 2},
                                          {RuleMetric::MeanUiWidth, Comparator::Le, 0.1, 2}};

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("cohort csv round trip preserves everything") {
    GeneratorSpec spec;
    spec.n = 60;
    spec.seed = 4;
    const Cohort original = generate(spec);
    const auto path = temp_file("cohort_roundtrip.csv");
    write_cohort_csv(original, path.string(), {"a provenance note"});

    const Cohort back = read_cohort_csv(path.string());
    CHECK(back.ids == original.ids);
    CHECK(back.order == original.order);
    CHECK(back.predictor_names == original.predictor_names);
    CHECK((back.y - original.y).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.X - original.X).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("non-binary outcome reports its row") {
    std::ostringstream body;
    body << "id,outcome,x1\n";
    for (int i = 1; i <= 20; ++i) body << i << "," << (i == 17 ? "2" : "1") << ",0.5\n";
    // guard against an all-ones cohort tripping validation first: flip row 1
    std::string text = body.str();
    const auto path = temp_file("badoutcome.csv");
    write_text(path, text);
    try {
        read_cohort_csv(path.string());
        FAIL("expected NonBinaryOutcome");
    } catch (const NonBinaryOutcome& e) {
        CHECK(std::string(e.what()).find("row 17") != std::string::npos);
        CHECK(std::string(e.what()).find("\"2\"") != std::string::npos);
    }
}

TEST_CASE("header-only file is EmptyFile, absent header is MissingHeader") {
    const auto header_only = temp_file("header_only.csv");
    write_text(header_only, "id,order,outcome,x1\n");
    CHECK_THROWS_AS(read_cohort_csv(header_only.string()), EmptyFile);

    const auto no_header = temp_file("no_header.csv");
    write_text(no_header, "");
    CHECK_THROWS_AS(read_cohort_csv(no_header.string()), MissingHeader);

    const auto wrong_header = temp_file("wrong_header.csv");
    write_text(wrong_header, "foo,bar\n1,2\n");
    CHECK_THROWS_AS(read_cohort_csv(wrong_header.string()), MissingHeader);
}

TEST_CASE("duplicate and missing values are rejected") {
    const auto dup_order = temp_file("dup_order.csv");
    write_text(dup_order, "id,order,outcome,x1\n1,1,0,0.1\n2,1,1,0.2\n");
    CHECK_THROWS_AS(read_cohort_csv(dup_order.string()), DuplicateOrder);

    const auto missing = temp_file("missing_value.csv");
    write_text(missing, "id,outcome,x1\n1,0,\n2,1,0.2\n");
    CHECK_THROWS_AS(read_cohort_csv(missing.string()), MissingValue);

    const auto short_row = temp_file("short_row.csv");
    write_text(short_row, "id,outcome,x1,x2\n1,0,0.1\n2,1,0.2,0.3\n");
    CHECK_THROWS_AS(read_cohort_csv(short_row.string()), MissingValue);
}

TEST_CASE("learning-curve csv has the pinned layout") {
    const LearningCurve curve = sample_curve(kRules.size());
    const std::string text = learning_curve_csv(curve, kRules);

    // header + 3 increments
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    std::istringstream lines(text);
    std::string header;
    std::getline(lines, header);
    CHECK(header ==
          "n,apparent_c,optimism_c,corrected_c,corrected_slope,mean_ui_width,ui_width_p2_5,"
          "ui_width_p97_5,mean_delta,delta_p2_5,delta_p97_5,evpi,mean_misclass,misclass_p2_5,"
          "misclass_p97_5,pass_corrected_slope_ge0.9_k2,pass_mean_ui_width_le0.1_k2,"
          "replicate_failures");

    std::string first_row;
    std::getline(lines, first_row);
    CHECK(first_row.rfind("100,0.712346,", 0) == 0);  // 6 significant digits

    // byte-stable across repeated serialization
    CHECK(learning_curve_csv(curve, kRules) == text);
}

TEST_CASE("learning-curve csv round trip at printed precision") {
    const LearningCurve curve = sample_curve(kRules.size());
    const auto path = temp_file("curve.csv");
    write_learning_curve_csv(curve, kRules, path.string());

    const CurveFile back = read_learning_curve_csv(path.string());
    REQUIRE(back.rules.size() == kRules.size());
    CHECK(back.rules[0].metric == RuleMetric::CorrectedSlope);
    CHECK(back.rules[0].comparator == Comparator::Ge);
    CHECK(back.rules[0].threshold == 0.9);
    CHECK(back.rules[0].k == 2);
    CHECK(back.rules[1].metric == RuleMetric::MeanUiWidth);

    REQUIRE(back.curve.records.size() == curve.records.size());
    for (std::size_t i = 0; i < curve.records.size(); ++i) {
        char printed[32];
        std::snprintf(printed, sizeof printed, "%.6g", curve.records[i].apparent_c);
        CHECK(back.curve.records[i].apparent_c == std::strtod(printed, nullptr));
        CHECK(back.curve.records[i].n == curve.records[i].n);
        CHECK(back.curve.records[i].rule_pass == curve.records[i].rule_pass);
        CHECK(back.curve.records[i].replicate_failures == curve.records[i].replicate_failures);
    }
}

TEST_CASE("unusable increments survive the csv round trip as nan rows") {
    LearningCurve curve = sample_curve(kRules.size(), 3);
    IncrementRecord& broken = curve.records[1];
    broken.usable = false;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    broken.apparent_c = broken.optimism_c = broken.corrected_c = broken.corrected_slope = nan;
    broken.mean_ui_width = broken.ui_width_p2_5 = broken.ui_width_p97_5 = nan;
    broken.mean_delta = broken.delta_p2_5 = broken.delta_p97_5 = nan;
    broken.evpi = broken.mean_misclass = broken.misclass_p2_5 = broken.misclass_p97_5 = nan;
    broken.rule_pass.assign(kRules.size(), false);

    const auto path = temp_file("nan_curve.csv");
    write_learning_curve_csv(curve, kRules, path.string());
    const CurveFile back = read_learning_curve_csv(path.string());
    REQUIRE(back.curve.records.size() == 3);
    CHECK(back.curve.records[0].usable);
    CHECK_FALSE(back.curve.records[1].usable);
    CHECK(std::isnan(back.curve.records[1].apparent_c));
    CHECK(back.curve.records[2].usable);

    // nan rows serialize to json null
    const std::string json_text = learning_curve_json(curve, kRules, {});
    const nlohmann::json doc = nlohmann::json::parse(json_text);
    CHECK(doc["records"][1]["apparent_c"].is_null());
    CHECK(doc["records"][1]["usable"] == false);
}

TEST_CASE("json mirrors the csv numbers exactly as printed") {
    const LearningCurve curve = sample_curve(kRules.size());
    const std::map<std::string, std::string> echo = {{"seed", "42"}, {"strategy.kind", "unpenalised"}};
    const std::string text = learning_curve_json(curve, kRules, echo);

    const nlohmann::json doc = nlohmann::json::parse(text);
    CHECK(doc["config"]["seed"] == "42");
    CHECK(doc["rules"].size() == 2);
    CHECK(doc["records"].size() == 3);
    CHECK(doc["n_stop"].contains("per_rule"));
    CHECK(doc["n_stop"].contains("overall"));

    for (std::size_t i = 0; i < curve.records.size(); ++i) {
        char printed[32];
        std::snprintf(printed, sizeof printed, "%.6g", curve.records[i].mean_ui_width);
        CHECK(doc["records"][i]["mean_ui_width"].get<double>() == std::strtod(printed, nullptr));
        CHECK(doc["records"][i]["n"].get<int>() == curve.records[i].n);
    }

    // identical bytes on re-serialization
    CHECK(learning_curve_json(curve, kRules, echo) == text);
}

TEST_CASE("svg renderer output is deterministic and structured") {
    const LearningCurve two_points = sample_curve(kRules.size(), 2);
    SvgOptions opts;
    opts.description = "unit test";
    const std::string svg = render_learning_curve_svg(two_points, kRules, opts);

    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<desc>unit test</desc>") != std::string::npos);
    // one panel per default metric
    CHECK(svg.find(">corrected_slope<") != std::string::npos);
    CHECK(svg.find(">evpi<") != std::string::npos);
    // threshold line annotations for both rules
    CHECK(svg.find("&gt;=0.9") != std::string::npos);
    CHECK(svg.find("&lt;=0.1") != std::string::npos);
    // series polylines exist
    CHECK(svg.find("polyline") != std::string::npos);

    CHECK(render_learning_curve_svg(two_points, kRules, opts) == svg);

    const LearningCurve one_point = sample_curve(kRules.size(), 1);
    CHECK_THROWS_AS(render_learning_curve_svg(one_point, kRules, opts), InsufficientPoints);
}

TEST_CASE("config parsing resolves keys, defaults and rejects unknowns") {
    const std::string text =
        "# comment\n"
        "seed = 42\n"
        "sequential.n_initial = 150\n"
        "sequential.b = 77\n"
        "strategy.kind = lasso\n"
        "utility.threshold = 0.2\n"
        "rules.0.metric = corrected_slope\n"
        "rules.0.comparator = >=\n"
        "rules.0.threshold = 0.85\n"
        "rules.0.k = 3\n"
        "generator.n = 1234\n"
        "output.csv = out.csv\n";
    const RunConfig cfg = parse_run_config_text(text);
    CHECK(cfg.seed_set);
    CHECK(cfg.sequential.seed == 42);
    CHECK(cfg.sequential.n_initial == 150);
    CHECK(cfg.sequential.b == 77);
    CHECK(cfg.sequential.spec.kind == StrategyKind::Lasso);
    CHECK(cfg.sequential.utility.threshold == 0.2);
    REQUIRE(cfg.sequential.rules.size() == 1);
    CHECK(cfg.sequential.rules[0].threshold == 0.85);
    CHECK(cfg.sequential.rules[0].k == 3);
    REQUIRE(cfg.generator.has_value());
    CHECK(cfg.generator->n == 1234);
    CHECK(cfg.out_csv == "out.csv");

    CHECK_THROWS_AS(parse_run_config_text("nonsense.key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config_text("seed = 1\nseed = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config_text("rules.1.metric = evpi\n"), ConfigError);  // gap at 0
    CHECK_THROWS_AS(parse_run_config_text("data.cohort_csv = a.csv\ngenerator.n = 10\n"), ConfigError);
}

TEST_CASE("default rules cover the six curve metrics") {
    const RunConfig cfg = parse_run_config_text("seed = 1\n");
    REQUIRE(cfg.sequential.rules.size() == 6);
    CHECK(cfg.sequential.rules[0].name() == "corrected_slope_ge0.9_k2");
    CHECK(cfg.sequential.rules[1].name() == "optimism_c_le0.02_k2");
    CHECK(cfg.sequential.rules[2].name() == "mean_ui_width_le0.1_k2");
    CHECK(cfg.sequential.rules[3].name() == "mean_delta_le0.05_k2");
    CHECK(cfg.sequential.rules[4].name() == "evpi_le0.001_k2");
    CHECK(cfg.sequential.rules[5].name() == "mean_misclass_le0.1_k2");
}

TEST_CASE("config echo is replayable") {
    const RunConfig cfg = parse_run_config_text("seed = 9\ngenerator.n = 500\n");
    const auto echo = cfg.echo();
    CHECK(echo.at("seed") == "9");
    CHECK(echo.at("generator.n") == "500");
    CHECK(echo.at("strategy.kind") == "unpenalised");
    // echo keys parse back without error (replayability)
    std::string text;
    for (const auto& [k, v] : echo) text += k + " = " + v + "\n";
    const RunConfig back = parse_run_config_text(text);
    CHECK(back.sequential.seed == 9);
    CHECK(back.generator->n == 500);
}

TEST_SUITE_END();
