#include "seqsize/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace seqsize {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Round to the 6-significant-digit value that the CSV prints, so the JSON
// mirror reproduces the printed numbers exactly.
double round6(double v) {
    if (std::isnan(v)) return v;
    return std::strtod(fmt6(v).c_str(), nullptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(field);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_real(const std::string& token, const std::string& where) {
    const std::string t = trim(token);
    if (t.empty()) throw MissingValue("empty value " + where);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw MissingValue("unparseable value \"" + t + "\" " + where);
    return v;
}

const std::vector<std::string>& stat_columns() {
    static const std::vector<std::string> cols = {
        "apparent_c",    "optimism_c",   "corrected_c",    "corrected_slope",
        "mean_ui_width", "ui_width_p2_5", "ui_width_p97_5", "mean_delta",
        "delta_p2_5",    "delta_p97_5",  "evpi",           "mean_misclass",
        "misclass_p2_5", "misclass_p97_5"};
    return cols;
}

double stat_value(const IncrementRecord& r, std::size_t i) {
    const double values[] = {r.apparent_c,    r.optimism_c,   r.corrected_c,    r.corrected_slope,
                             r.mean_ui_width, r.ui_width_p2_5, r.ui_width_p97_5, r.mean_delta,
                             r.delta_p2_5,    r.delta_p97_5,  r.evpi,           r.mean_misclass,
                             r.misclass_p2_5, r.misclass_p97_5};
    return values[i];
}

void set_stat_value(IncrementRecord& r, std::size_t i, double v) {
    double* slots[] = {&r.apparent_c,    &r.optimism_c,   &r.corrected_c,    &r.corrected_slope,
                       &r.mean_ui_width, &r.ui_width_p2_5, &r.ui_width_p97_5, &r.mean_delta,
                       &r.delta_p2_5,    &r.delta_p97_5,  &r.evpi,           &r.mean_misclass,
                       &r.misclass_p2_5, &r.misclass_p97_5};
    *slots[i] = v;
}

StoppingRule parse_rule_column(const std::string& column) {
    // pass_<metric>_<ge|le><threshold>_k<count>
    if (column.rfind("pass_", 0) != 0) throw DataError("unexpected learning-curve column: " + column);
    const std::string body = column.substr(5);
    for (RuleMetric m : {RuleMetric::CorrectedSlope, RuleMetric::OptimismC, RuleMetric::MeanUiWidth,
                         RuleMetric::MeanDelta, RuleMetric::Evpi, RuleMetric::MeanMisclass}) {
        const std::string name = rule_metric_name(m);
        if (body.rfind(name + "_", 0) != 0) continue;
        std::string rest = body.substr(name.size() + 1);
        Comparator cmp;
        if (rest.rfind("ge", 0) == 0) cmp = Comparator::Ge;
        else if (rest.rfind("le", 0) == 0) cmp = Comparator::Le;
        else continue;
        rest = rest.substr(2);
        const std::size_t kpos = rest.rfind("_k");
        if (kpos == std::string::npos) continue;
        StoppingRule rule;
        rule.metric = m;
        rule.comparator = cmp;
        rule.threshold = parse_real(rest.substr(0, kpos), "in column " + column);
        rule.k = static_cast<int>(std::strtol(rest.substr(kpos + 2).c_str(), nullptr, 10));
        return rule;
    }
    throw DataError("cannot parse rule column: " + column);
}

}  // namespace

Cohort read_cohort_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::string line;
    bool have_header = false;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        header = split_csv_line(line);
        have_header = true;
        break;
    }
    if (!have_header) throw MissingHeader("no header line in " + path);
    for (auto& h : header) h = trim(h);
    if (header.size() < 2 || header[0] != "id")
        throw MissingHeader("header must start with 'id': " + path);

    const bool has_order = header.size() > 1 && header[1] == "order";
    const std::size_t outcome_col = has_order ? 2 : 1;
    if (header.size() <= outcome_col || header[outcome_col] != "outcome")
        throw MissingHeader("header must contain an 'outcome' column: " + path);
    const std::size_t first_pred = outcome_col + 1;
    const std::size_t n_pred = header.size() - first_pred;

    std::vector<std::string> ids;
    std::vector<int> order;
    std::vector<double> outcomes;
    std::vector<double> values;

    long row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') continue;
        ++row;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw MissingValue("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                               " fields, expected " + std::to_string(header.size()));
        ids.push_back(trim(fields[0]));
        if (has_order) {
            const double v = parse_real(fields[1], "in 'order' at row " + std::to_string(row));
            if (v != std::floor(v)) throw MissingValue("non-integer order at row " + std::to_string(row));
            order.push_back(static_cast<int>(v));
        }
        const double y = parse_real(fields[outcome_col], "in 'outcome' at row " + std::to_string(row));
        if (y != 0.0 && y != 1.0)
            throw NonBinaryOutcome("outcome value \"" + trim(fields[outcome_col]) + "\" at row " +
                                   std::to_string(row));
        outcomes.push_back(y);
        for (std::size_t j = 0; j < n_pred; ++j)
            values.push_back(parse_real(fields[first_pred + j],
                                        "in '" + header[first_pred + j] + "' at row " + std::to_string(row)));
    }
    if (row == 0) throw EmptyFile("no data rows in " + path);

    Cohort cohort;
    cohort.ids = std::move(ids);
    cohort.order = std::move(order);
    cohort.predictor_names.assign(header.begin() + static_cast<long>(first_pred), header.end());
    cohort.y = Eigen::Map<Eigen::VectorXd>(outcomes.data(), static_cast<Eigen::Index>(outcomes.size()));
    cohort.X.resize(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(n_pred));
    for (long i = 0; i < row; ++i)
        for (std::size_t j = 0; j < n_pred; ++j)
            cohort.X(i, static_cast<Eigen::Index>(j)) = values[static_cast<std::size_t>(i) * n_pred + j];
    cohort.validate();
    return cohort;
}

void write_cohort_csv(const Cohort& cohort, const std::string& path,
                      const std::vector<std::string>& comments) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (const std::string& c : comments) out << "# " << c << "\n";
    out << "id";
    if (cohort.has_order()) out << ",order";
    out << ",outcome";
    for (const std::string& name : cohort.predictor_names) out << "," << name;
    out << "\n";
    for (Eigen::Index i = 0; i < cohort.n(); ++i) {
        out << (cohort.ids.empty() ? std::to_string(i + 1) : cohort.ids[static_cast<std::size_t>(i)]);
        if (cohort.has_order()) out << "," << cohort.order[static_cast<std::size_t>(i)];
        out << "," << (cohort.y[i] > 0.5 ? 1 : 0);
        for (Eigen::Index j = 0; j < cohort.p(); ++j) out << "," << fmt_full(cohort.X(i, j));
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

std::string learning_curve_csv(const LearningCurve& curve, const std::vector<StoppingRule>& rules) {
    if (curve.records.empty()) throw DataError("learning curve has no increments");
    std::ostringstream out;
    out << "n";
    for (const std::string& c : stat_columns()) out << "," << c;
    for (const StoppingRule& rule : rules) out << ",pass_" << rule.name();
    out << ",replicate_failures\n";
    for (const IncrementRecord& rec : curve.records) {
        out << rec.n;
        for (std::size_t i = 0; i < stat_columns().size(); ++i) out << "," << fmt6(stat_value(rec, i));
        for (std::size_t r = 0; r < rules.size(); ++r)
            out << "," << (r < rec.rule_pass.size() && rec.rule_pass[r] ? 1 : 0);
        out << "," << rec.replicate_failures << "\n";
    }
    return out.str();
}

void write_learning_curve_csv(const LearningCurve& curve, const std::vector<StoppingRule>& rules,
                              const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << learning_curve_csv(curve, rules);
    if (!out) throw IoError("write failed: " + path);
}

std::string learning_curve_json(const LearningCurve& curve, const std::vector<StoppingRule>& rules,
                                const std::map<std::string, std::string>& config_echo) {
    nlohmann::ordered_json doc;
    doc["config"] = config_echo;

    nlohmann::ordered_json jrules = nlohmann::ordered_json::array();
    for (const StoppingRule& rule : rules) {
        nlohmann::ordered_json jr;
        jr["metric"] = rule_metric_name(rule.metric);
        jr["comparator"] = rule.comparator == Comparator::Ge ? ">=" : "<=";
        jr["threshold"] = rule.threshold;
        jr["k"] = rule.k;
        jr["name"] = rule.name();
        jrules.push_back(jr);
    }
    doc["rules"] = jrules;

    nlohmann::ordered_json jrecords = nlohmann::ordered_json::array();
    for (const IncrementRecord& rec : curve.records) {
        nlohmann::ordered_json jr;
        jr["n"] = rec.n;
        jr["usable"] = rec.usable;
        for (std::size_t i = 0; i < stat_columns().size(); ++i) {
            const double v = round6(stat_value(rec, i));
            if (std::isnan(v))
                jr[stat_columns()[i]] = nullptr;
            else
                jr[stat_columns()[i]] = v;
        }
        nlohmann::ordered_json pass = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < rules.size(); ++r)
            pass.push_back(r < rec.rule_pass.size() && rec.rule_pass[r]);
        jr["pass"] = pass;
        jr["replicate_failures"] = rec.replicate_failures;
        jrecords.push_back(jr);
    }
    doc["records"] = jrecords;

    nlohmann::ordered_json stops;
    nlohmann::ordered_json per_rule;
    for (std::size_t r = 0; r < rules.size(); ++r) {
        if (r < curve.n_stop_per_rule.size() && curve.n_stop_per_rule[r])
            per_rule[rules[r].name()] = *curve.n_stop_per_rule[r];
        else
            per_rule[rules[r].name()] = nullptr;
    }
    stops["per_rule"] = per_rule;
    if (curve.n_stop_overall)
        stops["overall"] = *curve.n_stop_overall;
    else
        stops["overall"] = nullptr;
    doc["n_stop"] = stops;

    return doc.dump(2) + "\n";
}

void write_learning_curve_json(const LearningCurve& curve, const std::vector<StoppingRule>& rules,
                               const std::map<std::string, std::string>& config_echo,
                               const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << learning_curve_json(curve, rules, config_echo);
    if (!out) throw IoError("write failed: " + path);
}

CurveFile read_learning_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw MissingHeader("empty learning-curve file: " + path);
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);

    const auto& stats = stat_columns();
    if (header.size() < stats.size() + 2 || header[0] != "n" ||
        header.back() != "replicate_failures")
        throw MissingHeader("unexpected learning-curve header in " + path);
    for (std::size_t i = 0; i < stats.size(); ++i)
        if (header[i + 1] != stats[i])
            throw MissingHeader("unexpected learning-curve column " + header[i + 1]);

    CurveFile file;
    const std::size_t first_rule = stats.size() + 1;
    const std::size_t n_rules = header.size() - first_rule - 1;
    for (std::size_t r = 0; r < n_rules; ++r)
        file.rules.push_back(parse_rule_column(header[first_rule + r]));

    long row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw MissingValue("curve row " + std::to_string(row) + " has wrong field count");
        IncrementRecord rec;
        rec.n = static_cast<int>(parse_real(fields[0], "in 'n' at row " + std::to_string(row)));
        bool any_nan = false;
        for (std::size_t i = 0; i < stats.size(); ++i) {
            const std::string t = trim(fields[i + 1]);
            const double v = (t == "nan" || t == "-nan") ? kNaN
                                                         : parse_real(fields[i + 1], "at row " + std::to_string(row));
            if (std::isnan(v)) any_nan = true;
            set_stat_value(rec, i, v);
        }
        rec.usable = !any_nan;
        for (std::size_t r = 0; r < n_rules; ++r)
            rec.rule_pass.push_back(parse_real(fields[first_rule + r], "pass flag") != 0.0);
        rec.replicate_failures = static_cast<int>(parse_real(fields.back(), "replicate_failures"));
        file.curve.records.push_back(std::move(rec));
    }
    if (file.curve.records.empty()) throw EmptyFile("no data rows in " + path);

    const RuleEvaluation eval = evaluate_rules(file.curve.records, file.rules);
    file.curve.n_stop_per_rule = eval.n_stop_per_rule;
    file.curve.n_stop_overall = eval.n_stop_overall;
    return file;
}

}  // namespace seqsize
