#include "seqsize/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace seqsize {

namespace {

std::string f2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string g6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

struct BandColumns {
    bool present = false;
    double (*lower)(const IncrementRecord&) = nullptr;
    double (*upper)(const IncrementRecord&) = nullptr;
};

using SeriesFn = std::function<double(const IncrementRecord&)>;

BandColumns band_for(RuleMetric metric) {
    switch (metric) {
        case RuleMetric::MeanUiWidth:
            return {true, [](const IncrementRecord& r) { return r.ui_width_p2_5; },
                    [](const IncrementRecord& r) { return r.ui_width_p97_5; }};
        case RuleMetric::MeanDelta:
            return {true, [](const IncrementRecord& r) { return r.delta_p2_5; },
                    [](const IncrementRecord& r) { return r.delta_p97_5; }};
        case RuleMetric::MeanMisclass:
            return {true, [](const IncrementRecord& r) { return r.misclass_p2_5; },
                    [](const IncrementRecord& r) { return r.misclass_p97_5; }};
        default:
            return {};
    }
}

// Polyline through usable points, broken where increments are unusable.
void emit_series(std::ostringstream& out, const std::vector<IncrementRecord>& records,
                 const SeriesFn& value,
                 const std::function<double(double)>& to_x, const std::function<double(double)>& to_y,
                 const std::string& style) {
    std::vector<std::string> segment;
    auto flush = [&]() {
        if (segment.size() >= 2) {
            out << "  <polyline " << style << " points=\"";
            for (std::size_t i = 0; i < segment.size(); ++i) {
                if (i) out << " ";
                out << segment[i];
            }
            out << "\"/>\n";
        }
        segment.clear();
    };
    for (const IncrementRecord& rec : records) {
        const double v = value(rec);
        if (!rec.usable || std::isnan(v)) {
            flush();
            continue;
        }
        segment.push_back(f2(to_x(rec.n)) + "," + f2(to_y(v)));
    }
    flush();
}

}  // namespace

std::string render_learning_curve_svg(const LearningCurve& curve,
                                      const std::vector<StoppingRule>& rules,
                                      const SvgOptions& options) {
    if (curve.records.size() < 2)
        throw InsufficientPoints("learning-curve plot needs at least 2 increments");

    const double panel_w = 720.0, panel_h = 170.0;
    const double margin_left = 90.0, margin_top = 48.0, gap = 46.0;
    const double width = margin_left + panel_w + 40.0;
    const std::size_t panels = options.metrics.size();
    const double height = margin_top + panels * (panel_h + gap);

    double n_min = curve.records.front().n, n_max = curve.records.back().n;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(width) << "\" height=\""
        << f2(height) << "\" viewBox=\"0 0 " << f2(width) << " " << f2(height) << "\">\n";
    if (!options.description.empty())
        out << "  <desc>" << xml_escape(options.description) << "</desc>\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"" << f2(width) << "\" height=\"" << f2(height)
        << "\" fill=\"white\"/>\n";
    out << "  <text x=\"" << f2(margin_left) << "\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\">"
        << "Learning curves</text>\n";

    for (std::size_t panel = 0; panel < panels; ++panel) {
        const RuleMetric metric = options.metrics[panel];
        const double top = margin_top + panel * (panel_h + gap);
        const BandColumns band = band_for(metric);

        // y-range over the series, bands, and any matching thresholds
        double lo = INFINITY, hi = -INFINITY;
        for (const IncrementRecord& rec : curve.records) {
            if (!rec.usable) continue;
            const double v = rec.metric_value(metric);
            if (!std::isnan(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (band.present) {
                lo = std::min(lo, band.lower(rec));
                hi = std::max(hi, band.upper(rec));
            }
        }
        for (const StoppingRule& rule : rules)
            if (rule.metric == metric) {
                lo = std::min(lo, rule.threshold);
                hi = std::max(hi, rule.threshold);
            }
        if (!std::isfinite(lo) || !std::isfinite(hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.05;
            hi += 0.05;
        }
        const double pad = 0.06 * (hi - lo);
        lo -= pad;
        hi += pad;

        auto to_x = [&](double n) { return margin_left + (n - n_min) / (n_max - n_min) * panel_w; };
        auto to_y = [&](double v) { return top + panel_h - (v - lo) / (hi - lo) * panel_h; };

        out << "  <rect x=\"" << f2(margin_left) << "\" y=\"" << f2(top) << "\" width=\"" << f2(panel_w)
            << "\" height=\"" << f2(panel_h) << "\" fill=\"none\" stroke=\"#444444\"/>\n";
        out << "  <text x=\"" << f2(margin_left) << "\" y=\"" << f2(top - 8.0)
            << "\" font-family=\"sans-serif\" font-size=\"13\">" << rule_metric_name(metric)
            << "</text>\n";

        // y ticks
        for (int t = 0; t <= 3; ++t) {
            const double v = lo + (hi - lo) * t / 3.0;
            const double y = to_y(v);
            out << "  <line x1=\"" << f2(margin_left - 4.0) << "\" y1=\"" << f2(y) << "\" x2=\""
                << f2(margin_left) << "\" y2=\"" << f2(y) << "\" stroke=\"#444444\"/>\n";
            out << "  <text x=\"" << f2(margin_left - 8.0) << "\" y=\"" << f2(y + 4.0)
                << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << g6(v)
                << "</text>\n";
        }
        // x ticks on the n grid (at most ~8 labels)
        const std::size_t stride = std::max<std::size_t>(1, curve.records.size() / 8);
        for (std::size_t i = 0; i < curve.records.size(); i += stride) {
            const double n = curve.records[i].n;
            const double x = to_x(n);
            out << "  <line x1=\"" << f2(x) << "\" y1=\"" << f2(top + panel_h) << "\" x2=\"" << f2(x)
                << "\" y2=\"" << f2(top + panel_h + 4.0) << "\" stroke=\"#444444\"/>\n";
            out << "  <text x=\"" << f2(x) << "\" y=\"" << f2(top + panel_h + 18.0)
                << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << g6(n)
                << "</text>\n";
        }

        if (band.present) {
            emit_series(out, curve.records, band.lower, to_x, to_y,
                        "fill=\"none\" stroke=\"#9ecae1\" stroke-width=\"1\" stroke-dasharray=\"3,3\"");
            emit_series(out, curve.records, band.upper, to_x, to_y,
                        "fill=\"none\" stroke=\"#9ecae1\" stroke-width=\"1\" stroke-dasharray=\"3,3\"");
        }

        // thresholds and stop markers for matching rules
        for (std::size_t r = 0; r < rules.size(); ++r) {
            if (rules[r].metric != metric) continue;
            const double y = to_y(rules[r].threshold);
            out << "  <line x1=\"" << f2(margin_left) << "\" y1=\"" << f2(y) << "\" x2=\""
                << f2(margin_left + panel_w) << "\" y2=\"" << f2(y)
                << "\" stroke=\"#d62728\" stroke-dasharray=\"6,3\"/>\n";
            out << "  <text x=\"" << f2(margin_left + panel_w + 4.0) << "\" y=\"" << f2(y + 4.0)
                << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#d62728\">"
                << (rules[r].comparator == Comparator::Ge ? "&gt;=" : "&lt;=") << g6(rules[r].threshold)
                << "</text>\n";
            if (r < curve.n_stop_per_rule.size() && curve.n_stop_per_rule[r]) {
                const double x = to_x(*curve.n_stop_per_rule[r]);
                out << "  <line x1=\"" << f2(x) << "\" y1=\"" << f2(top) << "\" x2=\"" << f2(x)
                    << "\" y2=\"" << f2(top + panel_h) << "\" stroke=\"#2ca02c\" stroke-dasharray=\"2,2\"/>\n";
                out << "  <text x=\"" << f2(x + 3.0) << "\" y=\"" << f2(top + 12.0)
                    << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#2ca02c\">n_stop="
                    << g6(*curve.n_stop_per_rule[r]) << "</text>\n";
            }
        }

        emit_series(out, curve.records, [metric](const IncrementRecord& r) { return r.metric_value(metric); },
                    to_x, to_y, "fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"");
    }

    out << "</svg>\n";
    return out.str();
}

void write_learning_curve_svg(const LearningCurve& curve, const std::vector<StoppingRule>& rules,
                              const std::string& path, const SvgOptions& options) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << render_learning_curve_svg(curve, rules, options);
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace seqsize
