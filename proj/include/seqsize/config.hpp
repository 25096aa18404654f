#pragma once

#include <map>
#include <optional>
#include <string>

#include "seqsize/datagen.hpp"
#include "seqsize/sequential.hpp"

namespace seqsize {

// A resolved `run` configuration: sequential driver settings plus either a
// cohort CSV path or a generator spec, and output paths.
struct RunConfig {
    SequentialConfig sequential;
    std::optional<std::string> cohort_csv;
    std::optional<GeneratorSpec> generator;
    std::optional<std::uint64_t> order_seed;  // recruitment order when the CSV has none

    std::string out_csv = "learning_curve.csv";
    std::string out_json = "learning_curve.json";
    std::optional<std::string> out_svg;

    bool seed_set = false;

    // Flat dotted-key echo of every resolved value, embedded in outputs.
    std::map<std::string, std::string> echo() const;
};

// Parses a flat dotted-key config file (`key = value`, '#' comments).
// Unknown keys are rejected.
RunConfig parse_run_config_file(const std::string& path);

// Parses config text directly (file contents).
RunConfig parse_run_config_text(const std::string& text, const std::string& origin = "<config>");

}  // namespace seqsize
