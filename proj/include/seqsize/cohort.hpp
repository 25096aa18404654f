#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "seqsize/errors.hpp"

namespace seqsize {

// Recruitment-ordered rows of numeric predictors plus a binary outcome.
// `order` holds recruitment ranks 1..n (a permutation); it may be empty
// until a recruitment order is assigned.
struct Cohort {
    std::vector<std::string> ids;
    std::vector<int> order;
    Eigen::VectorXd y;   // entries 0 or 1
    Eigen::MatrixXd X;   // n rows, one column per predictor
    std::vector<std::string> predictor_names;

    Eigen::Index n() const { return y.size(); }
    Eigen::Index p() const { return X.cols(); }

    Eigen::Index events() const { return static_cast<Eigen::Index>((y.array() > 0.5).count()); }

    bool has_order() const { return !order.empty(); }

    void validate() const;

    // Rows selected by position, in the given order. Duplicates allowed
    // (bootstrap resampling). The subset carries no recruitment order.
    Cohort subset(const std::vector<Eigen::Index>& rows) const;

    // The first `count` rows by recruitment rank, in recruitment order.
    Cohort recruitment_prefix(Eigen::Index count) const;
};

}  // namespace seqsize
