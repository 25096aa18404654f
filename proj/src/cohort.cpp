#include "seqsize/cohort.hpp"

#include <algorithm>
#include <numeric>

namespace seqsize {

void Cohort::validate() const {
    const Eigen::Index rows = y.size();
    if (X.rows() != rows)
        throw DimensionMismatch("predictor matrix has " + std::to_string(X.rows()) +
                                " rows but outcome has " + std::to_string(rows));
    if (!ids.empty() && static_cast<Eigen::Index>(ids.size()) != rows)
        throw DimensionMismatch("id count does not match row count");
    if (!predictor_names.empty() && static_cast<Eigen::Index>(predictor_names.size()) != X.cols())
        throw DimensionMismatch("predictor name count does not match column count");
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double v = y[i];
        if (!(v == 0.0 || v == 1.0)) throw DataError("outcome must be 0 or 1");
        if (!X.row(i).allFinite()) throw MissingValue("non-finite predictor value in row " + std::to_string(i + 1));
    }
    if (has_order()) {
        if (static_cast<Eigen::Index>(order.size()) != rows)
            throw DimensionMismatch("order length does not match row count");
        std::vector<int> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (sorted[i] != static_cast<int>(i) + 1) {
                if (i > 0 && sorted[i] == sorted[i - 1])
                    throw DuplicateOrder("recruitment order value " + std::to_string(sorted[i]) +
                                         " appears more than once");
                throw DataError("recruitment order must be a permutation of 1..n");
            }
        }
    }
}

Cohort Cohort::subset(const std::vector<Eigen::Index>& rows) const {
    Cohort out;
    const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
    out.y.resize(m);
    out.X.resize(m, X.cols());
    out.predictor_names = predictor_names;
    if (!ids.empty()) out.ids.reserve(rows.size());
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index r = rows[static_cast<std::size_t>(i)];
        out.y[i] = y[r];
        out.X.row(i) = X.row(r);
        if (!ids.empty()) out.ids.push_back(ids[static_cast<std::size_t>(r)]);
    }
    return out;
}

Cohort Cohort::recruitment_prefix(Eigen::Index count) const {
    if (!has_order()) throw DataError("cohort has no recruitment order");
    if (count > n()) throw CohortTooSmall("requested prefix of " + std::to_string(count) +
                                          " rows from a cohort of " + std::to_string(n()));
    // rank -> row position
    std::vector<Eigen::Index> by_rank(static_cast<std::size_t>(n()));
    for (Eigen::Index i = 0; i < n(); ++i) by_rank[static_cast<std::size_t>(order[i] - 1)] = i;
    by_rank.resize(static_cast<std::size_t>(count));
    Cohort out = subset(by_rank);
    out.order.resize(static_cast<std::size_t>(count));
    std::iota(out.order.begin(), out.order.end(), 1);
    return out;
}

}  // namespace seqsize
