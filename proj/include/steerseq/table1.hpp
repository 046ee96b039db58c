#pragma once

/**
 * @file
 * Published sharpness ranges and purity thresholds for m Alices against one
 * Bob (mu = 1), and their recomputation.
 *
 * Published entries such as "0.707(2)" are read as 0.7072.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "solver.hpp"

namespace steerseq {

struct PublishedRange {
    double lo;
    double hi;
};

struct Table1Reference {
    std::vector<int> n_values; ///< setting counts sharing this row ({3, 4} for the "3/4" rows)
    int n_alices;
    std::vector<PublishedRange> lambda; ///< lambda_1 .. lambda_min(n_alices, 4); sharp entries as [1, 1]
    PublishedRange eta1;
    double mu_min;

    [[nodiscard]] std::string n_label() const {
        std::string label;
        for (std::size_t k = 0; k < n_values.size(); ++k) {
            label += (k ? "/" : "") + std::to_string(n_values[k]);
        }
        return label;
    }
};

inline const std::vector<Table1Reference> &table1_reference() {
    static const std::vector<Table1Reference> rows{
        {{2}, 1, {{0.7072, 1.0}}, {0.7072, 1.0}, 0.7072},
        {{2}, 2, {{0.7072, 0.9101}, {1.0, 1.0}}, {0.8841, 1.0}, 0.8919},
        {{3, 4}, 1, {{0.5774, 1.0}}, {0.5774, 1.0}, 0.5774},
        {{3, 4}, 2, {{0.5774, 0.9306}, {1.0, 1.0}}, {0.7560, 1.0}, 0.7598},
        {{3, 4}, 3, {{0.5774, 0.7733}, {0.6579, 0.8735}, {1.0, 1.0}}, {1.0, 1.0}, 0.9094},
        {{6}, 1, {{0.5394, 1.0}}, {0.5394, 1.0}, 0.5394},
        {{6}, 2, {{0.5394, 0.9510}, {1.0, 1.0}}, {0.7062, 1.0}, 0.7067},
        {{6}, 3, {{0.5394, 0.8289}, {0.6028, 0.9147}, {1.0, 1.0}}, {1.0, 1.0}, 0.8464},
        {{6}, 4, {{0.5394, 0.6437}, {0.6028, 0.7102}, {0.7075, 0.8291}, {1.0, 1.0}}, {1.0, 1.0}, 0.9655},
        {{10}, 1, {{0.5237, 1.0}}, {0.5237, 1.0}, 0.5237},
        {{10}, 2, {{0.5237, 0.9584}, {1.0, 1.0}}, {0.6857, 1.0}, 0.6861},
        {{10}, 3, {{0.5237, 0.8489}, {0.5810, 0.9284}, {1.0, 1.0}}, {1.0, 1.0}, 0.8160},
        {{10}, 4, {{0.5237, 0.6775}, {0.5810, 0.7496}, {0.6743, 0.8593}, {1.0, 1.0}}, {1.0, 1.0}, 0.9302},
        {{16}, 1, {{0.5031, 1.0}}, {0.5031, 1.0}, 0.5031},
        {{16}, 2, {{0.5031, 0.9670}, {1.0, 1.0}}, {0.6587, 1.0}, 0.6587},
        {{16}, 3, {{0.5031, 0.8728}, {0.5531, 0.9441}, {1.0, 1.0}}, {1.0, 1.0}, 0.7833},
        {{16}, 4, {{0.5031, 0.7270}, {0.5531, 0.7954}, {0.6263, 0.8983}, {1.0, 1.0}}, {1.0, 1.0}, 0.8889},
        // lambda_4 is published as the single value 0.766; A_5 is sharp
        {{16}, 5, {{0.5031, 0.5454}, {0.5531, 0.6125}, {0.6266, 0.6796}, {0.766, 0.766}}, {1.0, 1.0}, 0.9795},
    };
    return rows;
}

struct Table1Entry {
    std::string column; ///< "lambda1_lo", ..., "eta1_hi", "mu_min"
    double computed;
    double published;
    [[nodiscard]] double deviation() const { return std::abs(computed - published); }
};

struct Table1Row {
    const Table1Reference *reference = nullptr;
    int n = 0; ///< setting count actually computed
    std::vector<SharpnessInterval> intervals; ///< A1..A_m, B1
    double mu_min = 0.0;
    std::vector<Table1Entry> entries;

    [[nodiscard]] const Table1Entry &worst() const {
        return *std::max_element(entries.begin(), entries.end(),
                                 [](const auto &a, const auto &b) { return a.deviation() < b.deviation(); });
    }
    [[nodiscard]] double max_deviation() const { return worst().deviation(); }
};

/// Recomputes one published row at setting count n (one of reference.n_values).
inline Table1Row reproduce_table1_row(const Table1Reference &reference, int n) {
    Table1Row row;
    row.reference = &reference;
    row.n = n;
    auto ranges = sharpness_ranges(n, reference.n_alices, 1.0);
    auto mu_min = min_purity(n, reference.n_alices, 1);
    if (!ranges || !mu_min) {
        throw DomainError("published configuration N=" + std::to_string(n) + ", N_A=" +
                          std::to_string(reference.n_alices) + " is infeasible");
    }
    row.intervals = std::move(*ranges);
    row.mu_min = *mu_min;
    for (std::size_t k = 0; k < reference.lambda.size(); ++k) {
        const auto &iv = row.intervals[k];
        const std::string col = "lambda" + std::to_string(k + 1);
        row.entries.push_back({col + "_lo", iv.lo, reference.lambda[k].lo});
        row.entries.push_back({col + "_hi", iv.hi, reference.lambda[k].hi});
    }
    const auto &bob = row.intervals.back();
    row.entries.push_back({"eta1_lo", bob.lo, reference.eta1.lo});
    row.entries.push_back({"eta1_hi", bob.hi, reference.eta1.hi});
    row.entries.push_back({"mu_min", row.mu_min, reference.mu_min});
    return row;
}

/// Every published row at every setting count it covers.
inline std::vector<Table1Row> reproduce_table1() {
    std::vector<Table1Row> rows;
    for (const auto &ref : table1_reference()) {
        for (int n : ref.n_values) {
            rows.push_back(reproduce_table1_row(ref, n));
        }
    }
    return rows;
}

} // namespace steerseq
