#pragma once

/**
 * @file
 * JSON and CSV forms of states, setting sets and results.
 *
 * Complex matrices are nested row-major arrays of [re, im] pairs. CSV output
 * always prints reals with six decimals so identical runs produce identical
 * files.
 */

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "solver.hpp"
#include "steering.hpp"
#include "table1.hpp"

namespace steerseq {

using nlohmann::json;

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    // avoid "-0.000000"
    if (std::string(buf) == "-0.000000") {
        return "0.000000";
    }
    return buf;
}

inline double round6(double v) {
    const double r = std::round(v * 1e6) / 1e6;
    return r == 0.0 ? 0.0 : r;
}

/// Rounds every floating-point number in the tree to six decimals.
inline void quantize(json &j) {
    if (j.is_number_float()) {
        j = round6(j.get<double>());
    } else if (j.is_array() || j.is_object()) {
        for (auto &child : j) {
            quantize(child);
        }
    }
}

inline json matrix_to_json(const Matrix4 &m) {
    json rows = json::array();
    for (std::size_t r = 0; r < 4; ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < 4; ++c) {
            row.push_back({m(r, c).real(), m(r, c).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix4 matrix_from_json(const json &j) {
    if (!j.is_array() || j.size() != 4) {
        throw ContractError("density matrix JSON must have 4 rows");
    }
    Matrix4 m;
    for (std::size_t r = 0; r < 4; ++r) {
        if (!j[r].is_array() || j[r].size() != 4) {
            throw ContractError("density matrix JSON row " + std::to_string(r) +
                                " must have 4 entries");
        }
        for (std::size_t c = 0; c < 4; ++c) {
            const json &z = j[r][c];
            if (!z.is_array() || z.size() != 2) {
                throw ContractError("density matrix JSON entries must be [re, im] pairs");
            }
            m(r, c) = Complex{z[0].get<double>(), z[1].get<double>()};
        }
    }
    return m;
}

inline json to_json_value(const DensityMatrix &rho) { return matrix_to_json(rho.matrix()); }

inline DensityMatrix density_matrix_from_json(const json &j) {
    return DensityMatrix(matrix_from_json(j));
}

inline json to_json_value(const SettingSet &s) {
    auto dirs = [](const std::vector<BlochVector> &v) {
        json out = json::array();
        for (const auto &d : v) {
            out.push_back({d.x(), d.y(), d.z()});
        }
        return out;
    };
    return json{{"n", s.n_settings()}, {"alice_dirs", dirs(s.alice_dirs())}, {"bob_dirs", dirs(s.bob_dirs())}};
}

inline SettingSet setting_set_from_json(const json &j) {
    std::vector<BlochVector> alice;
    for (const auto &d : j.at("alice_dirs")) {
        alice.push_back(BlochVector::normalized(d.at(0).get<double>(), d.at(1).get<double>(),
                                                d.at(2).get<double>()));
    }
    SettingSet s(std::move(alice));
    if (j.at("n").get<int>() != s.n_settings()) {
        throw ContractError("setting set JSON: n does not match the number of axes");
    }
    const auto &bob = j.at("bob_dirs");
    if (bob.size() != s.bob_dirs().size()) {
        throw ContractError("setting set JSON: bob_dirs length mismatch");
    }
    for (std::size_t k = 0; k < bob.size(); ++k) {
        const auto &expect = s.bob_dirs()[k].components();
        for (std::size_t c = 0; c < 3; ++c) {
            if (std::abs(bob[k].at(c).get<double>() - expect[c]) > 1e-6) {
                throw ContractError("setting set JSON: bob_dirs[" + std::to_string(k) +
                                    "] is not the antipode of alice_dirs[" + std::to_string(k) + "]");
            }
        }
    }
    return s;
}

inline json to_json_value(const SteeringReport &r) {
    json j{{"n_settings", r.n_settings}, {"mu", r.mu},           {"bound", r.bound},
           {"values", r.values},         {"violated", r.violated}, {"margin", r.margin}};
    if (r.oracle_max_deviation) {
        j["oracle_max_deviation"] = *r.oracle_max_deviation;
    }
    return j;
}

inline SteeringReport steering_report_from_json(const json &j) {
    SteeringReport r;
    r.n_settings = j.at("n_settings").get<int>();
    r.mu = j.at("mu").get<double>();
    r.bound = j.at("bound").get<double>();
    r.values = j.at("values").get<std::vector<std::vector<double>>>();
    r.violated = j.at("violated").get<std::vector<std::vector<bool>>>();
    r.margin = j.at("margin").get<std::vector<std::vector<double>>>();
    if (j.contains("oracle_max_deviation")) {
        r.oracle_max_deviation = j.at("oracle_max_deviation").get<double>();
    }
    return r;
}

inline json to_json_value(const std::vector<SharpnessInterval> &intervals) {
    json out = json::array();
    for (const auto &iv : intervals) {
        out.push_back({{"observer", iv.observer}, {"lo", iv.lo}, {"hi", iv.hi}});
    }
    return out;
}

inline std::vector<SharpnessInterval> intervals_from_json(const json &j) {
    std::vector<SharpnessInterval> out;
    for (const auto &e : j) {
        out.push_back({e.at("observer").get<std::string>(), e.at("lo").get<double>(),
                       e.at("hi").get<double>()});
    }
    return out;
}

inline json range_to_json(const std::optional<ValueRange> &r) {
    return r ? json::array({r->lo, r->hi}) : json(nullptr);
}

inline const std::array<const char *, 4> kPairLabels2x2{"S11", "S12", "S21", "S22"};

/// Summary of a 2x2 scan; the full grid goes to CSV.
inline json to_json_value(const RegionScan &scan) {
    json curves = json::object();
    for (std::size_t k = 0; k < 4; ++k) {
        json pts = json::array();
        for (const auto &pt : scan.boundary_curves[k]) {
            pts.push_back({pt.lambda1, pt.eta1});
        }
        curves[kPairLabels2x2[k]] = std::move(pts);
    }
    return json{{"n_settings", scan.n_settings},
                {"mu", scan.mu},
                {"grid_step", scan.grid_step},
                {"bound", scan.bound},
                {"cell_count", scan.cells().size()},
                {"lambda_extent", range_to_json(scan.lambda_extent)},
                {"diagonal_extent", range_to_json(scan.diagonal_extent)},
                {"boundary_curves", std::move(curves)}};
}

inline json to_json_value(const std::vector<Table1Row> &rows) {
    json out = json::array();
    for (const auto &row : rows) {
        json entries = json::array();
        for (const auto &e : row.entries) {
            entries.push_back({{"column", e.column},
                               {"computed", e.computed},
                               {"published", e.published},
                               {"deviation", e.deviation()}});
        }
        out.push_back({{"n", row.n},
                       {"n_alices", row.reference->n_alices},
                       {"n_bobs", 1},
                       {"intervals", to_json_value(row.intervals)},
                       {"mu_min", row.mu_min},
                       {"entries", std::move(entries)},
                       {"max_abs_deviation", row.max_deviation()}});
    }
    return out;
}

inline void write_csv(std::ostream &os, const SteeringReport &r) {
    os << "i,p,S,bound,violated,margin\n";
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        for (std::size_t p = 0; p < r.values[i].size(); ++p) {
            os << i + 1 << ',' << p + 1 << ',' << fixed6(r.values[i][p]) << ',' << fixed6(r.bound)
               << ',' << (r.violated[i][p] ? 1 : 0) << ',' << fixed6(r.margin[i][p]) << '\n';
        }
    }
}

inline void write_csv(std::ostream &os, const std::vector<SharpnessInterval> &intervals) {
    os << "observer,lo,hi\n";
    for (const auto &iv : intervals) {
        os << iv.observer << ',' << fixed6(iv.lo) << ',' << fixed6(iv.hi) << '\n';
    }
}

inline void write_csv(std::ostream &os, const RegionScan &scan) {
    os << "lambda1,eta1,S11,S12,S21,S22,in_region\n";
    for (const auto &pt : scan.points) {
        os << fixed6(pt.lambda1) << ',' << fixed6(pt.eta1);
        for (double s : pt.s) {
            os << ',' << fixed6(s);
        }
        os << ',' << (pt.in_region ? 1 : 0) << '\n';
    }
}

/// Table-shaped CSV: published columns, blanks for absent observers, worst deviation last.
inline void write_csv(std::ostream &os, const std::vector<Table1Row> &rows) {
    os << "N,N_A,N_B";
    for (int k = 1; k <= 4; ++k) {
        os << ",lambda" << k << "_lo,lambda" << k << "_hi";
    }
    os << ",eta1_lo,eta1_hi,mu_min,max_abs_deviation,worst_column\n";
    for (const auto &row : rows) {
        os << row.n << ',' << row.reference->n_alices << ",1";
        for (std::size_t k = 0; k < 4; ++k) {
            if (k < row.reference->lambda.size()) {
                os << ',' << fixed6(row.intervals[k].lo) << ',' << fixed6(row.intervals[k].hi);
            } else {
                os << ",,";
            }
        }
        const auto &bob = row.intervals.back();
        os << ',' << fixed6(bob.lo) << ',' << fixed6(bob.hi) << ',' << fixed6(row.mu_min) << ','
           << fixed6(row.max_deviation()) << ',' << row.worst().column << '\n';
    }
}

} // namespace steerseq
