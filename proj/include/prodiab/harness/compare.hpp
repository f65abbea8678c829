#pragma once

#include <string>
#include <vector>

#include "prodiab/elimination.hpp"
#include "prodiab/operators.hpp"

namespace prodiab::harness {

// Real curves on a shared time grid.
struct CurveSet {
    std::vector<double> t;
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;

    void add(std::string name, std::vector<double> v);
    bool has(const std::string& name) const;
    const std::vector<double>& get(const std::string& name) const;
};

struct PairMetric {
    std::string a, b;
    double max_abs = 0.0;
    double l2 = 0.0;  // sqrt(int |a-b|^2 dt), trapezoidal
    double t_at_max = 0.0;
};

struct ComparisonReport {
    std::string family;
    std::vector<PairMetric> pairs;
    EpsilonReport eps;
    double leak_max = 0.0;
    bool leak_flagged = false;
    double wall_seconds = 0.0;
    InvariantReport worst;
    std::vector<std::string> notes;

    const PairMetric& find(const std::string& a, const std::string& b) const;
};

PairMetric compare_pair(const std::vector<double>& t, const std::string& na, const std::vector<double>& a,
                        const std::string& nb, const std::vector<double>& b);

// Curves named "<rep>_<observable>". With an exact curve for an observable,
// every other representation is compared against it; otherwise all pairs.
ComparisonReport compare(const CurveSet& curves);

}  // namespace prodiab::harness
