#include "prodiab/harness/compare.hpp"

#include <cmath>
#include <map>

#include "prodiab/error.hpp"

namespace prodiab::harness {

void CurveSet::add(std::string name, std::vector<double> v) {
    if (v.size() != t.size()) throw DomainError("CurveSet: curve '" + name + "' does not match the grid");
    names.push_back(std::move(name));
    values.push_back(std::move(v));
}

bool CurveSet::has(const std::string& name) const {
    for (const auto& n : names)
        if (n == name) return true;
    return false;
}

const std::vector<double>& CurveSet::get(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return values[i];
    throw DomainError("CurveSet: no curve named " + name);
}

const PairMetric& ComparisonReport::find(const std::string& a, const std::string& b) const {
    for (const auto& p : pairs)
        if ((p.a == a && p.b == b) || (p.a == b && p.b == a)) return p;
    throw DomainError("ComparisonReport: no pair " + a + " / " + b);
}

PairMetric compare_pair(const std::vector<double>& t, const std::string& na, const std::vector<double>& a,
                        const std::string& nb, const std::vector<double>& b) {
    if (a.size() != t.size() || b.size() != t.size()) throw DomainError("compare: grid mismatch");
    PairMetric m{na, nb, 0.0, 0.0, t.empty() ? 0.0 : t.front()};
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        if (d > m.max_abs) {
            m.max_abs = d;
            m.t_at_max = t[i];
        }
        if (i > 0) {
            const double dp = std::abs(a[i - 1] - b[i - 1]);
            acc += 0.5 * (t[i] - t[i - 1]) * (d * d + dp * dp);
        }
    }
    m.l2 = std::sqrt(acc);
    return m;
}

ComparisonReport compare(const CurveSet& curves) {
    ComparisonReport r;
    // observable -> list of (rep, index)
    std::map<std::string, std::vector<std::pair<std::string, std::size_t>>> by_obs;
    std::vector<std::string> order;
    for (std::size_t i = 0; i < curves.names.size(); ++i) {
        const auto& n = curves.names[i];
        const auto us = n.find('_');
        const std::string rep = us == std::string::npos ? n : n.substr(0, us);
        const std::string obs = us == std::string::npos ? "" : n.substr(us + 1);
        if (!by_obs.count(obs)) order.push_back(obs);
        by_obs[obs].push_back({rep, i});
    }
    for (const auto& obs : order) {
        const auto& reps = by_obs[obs];
        const std::pair<std::string, std::size_t>* ref = nullptr;
        for (const auto& rp : reps)
            if (rp.first == "exact") ref = &rp;
        for (std::size_t i = 0; i < reps.size(); ++i) {
            if (ref) {
                if (&reps[i] == ref) continue;
                r.pairs.push_back(compare_pair(curves.t, curves.names[reps[i].second], curves.values[reps[i].second],
                                               curves.names[ref->second], curves.values[ref->second]));
            } else {
                for (std::size_t j = i + 1; j < reps.size(); ++j)
                    r.pairs.push_back(compare_pair(curves.t, curves.names[reps[i].second],
                                                   curves.values[reps[i].second], curves.names[reps[j].second],
                                                   curves.values[reps[j].second]));
            }
        }
    }
    return r;
}

}  // namespace prodiab::harness
