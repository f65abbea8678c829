#pragma once

#include <span>
#include <vector>

#include "prodiab/elimination.hpp"

namespace prodiab {

// Two-time stationary photon correlators on the effective atom models.
// Operator times are either the origin (0) or the lag (t >= 0).
enum class Slot { origin, lag };

// < a^dagger(c_1) ... a^dagger(c_M) mid(t) a(n_1) ... a(n_N) >
// creation slots must be non-decreasing and annihilation slots non-increasing
// left to right (time ordering). M, N <= 2.
struct CorrelatorSpec {
    std::vector<Slot> creation;
    std::vector<Slot> annihilation;
    OperatorMatrix mid;  // atom operator at the lag; empty = identity

    static CorrelatorSpec g1();  // <a^dagger(0) a(t)>
    static CorrelatorSpec g2();  // <a^dagger(0) a^dagger(t) a(t) a(0)>
};

enum class ModelChoice { adb, pdb };

struct CorrelatorOptions {
    JCBranch branch = JCBranch::automatic;
    IntegratorConfig cfg = correlator_config();
};

std::vector<cd> pdb_correlator(const JCParams& p, const CorrelatorSpec& spec, ModelChoice model, bool include_noise,
                               std::span<const double> grid, const CorrelatorOptions& opts = {});

// Normalized g2 from pdb_correlator: Re(numerator) / <a^dagger a>^2 with the
// photon number taken from the same effective model.
std::vector<double> effective_g2(const JCParams& p, ModelChoice model, bool include_noise,
                                 std::span<const double> grid, const CorrelatorOptions& opts = {});

}  // namespace prodiab
