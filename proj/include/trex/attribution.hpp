#pragma once

#include <string>
#include <vector>

#include "trex/core.hpp"

namespace trex {

// Relative per-objective return deviations of a complementary policy against
// the original policy. `values` divides by |baseline| so a positive entry
// always means the objective got worse, regardless of the baseline's sign;
// `raw` keeps the unadjusted baseline-signed ratio. Objectives whose baseline
// magnitude is below 1e-9 are flagged degenerate and report 0.
struct DeltaResult {
    std::vector<double> values;
    std::vector<double> raw;
    std::vector<bool> degenerate;
};

DeltaResult delta_r(const VectorReturn& original, const VectorReturn& complementary);

// L2 norm of the deviation vector.
double total_deviation(const std::vector<double>& dr);

struct RasPair {
    int i = 0;
    int j = 0;
    double value = 0.0;
};

// Reward attribution score |w_i * dr_i - w_j * dr_j|. For two objectives this
// is the single pair; for more, the maximum over all pairs (the full matrix is
// available through ras_pairs).
double ras(const std::vector<double>& dr, const PreferenceVector& pref);
std::vector<RasPair> ras_pairs(const std::vector<double>& dr, const PreferenceVector& pref);

// True iff some deviation exceeds +tau while another falls below -tau.
inline constexpr double kContraryTau = 0.01;
bool contrary_flag(const std::vector<double>& dr, double tau = kContraryTau);

struct AttributionRecord {
    int cluster_id = 0;
    VectorReturn complementary_returns;
    std::vector<double> delta_r;      // sign-adjusted (positive = worse)
    std::vector<double> delta_r_raw;  // plain (original - complementary) / original
    std::vector<bool> degenerate;
    double total_deviation = 0.0;
    double ras = 0.0;
    std::vector<RasPair> ras_pairs;
    bool contrary = false;
    std::vector<std::string> notes;
};

// One record per cluster, sorted by descending ras, then descending total
// deviation, then ascending cluster id.
std::vector<AttributionRecord> attribute(const VectorReturn& original_returns,
                                         const std::vector<VectorReturn>& per_cluster_returns,
                                         const PreferenceVector& pref);

}  // namespace trex
