#include "trex/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace trex {

DeltaResult delta_r(const VectorReturn& original, const VectorReturn& complementary) {
    if (original.size() != complementary.size()) {
        throw Error(ErrorCode::dimension_mismatch, "return vectors differ in objective count");
    }
    DeltaResult out;
    out.values.reserve(original.size());
    out.raw.reserve(original.size());
    out.degenerate.reserve(original.size());
    for (std::size_t i = 0; i < original.size(); ++i) {
        double base = original.values[i];
        double diff = base - complementary.values[i];
        if (std::abs(base) < 1e-9) {
            out.values.push_back(0.0);
            out.raw.push_back(0.0);
            out.degenerate.push_back(true);
        } else {
            out.values.push_back(diff / std::abs(base));
            out.raw.push_back(diff / base);
            out.degenerate.push_back(false);
        }
    }
    return out;
}

double total_deviation(const std::vector<double>& dr) {
    double sum = 0.0;
    for (double v : dr) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::not_finite, "non-finite deviation");
        }
        sum += v * v;
    }
    return std::sqrt(sum);
}

std::vector<RasPair> ras_pairs(const std::vector<double>& dr, const PreferenceVector& pref) {
    if (dr.size() != pref.objectives()) {
        throw Error(ErrorCode::dimension_mismatch, "deviation and preference sizes differ");
    }
    if (dr.size() < 2) {
        throw Error(ErrorCode::dimension_mismatch, "ras needs at least 2 objectives");
    }
    std::vector<RasPair> pairs;
    for (std::size_t i = 0; i < dr.size(); ++i) {
        for (std::size_t j = i + 1; j < dr.size(); ++j) {
            RasPair p;
            p.i = static_cast<int>(i);
            p.j = static_cast<int>(j);
            p.value = std::abs(pref.weights[i] * dr[i] - pref.weights[j] * dr[j]);
            pairs.push_back(p);
        }
    }
    return pairs;
}

double ras(const std::vector<double>& dr, const PreferenceVector& pref) {
    double best = 0.0;
    for (const RasPair& p : ras_pairs(dr, pref)) {
        best = std::max(best, p.value);
    }
    return best;
}

bool contrary_flag(const std::vector<double>& dr, double tau) {
    bool up = false;
    bool down = false;
    for (double v : dr) {
        up = up || v > tau;
        down = down || v < -tau;
    }
    return up && down;
}

std::vector<AttributionRecord> attribute(const VectorReturn& original_returns,
                                         const std::vector<VectorReturn>& per_cluster_returns,
                                         const PreferenceVector& pref) {
    std::vector<AttributionRecord> records;
    records.reserve(per_cluster_returns.size());
    for (std::size_t c = 0; c < per_cluster_returns.size(); ++c) {
        AttributionRecord rec;
        rec.cluster_id = static_cast<int>(c);
        rec.complementary_returns = per_cluster_returns[c];
        DeltaResult dr = delta_r(original_returns, per_cluster_returns[c]);
        rec.delta_r = dr.values;
        rec.delta_r_raw = dr.raw;
        rec.degenerate = dr.degenerate;
        for (std::size_t i = 0; i < dr.degenerate.size(); ++i) {
            if (dr.degenerate[i]) {
                rec.notes.push_back("objective " + std::to_string(i) +
                                    " baseline is ~0; deviation undefined, reported as 0");
            }
        }
        rec.total_deviation = total_deviation(rec.delta_r);
        rec.ras_pairs = ras_pairs(rec.delta_r, pref);
        rec.ras = 0.0;
        for (const RasPair& p : rec.ras_pairs) {
            rec.ras = std::max(rec.ras, p.value);
        }
        rec.contrary = contrary_flag(rec.delta_r);
        records.push_back(std::move(rec));
    }
    std::sort(records.begin(), records.end(),
              [](const AttributionRecord& a, const AttributionRecord& b) {
                  return std::tie(b.ras, b.total_deviation, a.cluster_id) <
                         std::tie(a.ras, a.total_deviation, b.cluster_id);
              });
    return records;
}

}  // namespace trex
