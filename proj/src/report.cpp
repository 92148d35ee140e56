#include "trex/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace trex {

using nlohmann::json;

double round3(double value) {
    return std::nearbyint(value * 1000.0) / 1000.0;
}

namespace {

std::string fmt3(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", round3(value));
    return buf;
}

std::string pref_label(const PreferenceVector& pref) {
    std::string label = "(";
    for (std::size_t i = 0; i < pref.weights.size(); ++i) {
        if (i) {
            label += ", ";
        }
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%g", pref.weights[i]);
        label += buf;
    }
    return label + ")";
}

}  // namespace

std::string render_table(const PreferenceReport& report) {
    if (report.attribution.empty()) {
        throw Error(ErrorCode::no_clusters, "report has no attribution records");
    }
    const std::size_t objectives = report.preference.objectives();

    // Rows are presented in cluster-id order; attribution comes ras-sorted.
    std::vector<const AttributionRecord*> by_id(report.attribution.size());
    for (const AttributionRecord& rec : report.attribution) {
        by_id.at(rec.cluster_id) = &rec;
    }
    int best_total = report.attribution.front().cluster_id;
    int best_ras = report.attribution.front().cluster_id;
    for (const AttributionRecord& rec : report.attribution) {
        const AttributionRecord& t = *by_id[best_total];
        if (rec.total_deviation > t.total_deviation ||
            (rec.total_deviation == t.total_deviation && rec.cluster_id < t.cluster_id)) {
            best_total = rec.cluster_id;
        }
    }

    std::ostringstream out;
    out << "# Attribution summary: " << report.env_name << " @ preference " << pref_label(report.preference)
        << "\n\n";
    out << "dR^i = (R^i_orig - R^i_comp) / |R^i_orig| (positive = objective got worse); "
        << "dR(c) = L2 norm of dR; RAS(c) = max over i<j of |w_i*dR^i - w_j*dR^j|.\n\n";

    out << "| policy |";
    for (std::size_t i = 0; i < objectives; ++i) {
        out << " R^" << (i + 1) << " |";
    }
    for (std::size_t i = 0; i < objectives; ++i) {
        out << " dR^" << (i + 1) << " |";
    }
    out << " dR(c) | RAS(c) | contrary |\n";
    out << "|---|";
    for (std::size_t i = 0; i < 2 * objectives + 3; ++i) {
        out << "---|";
    }
    out << "\n";

    auto returns_cells = [&](const VectorReturn& r) {
        std::string cells;
        for (std::size_t i = 0; i < objectives; ++i) {
            cells += " " + fmt3(r.values[i]) + " |";
        }
        return cells;
    };
    out << "| expert |" << returns_cells(report.expert_returns);
    for (std::size_t i = 0; i < objectives + 2; ++i) {
        out << " - |";
    }
    out << " |\n";
    out << "| original |" << returns_cells(report.original_returns);
    for (std::size_t i = 0; i < objectives + 2; ++i) {
        out << " - |";
    }
    out << " |\n";

    for (const AttributionRecord* rec : by_id) {
        out << "| c" << rec->cluster_id << " |" << returns_cells(rec->complementary_returns);
        for (std::size_t i = 0; i < objectives; ++i) {
            out << " " << fmt3(rec->delta_r[i]) << " |";
        }
        std::string total = fmt3(rec->total_deviation);
        std::string ras_cell = fmt3(rec->ras);
        if (rec->cluster_id == best_total) {
            total = "**" + total + "**";
        }
        if (rec->cluster_id == best_ras) {
            ras_cell = "**" + ras_cell + "**";
        }
        out << " " << total << " | " << ras_cell << " | " << (rec->contrary ? "yes" : "no") << " |\n";
    }
    return out.str();
}

namespace {

json record_to_json(const AttributionRecord& rec) {
    json j;
    j["cluster"] = rec.cluster_id;
    j["returns"] = rec.complementary_returns.values;
    j["delta_r"] = rec.delta_r;
    j["delta_r_raw"] = rec.delta_r_raw;
    j["degenerate"] = rec.degenerate;
    j["total_deviation"] = rec.total_deviation;
    j["ras"] = rec.ras;
    json pairs = json::array();
    for (const RasPair& p : rec.ras_pairs) {
        pairs.push_back({p.i, p.j, p.value});
    }
    j["ras_pairs"] = pairs;
    j["contrary"] = rec.contrary;
    j["notes"] = rec.notes;
    return j;
}

AttributionRecord record_from_json(const json& j) {
    AttributionRecord rec;
    rec.cluster_id = j.at("cluster").get<int>();
    rec.complementary_returns.values = j.at("returns").get<std::vector<double>>();
    rec.delta_r = j.at("delta_r").get<std::vector<double>>();
    rec.delta_r_raw = j.at("delta_r_raw").get<std::vector<double>>();
    rec.degenerate = j.at("degenerate").get<std::vector<bool>>();
    rec.total_deviation = j.at("total_deviation").get<double>();
    rec.ras = j.at("ras").get<double>();
    for (const auto& p : j.at("ras_pairs")) {
        rec.ras_pairs.push_back({p.at(0).get<int>(), p.at(1).get<int>(), p.at(2).get<double>()});
    }
    rec.contrary = j.at("contrary").get<bool>();
    rec.notes = j.at("notes").get<std::vector<std::string>>();
    return rec;
}

}  // namespace

std::string report_to_json(const PreferenceReport& report) {
    json j;
    j["format"] = "trex-report-v1";
    j["env"] = report.env_name;
    j["preference"] = report.preference.weights;
    j["config"] = json::parse(report.config_echo);
    json seeds;
    seeds["master"] = report.seeds.master;
    seeds["expert"] = report.seeds.expert;
    seeds["sample"] = report.seeds.sample;
    seeds["kmeans"] = report.seeds.kmeans;
    seeds["original_train"] = report.seeds.original_train;
    seeds["complementary_train"] = report.seeds.complementary_train;
    seeds["evaluate"] = report.seeds.evaluate;
    j["seeds"] = seeds;
    json returns;
    returns["expert"] = report.expert_returns.values;
    returns["original"] = report.original_returns.values;
    json comp = json::array();
    for (const ComplementaryReturns& c : report.complementary) {
        json cj;
        cj["cluster"] = c.cluster_id;
        cj["values"] = c.values.values;
        cj["unknown_state_hits"] = c.unknown_state_hits;
        comp.push_back(cj);
    }
    returns["complementary"] = comp;
    j["returns"] = returns;
    json clusters;
    clusters["k"] = report.clusters.k;
    clusters["silhouette"] = report.clusters.silhouette;
    clusters["inertia"] = report.clusters.inertia;
    clusters["iterations"] = report.clusters.iterations;
    clusters["sizes"] = report.clusters.sizes;
    json scanned = json::array();
    for (const auto& [k, score] : report.clusters.scanned) {
        scanned.push_back({json(k), json(score)});
    }
    clusters["scanned"] = scanned;
    j["clusters"] = clusters;
    json attribution = json::array();
    for (const AttributionRecord& rec : report.attribution) {
        attribution.push_back(record_to_json(rec));
    }
    j["attribution"] = attribution;
    json reps = json::array();
    for (std::size_t c = 0; c < report.representative_windows.size(); ++c) {
        json cj;
        cj["cluster"] = c;
        json windows = json::array();
        for (const SubTrajectory& w : report.representative_windows[c]) {
            json wj;
            wj["episode"] = w.episode_id;
            wj["start"] = w.start;
            wj["end"] = w.end;
            windows.push_back(wj);
        }
        cj["windows"] = windows;
        reps.push_back(cj);
    }
    j["representatives"] = reps;
    j["notes"] = report.notes;
    return j.dump(2) + "\n";
}

void export_json(const PreferenceReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::io_failure, "cannot write report " + path);
    }
    out << report_to_json(report);
    if (!out) {
        throw Error(ErrorCode::io_failure, "failed writing report " + path);
    }
}

PreferenceReport report_from_json(const std::string& text) {
    PreferenceReport report;
    try {
        json j = json::parse(text);
        if (j.value("format", "") != "trex-report-v1") {
            throw Error(ErrorCode::schema_error, "unsupported report format");
        }
        report.env_name = j.at("env").get<std::string>();
        report.preference = validate_preference(j.at("preference").get<std::vector<double>>());
        report.config_echo = j.at("config").dump(2);
        const json& seeds = j.at("seeds");
        report.seeds.master = seeds.at("master").get<std::uint64_t>();
        report.seeds.expert = seeds.at("expert").get<std::uint64_t>();
        report.seeds.sample = seeds.at("sample").get<std::uint64_t>();
        report.seeds.kmeans = seeds.at("kmeans").get<std::uint64_t>();
        report.seeds.original_train = seeds.at("original_train").get<std::uint64_t>();
        report.seeds.complementary_train =
            seeds.at("complementary_train").get<std::vector<std::uint64_t>>();
        report.seeds.evaluate = seeds.at("evaluate").get<std::uint64_t>();
        const json& returns = j.at("returns");
        report.expert_returns.values = returns.at("expert").get<std::vector<double>>();
        report.original_returns.values = returns.at("original").get<std::vector<double>>();
        for (const auto& cj : returns.at("complementary")) {
            ComplementaryReturns c;
            c.cluster_id = cj.at("cluster").get<int>();
            c.values.values = cj.at("values").get<std::vector<double>>();
            c.unknown_state_hits = cj.at("unknown_state_hits").get<std::uint64_t>();
            report.complementary.push_back(std::move(c));
        }
        const json& clusters = j.at("clusters");
        report.clusters.k = clusters.at("k").get<int>();
        report.clusters.silhouette = clusters.at("silhouette").get<double>();
        report.clusters.inertia = clusters.at("inertia").get<double>();
        report.clusters.iterations = clusters.at("iterations").get<int>();
        report.clusters.sizes = clusters.at("sizes").get<std::vector<std::size_t>>();
        for (const auto& sj : clusters.at("scanned")) {
            report.clusters.scanned.emplace_back(sj.at(0).get<int>(), sj.at(1).get<double>());
        }
        for (const auto& rj : j.at("attribution")) {
            report.attribution.push_back(record_from_json(rj));
        }
        report.representative_windows.resize(report.clusters.k);
        for (const auto& cj : j.at("representatives")) {
            int cluster = cj.at("cluster").get<int>();
            for (const auto& wj : cj.at("windows")) {
                SubTrajectory w;
                w.episode_id = wj.at("episode").get<int>();
                w.start = wj.at("start").get<int>();
                w.end = wj.at("end").get<int>();
                report.representative_windows.at(cluster).push_back(w);
            }
        }
        report.notes = j.at("notes").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::schema_error, std::string("bad report JSON: ") + e.what());
    }
    return report;
}

void export_representatives(const PreferenceReport& report, const OfflineDataset& dataset,
                            const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::io_failure, "cannot write representatives " + path);
    }
    for (std::size_t c = 0; c < report.representative_windows.size(); ++c) {
        int rank = 0;
        for (const SubTrajectory& w : report.representative_windows[c]) {
            const Trajectory* parent = nullptr;
            for (const Trajectory& t : dataset.trajectories) {
                if (t.episode_id == w.episode_id) {
                    parent = &t;
                    break;
                }
            }
            if (!parent || w.end > static_cast<int>(parent->steps.size())) {
                throw Error(ErrorCode::missing_episode,
                            "dataset lacks episode " + std::to_string(w.episode_id));
            }
            for (int t = w.start; t < w.end; ++t) {
                const Step& step = parent->steps[t];
                json rec;
                rec["cluster"] = c;
                rec["rank"] = rank;
                rec["episode"] = w.episode_id;
                rec["t"] = t;
                rec["obs"] = step.observation;
                rec["action"] = step.action;
                rec["reward"] = step.reward.values;
                rec["terminal"] = step.terminal;
                out << rec.dump() << "\n";
            }
            ++rank;
        }
    }
    if (!out) {
        throw Error(ErrorCode::io_failure, "failed writing representatives " + path);
    }
}

void write_clusters_csv(const std::vector<std::array<double, 2>>& projected,
                        const Assignment& assignment, const std::vector<Embedding>& embeddings,
                        const std::string& path) {
    if (projected.size() != assignment.entries.size() || projected.size() != embeddings.size()) {
        throw Error(ErrorCode::dimension_mismatch, "cluster export inputs must align");
    }
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::io_failure, "cannot write cluster csv " + path);
    }
    out << "pc1,pc2,cluster_id,episode,start\n";
    char buf[96];
    for (std::size_t i = 0; i < projected.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%d,%d,%d\n", projected[i][0], projected[i][1],
                      assignment.entries[i].cluster, embeddings[i].source.episode_id,
                      embeddings[i].source.start);
        out << buf;
    }
    if (!out) {
        throw Error(ErrorCode::io_failure, "failed writing cluster csv " + path);
    }
}

}  // namespace trex
