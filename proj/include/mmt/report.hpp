#ifndef MMT_REPORT_HPP
#define MMT_REPORT_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmt/align.hpp"
#include "mmt/annotate.hpp"
#include "mmt/errors.hpp"
#include "mmt/topic_model.hpp"

namespace mmt {

// The report bundle is assembled purely from artifacts a run left on disk
// (models, annotations, alignment outputs). It deliberately contains no
// timestamps so identical runs produce byte-identical reports.

namespace detail {

inline nlohmann::json read_json_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw DataError("report: missing artifact " + p.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("report: corrupt artifact " + p.string());
    return j;
}

}  // namespace detail

/// Aggregates one run directory into report/report.json + CSV tables.
/// Returns the report JSON.
inline nlohmann::json build_report(const std::filesystem::path& run_dir) {
    nlohmann::json report;
    nlohmann::json run_info = detail::read_json_file(run_dir / "run_info.json");
    report["period_label"] = run_info.value("period_label", "");
    report["config"] = run_info.value("config", nlohmann::json::object());

    // Per-modality model summaries.
    nlohmann::json models = nlohmann::json::object();
    std::vector<std::string> modalities;
    for (const auto& m : run_info.at("modalities")) modalities.push_back(m.get<std::string>());
    for (const std::string& m : modalities) {
        nlohmann::json mj = detail::read_json_file(run_dir / ("model_" + m + ".json"));
        TopicModelResult r = topic_result_from_json(mj);
        nlohmann::json summary;
        summary["documents"] = r.n_documents;
        summary["topics"] = r.topics.size();
        std::size_t outliers = 0;
        for (const auto& [id, t] : r.assignments)
            if (t < 0) ++outliers;
        summary["outliers"] = outliers;
        summary["outlier_ratio"] = r.n_documents ? static_cast<double>(outliers) / static_cast<double>(r.n_documents) : 0.0;
        models[m] = std::move(summary);
    }
    report["models"] = std::move(models);

    // Dedup stage counts, when present.
    if (std::filesystem::exists(run_dir / "dedup_stats.json"))
        report["dedup"] = detail::read_json_file(run_dir / "dedup_stats.json");

    // Annotation distributions (topic/image types) per modality.
    nlohmann::json distributions = nlohmann::json::object();
    for (const std::string& m : modalities) {
        auto path = run_dir / ("annotations_" + m + ".json");
        if (!std::filesystem::exists(path)) continue;
        nlohmann::json aj = detail::read_json_file(path);
        std::vector<TopicAnnotation> annotations;
        for (const auto& a : aj.at("annotations")) {
            TopicAnnotation ta;
            ta.topic_id = a.at("topic_id").get<int>();
            auto mod = parse_modality(a.at("modality").get<std::string>());
            ta.modality = mod.value_or(Modality::text);
            ta.name = a.value("name", "");
            ta.topic_type = parse_topic_type(a.at("topic_type").get<std::string>())
                                .value_or(TopicType::content_unclear);
            if (a.contains("image_type") && a["image_type"].is_string())
                ta.image_type = parse_image_type(a["image_type"].get<std::string>());
            annotations.push_back(std::move(ta));
        }
        AnnotationDistribution dist = annotation_distribution(annotations);
        distributions[m] = {{"topic_type", dist.topic_type}, {"image_type", dist.image_type}};
    }
    report["type_distributions"] = std::move(distributions);

    // Alignment artifacts.
    report["symmetry"] = detail::read_json_file(run_dir / "align" / "symmetry.json");
    report["group_rankings"] = detail::read_json_file(run_dir / "align" / "rankings.json");
    report["intersections"] = detail::read_json_file(run_dir / "align" / "intersections.json");
    return report;
}

inline void write_report_csvs(const nlohmann::json& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(out_dir / "model_summary.csv", std::ios::binary | std::ios::trunc);
        out << csv_row({"modality", "documents", "topics", "outliers", "outlier_ratio"});
        for (auto it = report["models"].begin(); it != report["models"].end(); ++it) {
            const auto& s = it.value();
            out << csv_row({it.key(), std::to_string(s["documents"].get<std::size_t>()),
                            std::to_string(s["topics"].get<std::size_t>()),
                            std::to_string(s["outliers"].get<std::size_t>()),
                            std::to_string(s["outlier_ratio"].get<double>())});
        }
    }
    {
        std::ofstream out(out_dir / "type_distribution.csv", std::ios::binary | std::ios::trunc);
        out << csv_row({"modality", "category", "label", "proportion"});
        for (auto it = report["type_distributions"].begin(); it != report["type_distributions"].end();
             ++it) {
            for (const char* cat : {"topic_type", "image_type"}) {
                const auto& m = it.value()[cat];
                for (auto jt = m.begin(); jt != m.end(); ++jt)
                    out << csv_row({it.key(), cat, jt.key(), std::to_string(jt.value().get<double>())});
            }
        }
    }
    {
        std::ofstream out(out_dir / "symmetry.csv", std::ios::binary | std::ios::trunc);
        out << csv_row({"source", "target", "symmetry_ratio"});
        for (const auto& e : report["symmetry"])
            out << csv_row({e["source_modality"].get<std::string>(),
                            e["target_modality"].get<std::string>(),
                            std::to_string(e["symmetry_ratio"].get<double>())});
    }
    {
        std::ofstream out(out_dir / "group_rankings.csv", std::ios::binary | std::ios::trunc);
        out << csv_row({"modality", "rank", "group", "count", "proportion"});
        for (auto it = report["group_rankings"].begin(); it != report["group_rankings"].end(); ++it) {
            int rank = 1;
            for (const auto& e : it.value())
                out << csv_row({it.key(), std::to_string(rank++), e["group"].get<std::string>(),
                                std::to_string(e["count"].get<std::size_t>()),
                                std::to_string(e["proportion"].get<double>())});
        }
    }
}

/// Two-period juxtaposition, the temporal-transfer view: per-modality
/// topic counts, rankings and symmetry ratios side by side.
inline nlohmann::json compare_reports(const nlohmann::json& a, const nlohmann::json& b) {
    nlohmann::json cmp;
    cmp["period_a"] = a.value("period_label", "a");
    cmp["period_b"] = b.value("period_label", "b");
    cmp["models"] = {{"a", a["models"]}, {"b", b["models"]}};
    cmp["group_rankings"] = {{"a", a["group_rankings"]}, {"b", b["group_rankings"]}};
    cmp["symmetry"] = {{"a", a["symmetry"]}, {"b", b["symmetry"]}};
    cmp["type_distributions"] = {{"a", a["type_distributions"]}, {"b", b["type_distributions"]}};
    return cmp;
}

}  // namespace mmt

#endif
