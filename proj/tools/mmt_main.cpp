// mmt: multimodal topic modeling pipeline CLI.
//
// Stages write artifacts plus a manifest entry into the run directory and
// refuse to run before their predecessors:
//   synth -> ingest -> dedup -> embed -> fit -> annotate -> align -> report

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmt/align.hpp"
#include "mmt/annotate.hpp"
#include "mmt/caption.hpp"
#include "mmt/config.hpp"
#include "mmt/corpus.hpp"
#include "mmt/dedup.hpp"
#include "mmt/embedding.hpp"
#include "mmt/errors.hpp"
#include "mmt/llm.hpp"
#include "mmt/llm_http.hpp"
#include "mmt/manifest.hpp"
#include "mmt/report.hpp"
#include "mmt/synth.hpp"
#include "mmt/topic_model.hpp"
#include "mmt/vector_store.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kDefaultPromptTemplate =
    "You are annotating topics from a {{modality}} topic model of social media posts.\n"
    "Topic {{topic_id}} keywords: {{keywords}}\n"
    "Representative documents:\n{{documents}}\n\n"
    "Reply with exactly one JSON object and nothing else:\n"
    "{\"name\": <concise topic name, empty string unless topic_type is content>,\n"
    " \"topic_type\": one of [{{topic_types}}],\n"
    " \"image_type\": one of [{{image_types}}] (null for text topics),\n"
    " \"definition\": <one-sentence label definition>}\n";

struct PipelineContext {
    mmt::RunConfig cfg;
    fs::path out;
    std::string cfg_hash;
};

mmt::RunConfig load_run_config(const std::string& config_path, const std::string& out_override,
                               const std::string& modality_override, long long seed_override) {
    if (config_path.empty()) throw mmt::UsageError("--config is required for this subcommand");
    mmt::RunConfig cfg = mmt::run_config_from_json(mmt::load_config_file(config_path));
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (seed_override >= 0) cfg.topic_model.seed = static_cast<std::uint64_t>(seed_override);
    if (!modality_override.empty() && modality_override != "all") {
        auto m = mmt::parse_modality(modality_override);
        if (!m) throw mmt::UsageError("bad --modality '" + modality_override + "'");
        cfg.modalities = {*m};
    }
    if (cfg.out_dir.empty()) throw mmt::UsageError("no output directory (config out_dir or --out)");
    // Paths in the config are resolved relative to the config file.
    fs::path base = fs::path(config_path).parent_path();
    auto resolve = [&](std::string& p) {
        if (!p.empty() && fs::path(p).is_relative()) p = (base / p).string();
    };
    resolve(cfg.corpus_path);
    resolve(cfg.out_dir);
    resolve(cfg.llm_fixture);
    resolve(cfg.prompt_template_path);
    resolve(cfg.group_map_path);
    resolve(cfg.topic_model.stopword_file);
    return cfg;
}

void write_json_file(const json& j, const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw mmt::DataError("cannot write " + p.string());
    out << j.dump(2) << "\n";
}

mmt::Corpus load_stage_corpus(const fs::path& p, mmt::CorpusStage stage) {
    mmt::Corpus c = mmt::load_messages(p.string());
    c.stage = stage;  // the JSONL schema does not carry the stage
    return c;
}

std::string image_base_dir(const mmt::RunConfig& cfg) {
    return fs::path(cfg.corpus_path).parent_path().string();
}

// Embedder construction per config.
std::unique_ptr<mmt::TextEmbedder> make_text_embedder(const mmt::RunConfig& cfg,
                                                      mmt::EmbedSpace space) {
    std::uint64_t seed = cfg.topic_model.seed ^ (space == mmt::EmbedSpace::joint_text_image ? 0x77ULL : 0x0ULL);
    std::string suffix = space == mmt::EmbedSpace::joint_text_image ? "-joint" : "";
    if (cfg.text_backend == "fixture-tokenmix")
        return std::make_unique<mmt::FixtureTextEmbedder>(
            cfg.embed_dim, seed, mmt::FixtureTextEmbedder::Mode::token_mix, space, suffix);
    if (cfg.text_backend == "fixture-content")
        return std::make_unique<mmt::FixtureTextEmbedder>(
            cfg.embed_dim, seed, mmt::FixtureTextEmbedder::Mode::content, space, suffix);
    throw mmt::BackendError("text embedder backend '" + cfg.text_backend +
                            "' is not available; built-ins: fixture-tokenmix, fixture-content");
}

std::unique_ptr<mmt::ImageEmbedder> make_image_embedder(const mmt::RunConfig& cfg) {
    if (cfg.image_backend == "fixture-color")
        return std::make_unique<mmt::FixtureImageEmbedder>(cfg.embed_dim, cfg.topic_model.seed ^ 0x99ULL,
                                                           cfg.image_color_signal);
    throw mmt::BackendError("image embedder backend '" + cfg.image_backend +
                            "' is not available; built-in: fixture-color");
}

std::unique_ptr<mmt::Captioner> make_captioner(const mmt::RunConfig& cfg) {
    if (cfg.captioner == "pixelstat") return std::make_unique<mmt::PixelStatCaptioner>();
    if (cfg.captioner == "filename-stem") return std::make_unique<mmt::FilenameStemCaptioner>();
    throw mmt::BackendError("captioner '" + cfg.captioner +
                            "' is not available; built-ins: pixelstat, filename-stem");
}

std::unique_ptr<mmt::LlmClient> make_llm_client(const mmt::RunConfig& cfg) {
    if (cfg.llm_backend == "echo") return std::make_unique<mmt::EchoLlmClient>();
    if (cfg.llm_backend == "recorded") {
        if (cfg.llm_fixture.empty())
            throw mmt::UsageError("llm backend 'recorded' needs llm.fixture in the config");
        return std::make_unique<mmt::RecordedLlmClient>(
            mmt::RecordedLlmClient::from_file(cfg.llm_fixture));
    }
    if (cfg.llm_backend == "http") {
        mmt::HttpLlmConfig hc;
        hc.base_url = cfg.llm_base_url;
        hc.model = cfg.llm_model;
        hc.api_key_env = cfg.llm_api_key_env;
        return std::make_unique<mmt::HttpLlmClient>(hc);
    }
    throw mmt::BackendError("llm backend '" + cfg.llm_backend +
                            "' is not available; built-ins: none, echo, recorded, http");
}

const char* subcorpus_file(mmt::Modality m) {
    switch (m) {
        case mmt::Modality::text: return "corpus_text.jsonl";
        case mmt::Modality::image: return "corpus_image.jsonl";
        case mmt::Modality::multimodal: return "corpus_multimodal.jsonl";
    }
    return "corpus_text.jsonl";
}

// ---------------------------------------------------------------------------

void cmd_ingest(const PipelineContext& ctx) {
    mmt::StageLock lock(ctx.out);
    if (ctx.cfg.corpus_path.empty()) throw mmt::UsageError("config: corpus path is required");
    mmt::LoadStats stats;
    mmt::Corpus raw =
        mmt::load_messages(ctx.cfg.corpus_path, &stats, ctx.cfg.max_malformed_fraction);
    mmt::Corpus paired = mmt::filter_paired(raw);
    paired.period_label = ctx.cfg.period_label;
    mmt::write_messages(paired, (ctx.out / "corpus_paired.jsonl").string());

    json cat = json::object();
    for (const auto& [category, cs] : mmt::category_stats(paired))
        cat[mmt::to_string(category)] = {{"messages", cs.message_count}, {"channels", cs.channel_count}};
    json stats_json;
    stats_json["total_lines"] = stats.total_lines;
    stats_json["malformed_lines"] = stats.malformed_lines;
    stats_json["raw_messages"] = raw.size();
    stats_json["paired_messages"] = paired.size();
    stats_json["category_stats"] = std::move(cat);
    write_json_file(stats_json, ctx.out / "ingest_stats.json");

    json run_info;
    run_info["period_label"] = ctx.cfg.period_label;
    json mods = json::array();
    for (mmt::Modality m : ctx.cfg.modalities) mods.push_back(mmt::to_string(m));
    run_info["modalities"] = mods;
    run_info["config"] = mmt::config_canonical_json(ctx.cfg);
    write_json_file(run_info, ctx.out / "run_info.json");

    mmt::RunManifest(ctx.out).record("ingest", mmt::file_fingerprint(ctx.cfg.corpus_path),
                                     ctx.cfg_hash);
    std::cout << "ingest: " << paired.size() << " paired messages (" << stats.malformed_lines
              << " malformed lines skipped)\n";
}

void cmd_dedup(const PipelineContext& ctx) {
    mmt::StageLock lock(ctx.out);
    mmt::RunManifest manifest(ctx.out);
    manifest.require_stage("ingest", ctx.cfg_hash);
    mmt::Corpus paired = load_stage_corpus(ctx.out / "corpus_paired.jsonl", mmt::CorpusStage::paired);
    paired.period_label = ctx.cfg.period_label;

    auto failed = mmt::compute_corpus_hashes(paired, image_base_dir(ctx.cfg));
    if (!failed.empty()) {
        std::set<std::string> bad(failed.begin(), failed.end());
        mmt::Corpus ok;
        ok.period_label = paired.period_label;
        ok.stage = paired.stage;
        for (auto& m : paired.messages)
            if (!bad.count(m.message_id)) ok.messages.push_back(std::move(m));
        paired = std::move(ok);
        std::cerr << "dedup: warning: " << failed.size() << " images failed to decode and were dropped\n";
    }

    mmt::DedupResult base = mmt::dedup_base(paired);
    mmt::write_messages(base.kept, (ctx.out / "corpus_base.jsonl").string());
    json stats;
    stats["paired"] = paired.size();
    stats["undecodable_images"] = failed.size();
    stats["base"] = {{"kept", base.kept.size()}, {"removed", base.removed_count}};
    for (auto modality :
         {mmt::DedupModality::text, mmt::DedupModality::image, mmt::DedupModality::multimodal}) {
        mmt::DedupResult r = mmt::dedup_modality(base.kept, modality);
        std::string name = mmt::to_string(modality);
        mmt::write_messages(r.kept, (ctx.out / ("corpus_" + name + ".jsonl")).string());
        stats[name] = {{"kept", r.kept.size()}, {"removed", r.removed_count}};
    }
    write_json_file(stats, ctx.out / "dedup_stats.json");
    manifest.record("dedup", mmt::file_fingerprint(ctx.out / "corpus_paired.jsonl"), ctx.cfg_hash);
    std::cout << "dedup: base " << base.kept.size() << " of " << paired.size() << " paired\n";
}

void cmd_embed(const PipelineContext& ctx) {
    mmt::StageLock lock(ctx.out);
    mmt::RunManifest manifest(ctx.out);
    manifest.require_stage("dedup", ctx.cfg_hash);
    fs::path vectors = ctx.out / "vectors";
    json stats = json::object();
    mmt::EmbeddingCache cache;
    std::string base_dir = image_base_dir(ctx.cfg);
    auto image_paths = [&](const mmt::Corpus& c) {
        std::vector<std::string> paths;
        for (const auto& m : c.messages) {
            std::string p = m.image_ref.value_or("");
            if (!p.empty() && p[0] != '/' && !base_dir.empty()) p = base_dir + "/" + p;
            paths.push_back(p);
        }
        return paths;
    };

    for (mmt::Modality modality : ctx.cfg.modalities) {
        mmt::Corpus c = load_stage_corpus(ctx.out / subcorpus_file(modality), mmt::CorpusStage::raw);
        std::vector<std::string> ids, texts;
        for (const auto& m : c.messages) {
            ids.push_back(m.message_id);
            texts.push_back(m.clean_text);
        }
        if (modality == mmt::Modality::text) {
            auto embedder = make_text_embedder(ctx.cfg, mmt::EmbedSpace::text_only);
            mmt::EmbeddingMatrix m = mmt::embed_texts(*embedder, texts, ids, &cache);
            mmt::save_matrix(m, vectors, "text");
            stats["text"] = {{"rows", m.rows}, {"skipped", 0}};
        } else if (modality == mmt::Modality::image) {
            auto embedder = make_image_embedder(ctx.cfg);
            std::vector<mmt::SkipRecord> skips;
            mmt::EmbeddingMatrix m = mmt::embed_images(*embedder, ids, image_paths(c), &skips, &cache);
            if (m.rows == 0) std::cerr << "embed: warning: no decodable images for the image model\n";
            mmt::save_matrix(m, vectors, "image");
            auto captioner = make_captioner(ctx.cfg);
            mmt::CaptionBatch captions = mmt::caption_images(*captioner, ids, image_paths(c));
            json cj = json::object();
            for (std::size_t i = 0; i < ids.size(); ++i) cj[ids[i]] = captions.captions[i];
            write_json_file(json{{"captions", cj}}, ctx.out / "captions_image.json");
            stats["image"] = {{"rows", m.rows}, {"skipped", skips.size()},
                              {"caption_failures", captions.skips.size()}};
        } else {
            auto text_embedder = make_text_embedder(ctx.cfg, mmt::EmbedSpace::joint_text_image);
            auto img_embedder = make_image_embedder(ctx.cfg);
            mmt::EmbeddingMatrix tm = mmt::embed_texts(*text_embedder, texts, ids, &cache);
            std::vector<mmt::SkipRecord> skips;
            mmt::EmbeddingMatrix im = mmt::embed_images(*img_embedder, ids, image_paths(c), &skips, &cache);
            mmt::EmbeddingMatrix fused = mmt::fuse_multimodal(mmt::subset_rows(tm, im.ids), im);
            mmt::save_matrix(fused, vectors, "multimodal");
            stats["multimodal"] = {{"rows", fused.rows}, {"skipped", skips.size()}};
        }
    }
    write_json_file(stats, ctx.out / "embed_stats.json");
    std::string inputs;
    for (mmt::Modality m : ctx.cfg.modalities)
        inputs += mmt::file_fingerprint(ctx.out / subcorpus_file(m));
    manifest.record("embed", mmt::content_fingerprint(inputs), ctx.cfg_hash);
    std::cout << "embed: vectors written to " << vectors.string() << "\n";
}

void cmd_fit(const PipelineContext& ctx) {
    mmt::StageLock lock(ctx.out);
    mmt::RunManifest manifest(ctx.out);
    manifest.require_stage("embed", ctx.cfg_hash);
    std::string inputs;
    for (mmt::Modality modality : ctx.cfg.modalities) {
        std::string name = mmt::to_string(modality);
        mmt::Corpus c = load_stage_corpus(ctx.out / subcorpus_file(modality), mmt::CorpusStage::raw);
        std::string store_name = modality == mmt::Modality::text
                                     ? "text"
                                     : (modality == mmt::Modality::image ? "image" : "multimodal");
        mmt::EmbeddingMatrix m = mmt::load_matrix(ctx.out / "vectors", store_name);
        // The matrix may cover a subset of the corpus (undecodable images);
        // fit on the slice in matrix order.
        std::map<std::string, const mmt::Message*> by_id;
        for (const auto& msg : c.messages) by_id[msg.message_id] = &msg;
        mmt::Corpus slice;
        slice.period_label = c.period_label;
        slice.stage = c.stage;
        for (const std::string& id : m.ids) {
            auto it = by_id.find(id);
            if (it == by_id.end()) throw mmt::DataError("fit: vector id " + id + " not in corpus");
            slice.messages.push_back(*it->second);
        }
        std::vector<std::string> captions;
        const std::vector<std::string>* captions_ptr = nullptr;
        if (modality == mmt::Modality::image) {
            json cj = mmt::detail::read_json_file(ctx.out / "captions_image.json");
            for (const std::string& id : m.ids)
                captions.push_back(cj["captions"].value(id, ""));
            captions_ptr = &captions;
        }
        mmt::TopicModelResult result =
            mmt::fit_topic_model(slice, m, captions_ptr, modality, ctx.cfg.topic_model);
        write_json_file(mmt::to_json(result), ctx.out / ("model_" + name + ".json"));
        std::cout << "fit " << name << ": " << result.topics.size() << " topics, outlier ratio "
                  << (result.n_documents ? mmt::outlier_ratio(result) : 0.0) << "\n";
        inputs += mmt::file_fingerprint(ctx.out / "vectors" / (store_name + ".f32"));
    }
    manifest.record("fit", mmt::content_fingerprint(inputs), ctx.cfg_hash);
}

void cmd_annotate(const PipelineContext& ctx) {
    mmt::StageLock lock(ctx.out);
    mmt::RunManifest manifest(ctx.out);
    manifest.require_stage("fit", ctx.cfg_hash);
    std::string inputs;
    std::unique_ptr<mmt::LlmClient> client;
    mmt::LlmPromptConfig prompt_cfg;
    if (ctx.cfg.llm_backend != "none") {
        client = make_llm_client(ctx.cfg);
        prompt_cfg.template_text = ctx.cfg.prompt_template_path.empty()
                                       ? kDefaultPromptTemplate
                                       : mmt::load_prompt_template(ctx.cfg.prompt_template_path);
    }
    for (mmt::Modality modality : ctx.cfg.modalities) {
        std::string name = mmt::to_string(modality);
        fs::path model_path = ctx.out / ("model_" + name + ".json");
        mmt::TopicModelResult r = mmt::topic_result_from_json(mmt::detail::read_json_file(model_path));
        mmt::Corpus c = load_stage_corpus(ctx.out / subcorpus_file(modality), mmt::CorpusStage::raw);
        mmt::make_review_sheet(r, c, (ctx.out / ("review_" + name + ".csv")).string());
        if (client) {
            mmt::LlmAnnotateResult res = mmt::llm_annotate(r, c, *client, prompt_cfg);
            json aj;
            aj["annotations"] = json::array();
            for (const auto& a : res.annotations) {
                json e;
                e["topic_id"] = a.topic_id;
                e["modality"] = mmt::to_string(a.modality);
                e["name"] = a.name;
                e["topic_type"] = mmt::to_string(a.topic_type);
                if (a.image_type) e["image_type"] = mmt::to_string(*a.image_type);
                else e["image_type"] = nullptr;
                e["group"] = a.group;
                e["source"] = "llm";
                e["validation_flag"] = a.validation_flag;
                aj["annotations"].push_back(std::move(e));
            }
            aj["failures"] = json::array();
            for (const auto& f : res.failures)
                aj["failures"].push_back({{"topic_id", f.topic_id}, {"error", f.error}});
            aj["flagged"] = res.flagged;
            write_json_file(aj, ctx.out / ("annotations_" + name + ".json"));
        }
        inputs += mmt::file_fingerprint(model_path);
    }
    manifest.record("annotate", mmt::content_fingerprint(inputs), ctx.cfg_hash);
    std::cout << "annotate: review sheets" << (client ? " and LLM annotations" : "") << " written\n";
}

void cmd_align(const PipelineContext& ctx) {
    mmt::StageLock lock(ctx.out);
    mmt::RunManifest manifest(ctx.out);
    manifest.require_stage("fit", ctx.cfg_hash);
    fs::path align_dir = ctx.out / "align";
    fs::create_directories(align_dir);
    std::map<std::string, mmt::AssignmentTable> tables;
    std::string inputs;
    for (mmt::Modality modality : ctx.cfg.modalities) {
        std::string name = mmt::to_string(modality);
        fs::path model_path = ctx.out / ("model_" + name + ".json");
        mmt::TopicModelResult r = mmt::topic_result_from_json(mmt::detail::read_json_file(model_path));
        tables[name] = mmt::AssignmentTable::from_result(r);
        inputs += mmt::file_fingerprint(model_path);
    }
    json alignment = json::array();
    json symmetry = json::array();
    for (const auto& [src, ta] : tables) {
        for (const auto& [dst, tb] : tables) {
            if (src == dst) continue;
            mmt::AlignmentReport rep = mmt::align_pair(ta, tb);
            alignment.push_back(mmt::to_json(rep));
            symmetry.push_back({{"source_modality", src},
                                {"target_modality", dst},
                                {"symmetry_ratio", rep.symmetry},
                                {"computed_over", rep.computed_over}});
        }
    }
    write_json_file(alignment, align_dir / "alignment.json");
    write_json_file(symmetry, align_dir / "symmetry.json");

    mmt::GroupMap gm;
    if (!ctx.cfg.group_map_path.empty()) gm = mmt::GroupMap::from_csv(ctx.cfg.group_map_path);
    mmt::GroupDocSets sets = mmt::group_doc_sets(tables, gm);

    json intersections = json::array();
    for (const auto& [group, per_modality] : sets) {
        auto get = [&](const char* m) {
            auto it = per_modality.find(m);
            return it == per_modality.end() ? std::set<std::string>{} : it->second;
        };
        intersections.push_back(
            mmt::to_json(mmt::three_way_intersections(get("text"), get("image"), get("multimodal"), group)));
    }
    write_json_file(intersections, align_dir / "intersections.json");

    json rankings = json::object();
    for (const auto& [modality, entries] : mmt::group_ranking(sets)) {
        json list = json::array();
        for (const auto& e : entries)
            list.push_back({{"group", e.group}, {"count", e.count}, {"proportion", e.proportion}});
        rankings[modality] = std::move(list);
    }
    for (const auto& [name, table] : tables)
        if (!rankings.contains(name)) rankings[name] = json::array();
    write_json_file(rankings, align_dir / "rankings.json");

    mmt::Corpus base = load_stage_corpus(ctx.out / "corpus_base.jsonl", mmt::CorpusStage::base_dedup);
    mmt::TimeSeries ts = mmt::time_series(sets, base);
    mmt::time_series_to_csv(ts, (align_dir / "time_series.csv").string());
    manifest.record("align", mmt::content_fingerprint(inputs), ctx.cfg_hash);
    std::cout << "align: reports written to " << align_dir.string() << "\n";
}

void cmd_report(const PipelineContext& ctx, const std::string& compare_dir) {
    mmt::StageLock lock(ctx.out);
    mmt::RunManifest manifest(ctx.out);
    manifest.require_stage("align", ctx.cfg_hash);
    manifest.require_stage("annotate", ctx.cfg_hash);
    json report = mmt::build_report(ctx.out);
    fs::path report_dir = ctx.out / "report";
    write_json_file(report, report_dir / "report.json");
    mmt::write_report_csvs(report, report_dir);
    fs::copy_file(ctx.out / "align" / "time_series.csv", report_dir / "time_series.csv",
                  fs::copy_options::overwrite_existing);
    if (!compare_dir.empty()) {
        json other = mmt::build_report(fs::path(compare_dir));
        write_json_file(mmt::compare_reports(report, other), report_dir / "comparison.json");
    }
    manifest.record("report", mmt::file_fingerprint(report_dir / "report.json"), ctx.cfg_hash);
    std::cout << "report: " << (report_dir / "report.json").string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multimodal topic modeling pipeline"};
    app.require_subcommand(1);

    std::string config_path, out_override, modality = "all", compare_dir;
    long long seed_override = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run config file (JSON or TOML)");
        sub->add_option("--out", out_override, "run directory (overrides config out_dir)");
        sub->add_option("--modality", modality, "text|image|multimodal|all");
        sub->add_option("--seed", seed_override, "seed override");
    };

    for (const char* name : {"ingest", "dedup", "embed", "fit", "annotate", "align"})
        add_common(app.add_subcommand(name));
    auto* report_cmd = app.add_subcommand("report");
    add_common(report_cmd);
    report_cmd->add_option("--compare", compare_dir, "second run directory to juxtapose");

    auto* synth_cmd = app.add_subcommand("synth", "generate a ground-truth synthetic corpus");
    std::string synth_out, synth_period = "synth", synth_start = "2023-10-01", weights_csv;
    mmt::SynthConfig scfg;
    long long synth_seed = 1;
    synth_cmd->add_option("--out", synth_out, "output directory")->required();
    synth_cmd->add_option("--topics", scfg.n_topics);
    synth_cmd->add_option("--docs-per-topic", scfg.docs_per_topic);
    synth_cmd->add_option("--outlier-fraction", scfg.outlier_fraction);
    synth_cmd->add_option("--dimension", scfg.dimension);
    synth_cmd->add_option("--signal-text", scfg.signal_text);
    synth_cmd->add_option("--signal-image", scfg.signal_image);
    synth_cmd->add_option("--agreement", scfg.text_image_agreement);
    synth_cmd->add_option("--refinement", scfg.image_refinement);
    synth_cmd->add_option("--seed", synth_seed);
    synth_cmd->add_option("--period", synth_period);
    synth_cmd->add_option("--start-day", synth_start);
    synth_cmd->add_option("--weights", weights_csv, "comma-separated per-topic size weights");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(mmt::ExitCode::usage);
    }

    try {
        if (synth_cmd->parsed()) {
            scfg.seed = static_cast<std::uint64_t>(synth_seed);
            scfg.period_label = synth_period;
            scfg.start_day = synth_start;
            if (!weights_csv.empty()) {
                scfg.topic_size_weights.clear();
                std::istringstream ss(weights_csv);
                std::string item;
                while (std::getline(ss, item, ',')) scfg.topic_size_weights.push_back(std::stod(item));
            }
            mmt::SynthBundle bundle = mmt::generate(scfg);
            mmt::write_corpus_files(bundle, synth_out);
            json truth;
            truth["text_topic"] = bundle.truth.text_topic;
            truth["image_topic"] = bundle.truth.image_topic;
            write_json_file(truth, fs::path(synth_out) / "truth.json");
            std::cout << "synth: " << bundle.corpus.size() << " messages in " << synth_out << "\n";
            return 0;
        }
        PipelineContext ctx;
        ctx.cfg = load_run_config(config_path, out_override, modality, seed_override);
        ctx.out = ctx.cfg.out_dir;
        ctx.cfg_hash = mmt::config_hash(ctx.cfg);
        if (app.get_subcommand("ingest")->parsed()) cmd_ingest(ctx);
        else if (app.get_subcommand("dedup")->parsed()) cmd_dedup(ctx);
        else if (app.get_subcommand("embed")->parsed()) cmd_embed(ctx);
        else if (app.get_subcommand("fit")->parsed()) cmd_fit(ctx);
        else if (app.get_subcommand("annotate")->parsed()) cmd_annotate(ctx);
        else if (app.get_subcommand("align")->parsed()) cmd_align(ctx);
        else if (report_cmd->parsed()) cmd_report(ctx, compare_dir);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mmt::exit_code_for(e);
    }
}
