#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "mmt/config.hpp"
#include "test_util.hpp"

using mmt::test::TempDir;
using mmt::test::read_file;
using mmt::test::write_file;
using nlohmann::json;

namespace {

std::string cli_path() {
    const char* p = std::getenv("MMT_CLI");
    REQUIRE(p != nullptr);
    return p;
}

int run_cli(const std::string& args) {
    std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

json base_config(const std::filesystem::path& corpus, const std::filesystem::path& out) {
    json cfg;
    cfg["corpus"] = corpus.string();
    cfg["period_label"] = "p1";
    cfg["out_dir"] = out.string();
    cfg["topic_model"] = {{"min_topic_size", 10}, {"n_components", 5}, {"seed", 5}};
    cfg["embedder"] = {{"dimension", 32}};
    cfg["llm"] = {{"backend", "echo"}};
    return cfg;
}

void run_pipeline(const std::string& config_path) {
    for (const char* stage : {"ingest", "dedup", "embed", "fit", "annotate", "align", "report"}) {
        INFO("stage " << stage);
        REQUIRE(run_cli(std::string(stage) + " --config " + config_path) == 0);
    }
}

}  // namespace

TEST_CASE("cli: full pipeline on a synthetic corpus") {
    TempDir dir("cli_full");
    auto synth = dir.path / "synth";
    REQUIRE(run_cli("synth --out " + synth.string() +
                    " --topics 3 --docs-per-topic 30 --dimension 32 --seed 4") == 0);
    REQUIRE(std::filesystem::exists(synth / "corpus.jsonl"));
    REQUIRE(std::filesystem::exists(synth / "truth.json"));

    auto out = dir.path / "run";
    json cfg = base_config(synth / "corpus.jsonl", out);
    write_file(dir.path / "cfg.json", cfg.dump(2));
    run_pipeline((dir.path / "cfg.json").string());

    json report = json::parse(read_file(out / "report" / "report.json"));
    CHECK(report["models"]["text"]["topics"] == 3);
    CHECK(report["models"]["image"]["topics"] == 3);
    CHECK(report["models"]["multimodal"]["topics"] == 3);
    CHECK(report["models"]["text"]["documents"] == 90);
    // echo annotator labels everything content
    CHECK(report["type_distributions"]["text"]["topic_type"]["content"] == 1.0);
    // self-consistent symmetry entries exist for all 6 ordered pairs
    CHECK(report["symmetry"].size() == 6);
    for (const auto& e : report["symmetry"]) {
        CHECK(e["symmetry_ratio"].get<double>() >= 0.0);
        CHECK(e["symmetry_ratio"].get<double>() <= 1.0);
    }
    CHECK(std::filesystem::exists(out / "report" / "time_series.csv"));
    CHECK(std::filesystem::exists(out / "review_text.csv"));
    // manifest carries one entry per completed stage
    json manifest = json::parse(read_file(out / "manifest.json"));
    CHECK(manifest["entries"].size() == 7);
}

TEST_CASE("cli: stage dependency errors") {
    TempDir dir("cli_dep");
    auto synth = dir.path / "synth";
    REQUIRE(run_cli("synth --out " + synth.string() +
                    " --topics 2 --docs-per-topic 12 --dimension 16 --seed 4") == 0);
    json cfg = base_config(synth / "corpus.jsonl", dir.path / "run");
    write_file(dir.path / "cfg.json", cfg.dump(2));
    // fit before embed: data error, exit code 2
    CHECK(run_cli("fit --config " + (dir.path / "cfg.json").string()) == 2);
    // config change between stages invalidates artifacts
    REQUIRE(run_cli("ingest --config " + (dir.path / "cfg.json").string()) == 0);
    cfg["topic_model"]["min_topic_size"] = 12;
    write_file(dir.path / "cfg2.json", cfg.dump(2));
    CHECK(run_cli("dedup --config " + (dir.path / "cfg2.json").string()) == 2);
}

TEST_CASE("cli: usage errors exit with code 1") {
    CHECK(run_cli("definitely-not-a-subcommand") == 1);
    CHECK(run_cli("ingest") == 1);  // --config missing
}

TEST_CASE("cli: toml config is accepted") {
    TempDir dir("cli_toml");
    auto synth = dir.path / "synth";
    REQUIRE(run_cli("synth --out " + synth.string() +
                    " --topics 2 --docs-per-topic 12 --dimension 16 --seed 9") == 0);
    std::string toml =
        "corpus = \"" + (synth / "corpus.jsonl").string() + "\"\n"
        "period_label = \"p-toml\"\n"
        "out_dir = \"" + (dir.path / "run").string() + "\"\n"
        "\n"
        "[topic_model]\n"
        "min_topic_size = 10  # same defaults as the json config\n"
        "n_components = 5\n"
        "seed = 5\n"
        "\n"
        "[embedder]\n"
        "dimension = 32\n"
        "\n"
        "[llm]\n"
        "backend = \"echo\"\n";
    write_file(dir.path / "cfg.toml", toml);
    CHECK(run_cli("ingest --config " + (dir.path / "cfg.toml").string()) == 0);
    CHECK(std::filesystem::exists(dir.path / "run" / "corpus_paired.jsonl"));
    json info = json::parse(read_file(dir.path / "run" / "run_info.json"));
    CHECK(info["period_label"] == "p-toml");
}

TEST_CASE("config hash tracks semantic fields only") {
    json base;
    base["corpus"] = "/a/corpus.jsonl";
    base["out_dir"] = "/a/out";
    base["topic_model"] = {{"min_topic_size", 20}, {"seed", 5}};
    std::string h0 = mmt::config_hash(mmt::run_config_from_json(base));

    json moved = base;
    moved["corpus"] = "/elsewhere/corpus.jsonl";
    moved["out_dir"] = "/elsewhere/out";
    CHECK(mmt::config_hash(mmt::run_config_from_json(moved)) == h0);

    json reseeded = base;
    reseeded["topic_model"]["seed"] = 6;
    CHECK(mmt::config_hash(mmt::run_config_from_json(reseeded)) != h0);

    json redim = base;
    redim["embedder"] = {{"dimension", 128}};
    CHECK(mmt::config_hash(mmt::run_config_from_json(redim)) != h0);

    json relabeled = base;
    relabeled["period_label"] = "other-period";
    CHECK(mmt::config_hash(mmt::run_config_from_json(relabeled)) != h0);
}

TEST_CASE("cli: unavailable backends exit with code 3") {
    TempDir dir("cli_backend");
    auto synth = dir.path / "synth";
    REQUIRE(run_cli("synth --out " + synth.string() +
                    " --topics 2 --docs-per-topic 12 --dimension 16 --seed 4") == 0);
    json cfg = base_config(synth / "corpus.jsonl", dir.path / "run");
    cfg["embedder"]["text_backend"] = "sentence-transformer";  // not built in
    write_file(dir.path / "cfg.json", cfg.dump(2));
    REQUIRE(run_cli("ingest --config " + (dir.path / "cfg.json").string()) == 0);
    REQUIRE(run_cli("dedup --config " + (dir.path / "cfg.json").string()) == 0);
    CHECK(run_cli("embed --config " + (dir.path / "cfg.json").string()) == 3);
}

TEST_CASE("cli: a stale lock file blocks the stage") {
    TempDir dir("cli_lock");
    auto synth = dir.path / "synth";
    REQUIRE(run_cli("synth --out " + synth.string() +
                    " --topics 2 --docs-per-topic 12 --dimension 16 --seed 4") == 0);
    json cfg = base_config(synth / "corpus.jsonl", dir.path / "run");
    write_file(dir.path / "cfg.json", cfg.dump(2));
    write_file(dir.path / "run" / ".mmt.lock", "locked");
    CHECK(run_cli("ingest --config " + (dir.path / "cfg.json").string()) == 2);
    std::filesystem::remove(dir.path / "run" / ".mmt.lock");
    CHECK(run_cli("ingest --config " + (dir.path / "cfg.json").string()) == 0);
}

TEST_CASE("toml subset parser") {
    json j = mmt::parse_toml_subset("a = 1\nb = \"x\"\nc = true\nd = 1.5\narr = [1, 2, 3]\n[t]\nk = 2\n[t.u]\nv = \"deep\"\n");
    CHECK(j["a"] == 1);
    CHECK(j["b"] == "x");
    CHECK(j["c"] == true);
    CHECK(j["d"] == 1.5);
    CHECK(j["arr"] == json::array({1, 2, 3}));
    CHECK(j["t"]["k"] == 2);
    CHECK(j["t"]["u"]["v"] == "deep");
    CHECK_THROWS_AS(mmt::parse_toml_subset("a = {inline = 1}\n"), mmt::UsageError);
    CHECK_THROWS_AS(mmt::parse_toml_subset("just garbage\n"), mmt::UsageError);
}

TEST_CASE("cli: reruns with identical config produce byte-identical reports") {
    TempDir dir("cli_det");
    auto synth = dir.path / "synth";
    REQUIRE(run_cli("synth --out " + synth.string() +
                    " --topics 3 --docs-per-topic 25 --dimension 32 --seed 21") == 0);
    json cfg = base_config(synth / "corpus.jsonl", dir.path / "runA");
    write_file(dir.path / "cfg.json", cfg.dump(2));
    run_pipeline((dir.path / "cfg.json").string());
    for (const char* stage : {"ingest", "dedup", "embed", "fit", "annotate", "align", "report"}) {
        REQUIRE(run_cli(std::string(stage) + " --config " + (dir.path / "cfg.json").string() +
                        " --out " + (dir.path / "runB").string()) == 0);
    }
    CHECK(read_file(dir.path / "runA" / "report" / "report.json") ==
          read_file(dir.path / "runB" / "report" / "report.json"));
    for (const char* f : {"model_summary.csv", "type_distribution.csv", "symmetry.csv",
                          "group_rankings.csv", "time_series.csv"}) {
        CHECK(read_file(dir.path / "runA" / "report" / f) ==
              read_file(dir.path / "runB" / "report" / f));
    }
}
