#ifndef MMT_MANIFEST_HPP
#define MMT_MANIFEST_HPP

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmt/errors.hpp"
#include "mmt/hashutil.hpp"
#include "mmt/timeutil.hpp"

namespace mmt {

struct ManifestEntry {
    std::string stage;
    std::string inputs_hash;
    std::string config_hash;
    std::string timestamp;
};

/// Per-run stage ledger at <run_dir>/manifest.json. Each pipeline stage
/// records what it consumed and under which config; the next stage checks
/// both before trusting artifacts on disk.
class RunManifest {
public:
    explicit RunManifest(std::filesystem::path dir) : dir_(std::move(dir)) { load(); }

    void record(const std::string& stage, const std::string& inputs_hash,
                const std::string& config_hash) {
        // Re-running a stage supersedes its previous entry.
        entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                      [&](const ManifestEntry& e) { return e.stage == stage; }),
                       entries_.end());
        auto now = std::chrono::system_clock::now();
        std::int64_t epoch = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
        entries_.push_back({stage, inputs_hash, config_hash, format_iso8601(epoch)});
        save();
    }

    const ManifestEntry* find(const std::string& stage) const {
        for (const auto& e : entries_)
            if (e.stage == stage) return &e;
        return nullptr;
    }

    /// Stage-dependency gate: predecessor must have run, and under the same
    /// config we are about to use.
    void require_stage(const std::string& stage, const std::string& expected_config_hash) const {
        const ManifestEntry* e = find(stage);
        if (!e)
            throw DataError("stage dependency: '" + stage + "' has not run in " + dir_.string() +
                            "; run `mmt " + stage + "` first");
        if (e->config_hash != expected_config_hash)
            throw DataError("stale artifacts: stage '" + stage +
                            "' was produced under a different config (hash " + e->config_hash +
                            " vs current " + expected_config_hash + "); re-run the pipeline from '" +
                            stage + "'");
    }

    const std::vector<ManifestEntry>& entries() const { return entries_; }

private:
    std::filesystem::path dir_;
    std::vector<ManifestEntry> entries_;

    std::filesystem::path file() const { return dir_ / "manifest.json"; }

    void load() {
        std::ifstream in(file());
        if (!in) return;
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.contains("entries")) return;
        for (const auto& e : j["entries"])
            entries_.push_back({e.value("stage", ""), e.value("inputs_hash", ""),
                                e.value("config_hash", ""), e.value("timestamp", "")});
    }

    void save() const {
        std::filesystem::create_directories(dir_);
        nlohmann::json j;
        j["entries"] = nlohmann::json::array();
        for (const auto& e : entries_)
            j["entries"].push_back({{"stage", e.stage},
                                    {"inputs_hash", e.inputs_hash},
                                    {"config_hash", e.config_hash},
                                    {"timestamp", e.timestamp}});
        std::ofstream out(file(), std::ios::trunc);
        if (!out) throw DataError("manifest: cannot write " + file().string());
        out << j.dump(2) << "\n";
    }
};

/// One stage at a time per run directory.
class StageLock {
public:
    explicit StageLock(const std::filesystem::path& dir) : path_(dir / ".mmt.lock") {
        std::filesystem::create_directories(dir);
        if (std::filesystem::exists(path_))
            throw DataError("run directory is locked (" + path_.string() +
                            "); another stage is running or crashed — remove the lock file if stale");
        std::ofstream out(path_);
        out << "locked\n";
        held_ = true;
    }
    ~StageLock() {
        if (held_) {
            std::error_code ec;
            std::filesystem::remove(path_, ec);
        }
    }
    StageLock(const StageLock&) = delete;
    StageLock& operator=(const StageLock&) = delete;

private:
    std::filesystem::path path_;
    bool held_ = false;
};

inline std::string file_fingerprint(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("fingerprint: cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return content_fingerprint(ss.str());
}

}  // namespace mmt

#endif
