#ifndef MMT_VECTOR_STORE_HPP
#define MMT_VECTOR_STORE_HPP

#include <bit>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "mmt/embedding.hpp"
#include "mmt/errors.hpp"

namespace mmt {

// Vector store layout: <name>.f32 holds raw little-endian float32 rows,
// <name>.meta.json holds {ids, dimension, embedder_name, normalized}.
// Language-neutral and bit-exact.

static_assert(std::endian::native == std::endian::little,
              "vector store assumes a little-endian host");

inline void save_matrix(const EmbeddingMatrix& m, const std::filesystem::path& dir,
                        const std::string& name) {
    std::filesystem::create_directories(dir);
    nlohmann::json meta;
    meta["ids"] = m.ids;
    meta["dimension"] = m.dim;
    meta["embedder_name"] = m.embedder_name;
    meta["normalized"] = m.normalized;
    {
        std::ofstream out(dir / (name + ".meta.json"), std::ios::trunc);
        if (!out) throw DataError("vector store: cannot write meta for " + name);
        out << meta.dump(2) << "\n";
    }
    std::ofstream bin(dir / (name + ".f32"), std::ios::binary | std::ios::trunc);
    if (!bin) throw DataError("vector store: cannot write " + name + ".f32");
    bin.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size() * sizeof(float)));
    if (!bin) throw DataError("vector store: write failed for " + name + ".f32");
}

inline EmbeddingMatrix load_matrix(const std::filesystem::path& dir, const std::string& name) {
    std::ifstream metain(dir / (name + ".meta.json"));
    if (!metain) throw DataError("vector store: missing " + name + ".meta.json");
    nlohmann::json meta = nlohmann::json::parse(metain, nullptr, false);
    if (meta.is_discarded()) throw DataError("vector store: corrupt meta for " + name);
    EmbeddingMatrix m;
    try {
        m.ids = meta.at("ids").get<std::vector<std::string>>();
        m.dim = meta.at("dimension").get<std::size_t>();
        m.embedder_name = meta.at("embedder_name").get<std::string>();
        m.normalized = meta.at("normalized").get<bool>();
    } catch (const std::exception& e) {
        throw DataError("vector store: bad meta for " + name + ": " + e.what());
    }
    m.rows = m.ids.size();
    auto binpath = dir / (name + ".f32");
    std::error_code ec;
    auto fsize = std::filesystem::file_size(binpath, ec);
    if (ec) throw DataError("vector store: missing " + name + ".f32");
    if (fsize != m.rows * m.dim * sizeof(float))
        throw DataError("vector store: integrity error for " + name + ": payload is " +
                        std::to_string(fsize) + " bytes, metadata implies " +
                        std::to_string(m.rows * m.dim * sizeof(float)));
    m.data.resize(m.rows * m.dim);
    std::ifstream bin(binpath, std::ios::binary);
    if (!bin.read(reinterpret_cast<char*>(m.data.data()), static_cast<std::streamsize>(fsize)))
        throw DataError("vector store: short read on " + name + ".f32");
    m.check_invariants();
    return m;
}

}  // namespace mmt

#endif
