#ifndef MMT_TEST_ORACLES_HPP
#define MMT_TEST_ORACLES_HPP

// Test-only brute-force oracles, kept independent of the library's
// implementation paths they verify.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mmt/embedding.hpp"
#include "mmt/rng.hpp"

namespace mmt::oracle {

/// Independent c-TF-IDF: own tokenizer (ASCII lowercase words, len >= 2),
/// own counting, own weight = tf * ln(1 + mean_class_tokens / total_freq),
/// own (weight desc, term asc) sort.
inline std::vector<std::string> ascii_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        bool word = (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z');
        if (word) {
            cur += (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch + 32) : ch;
        } else {
            if (cur.size() >= 2) out.push_back(cur);
            cur.clear();
        }
    }
    if (cur.size() >= 2) out.push_back(cur);
    return out;
}

inline std::map<int, std::vector<std::pair<std::string, double>>> ctfidf_bruteforce(
    const std::map<int, std::string>& docs_by_class, int top_k) {
    std::map<int, std::map<std::string, int>> counts;
    std::map<std::string, int> global;
    long long total_tokens = 0;
    for (const auto& [cls, doc] : docs_by_class) {
        counts[cls];
        for (const auto& tok : ascii_tokens(doc)) {
            counts[cls][tok] += 1;
            global[tok] += 1;
            ++total_tokens;
        }
    }
    double mean_tokens = static_cast<double>(total_tokens) / static_cast<double>(docs_by_class.size());
    std::map<int, std::vector<std::pair<std::string, double>>> out;
    for (const auto& [cls, tf] : counts) {
        std::vector<std::pair<std::string, double>> ranked;
        for (const auto& [term, count] : tf)
            ranked.emplace_back(term, count * std::log(1.0 + mean_tokens / global[term]));
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (static_cast<int>(ranked.size()) > top_k) ranked.resize(static_cast<std::size_t>(top_k));
        out[cls] = std::move(ranked);
    }
    return out;
}

/// Independent representative selection: full sort over members by
/// (cosine to mean vector desc, id asc) computed with plain double loops.
inline std::vector<std::string> representatives_bruteforce(const EmbeddingMatrix& m,
                                                           const std::vector<std::size_t>& members,
                                                           std::size_t n) {
    std::vector<double> mean(m.dim, 0.0);
    for (std::size_t r : members)
        for (std::size_t j = 0; j < m.dim; ++j) mean[j] += m.data[r * m.dim + j];
    for (auto& v : mean) v /= static_cast<double>(members.size());
    double mean_norm = 0;
    for (double v : mean) mean_norm += v * v;
    mean_norm = std::sqrt(mean_norm);
    std::vector<std::pair<double, std::string>> scored;
    for (std::size_t r : members) {
        double d = 0, rn = 0;
        for (std::size_t j = 0; j < m.dim; ++j) {
            d += m.data[r * m.dim + j] * mean[j];
            rn += static_cast<double>(m.data[r * m.dim + j]) * m.data[r * m.dim + j];
        }
        double c = (mean_norm == 0 || rn == 0) ? 0.0 : d / (std::sqrt(rn) * mean_norm);
        scored.emplace_back(c, m.ids[r]);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < scored.size() && i < n; ++i) out.push_back(scored[i].second);
    return out;
}

/// Independent macro-F1 via an explicit confusion matrix.
inline double macro_f1_bruteforce(const std::vector<std::string>& gold,
                                  const std::vector<std::string>& pred) {
    std::set<std::string> labels(gold.begin(), gold.end());
    std::set<std::string> all(labels);
    all.insert(pred.begin(), pred.end());
    std::map<std::pair<std::string, std::string>, int> confusion;
    for (std::size_t i = 0; i < gold.size(); ++i) confusion[{gold[i], pred[i]}] += 1;
    double sum = 0;
    for (const auto& c : labels) {
        int tp = confusion.count({c, c}) ? confusion[{c, c}] : 0;
        int pred_c = 0, gold_c = 0;
        for (const auto& l : all) {
            pred_c += confusion.count({l, c}) ? confusion[{l, c}] : 0;
            gold_c += confusion.count({c, l}) ? confusion[{c, l}] : 0;
        }
        double prec = pred_c ? static_cast<double>(tp) / pred_c : 0;
        double rec = gold_c ? static_cast<double>(tp) / gold_c : 0;
        sum += (prec + rec) > 0 ? 2 * prec * rec / (prec + rec) : 0;
    }
    return sum / static_cast<double>(labels.size());
}

/// Membership classification per id: the 7 three-way regions by direct
/// per-element testing.
struct RegionCounts {
    std::size_t t = 0, i = 0, m = 0, ti = 0, tm = 0, im = 0, tim = 0;
};

inline RegionCounts regions_bruteforce(const std::set<std::string>& st,
                                       const std::set<std::string>& si,
                                       const std::set<std::string>& sm) {
    std::set<std::string> all;
    all.insert(st.begin(), st.end());
    all.insert(si.begin(), si.end());
    all.insert(sm.begin(), sm.end());
    RegionCounts rc;
    for (const auto& id : all) {
        int code = (st.count(id) ? 4 : 0) | (si.count(id) ? 2 : 0) | (sm.count(id) ? 1 : 0);
        switch (code) {
            case 4: ++rc.t; break;
            case 2: ++rc.i; break;
            case 1: ++rc.m; break;
            case 6: ++rc.ti; break;
            case 5: ++rc.tm; break;
            case 3: ++rc.im; break;
            case 7: ++rc.tim; break;
        }
    }
    return rc;
}

/// Gaussian blobs around given centers.
inline EmbeddingMatrix gaussian_blobs(const std::vector<std::vector<float>>& centers,
                                      std::size_t per_blob, double stddev, std::uint64_t seed,
                                      std::vector<int>* truth = nullptr) {
    Rng rng(seed);
    EmbeddingMatrix m;
    m.dim = centers[0].size();
    m.embedder_name = "blobs";
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (std::size_t i = 0; i < per_blob; ++i) {
            m.ids.push_back("b" + std::to_string(c) + "_" + std::to_string(i));
            for (std::size_t j = 0; j < m.dim; ++j)
                m.data.push_back(centers[c][j] + static_cast<float>(stddev * rng.gaussian()));
            if (truth) truth->push_back(static_cast<int>(c));
            ++m.rows;
        }
    }
    return m;
}

}  // namespace mmt::oracle

#endif
