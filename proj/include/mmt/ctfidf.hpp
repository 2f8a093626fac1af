#ifndef MMT_CTFIDF_HPP
#define MMT_CTFIDF_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mmt/errors.hpp"
#include "mmt/text.hpp"

namespace mmt {

using KeywordList = std::vector<std::pair<std::string, double>>;

inline std::unordered_set<std::string> load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("stopwords: cannot open " + path);
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] != '#') words.insert(line);
    }
    return words;
}

/// Class-based TF-IDF over per-topic concatenated documents:
///   weight(t, c) = tf(t in c) * log(1 + A / f(t))
/// with A = mean token count per class and f(t) = total frequency of t
/// across classes. Returns the top_k (term, weight) pairs per class,
/// weight descending, ties broken lexicographically.
inline std::map<int, KeywordList> ctfidf(const std::map<int, std::string>& docs_by_topic, int top_k,
                                         const std::unordered_set<std::string>* stopwords = nullptr) {
    if (docs_by_topic.empty()) throw DataError("ctfidf: no classes");
    std::map<int, std::unordered_map<std::string, std::size_t>> tf;
    std::unordered_map<std::string, std::size_t> total_freq;
    std::size_t total_tokens = 0;
    for (const auto& [topic, doc] : docs_by_topic) {
        auto& counts = tf[topic];
        for (const std::string& tok : tokenize(doc, 2, stopwords)) {
            ++counts[tok];
            ++total_freq[tok];
            ++total_tokens;
        }
    }
    if (total_freq.empty())
        throw DataError("ctfidf: empty vocabulary after tokenization");
    const double mean_class_tokens =
        static_cast<double>(total_tokens) / static_cast<double>(docs_by_topic.size());
    std::map<int, KeywordList> out;
    for (const auto& [topic, counts] : tf) {
        KeywordList ranked;
        ranked.reserve(counts.size());
        for (const auto& [term, count] : counts) {
            double idf = std::log(1.0 + mean_class_tokens / static_cast<double>(total_freq[term]));
            ranked.emplace_back(term, static_cast<double>(count) * idf);
        }
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (top_k >= 0 && ranked.size() > static_cast<std::size_t>(top_k))
            ranked.resize(static_cast<std::size_t>(top_k));
        out[topic] = std::move(ranked);
    }
    return out;
}

}  // namespace mmt

#endif
