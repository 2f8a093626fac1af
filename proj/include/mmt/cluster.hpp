#ifndef MMT_CLUSTER_HPP
#define MMT_CLUSTER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "mmt/errors.hpp"
#include "mmt/reduce.hpp"

namespace mmt {

class Clusterer {
public:
    virtual ~Clusterer() = default;
    virtual std::string name() const = 0;
    /// Per-row labels; -1 marks outliers. Every label != -1 must have at
    /// least min_cluster_size members.
    virtual std::vector<int> cluster(const LowDimMatrix& points, int min_cluster_size) const = 0;
};

namespace detail {

inline double sqdist(const LowDimMatrix& m, std::size_t a, std::size_t b) {
    const double* pa = m.data.data() + a * m.dim;
    const double* pb = m.data.data() + b * m.dim;
    double s = 0;
    for (std::size_t k = 0; k < m.dim; ++k) {
        double d = pa[k] - pb[k];
        s += d * d;
    }
    return s;
}

struct MstEdge {
    int a, b;
    double w;
};

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
};

/// Relabels cluster ids to contiguous 0..T-1 in size-descending order;
/// ties broken by first member position. -1 passes through.
inline int relabel_by_size(std::vector<int>& labels) {
    std::map<int, std::pair<std::size_t, std::size_t>> info;  // id -> (count, first index)
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) continue;
        auto it = info.find(labels[i]);
        if (it == info.end()) info[labels[i]] = {1, i};
        else ++it->second.first;
    }
    std::vector<std::pair<int, std::pair<std::size_t, std::size_t>>> order(info.begin(), info.end());
    std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
        if (x.second.first != y.second.first) return x.second.first > y.second.first;
        return x.second.second < y.second.second;
    });
    std::map<int, int> remap;
    for (std::size_t i = 0; i < order.size(); ++i) remap[order[i].first] = static_cast<int>(i);
    for (int& l : labels)
        if (l >= 0) l = remap[l];
    return static_cast<int>(order.size());
}

}  // namespace detail

/// Density clustering with outliers: mutual-reachability MST, single
/// linkage, condensed tree at min_cluster_size, excess-of-mass cluster
/// selection. Matches the standard formulation with
/// min_samples = min_cluster_size and no single-root cluster.
class HdbscanClusterer final : public Clusterer {
public:
    explicit HdbscanClusterer(int min_samples = 0) : min_samples_(min_samples) {}

    std::string name() const override { return "hdbscan"; }

    std::vector<int> cluster(const LowDimMatrix& points, int mcs) const override {
        if (mcs < 2) throw DataError("hdbscan: min_cluster_size must be >= 2");
        const std::size_t n = points.rows;
        std::vector<int> labels(n, -1);
        if (n == 0) return labels;
        if (n < static_cast<std::size_t>(mcs)) return labels;

        // All-identical input degenerates to a single cluster.
        bool all_same = true;
        for (std::size_t j = 1; j < n && all_same; ++j)
            if (detail::sqdist(points, 0, j) > 0) all_same = false;
        if (all_same) {
            std::fill(labels.begin(), labels.end(), 0);
            return labels;
        }

        const int k = std::min<int>(min_samples_ > 0 ? min_samples_ : mcs, static_cast<int>(n) - 1);

        // Core distances: distance to the k-th nearest other point.
        std::vector<double> core(n);
        {
            std::vector<double> row(n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) row[j] = detail::sqdist(points, i, j);
                row[i] = std::numeric_limits<double>::infinity();  // exclude self
                std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
                core[i] = std::sqrt(row[k - 1]);
            }
        }

        // Prim MST under mutual reachability d_mr = max(core_i, core_j, d_ij).
        std::vector<detail::MstEdge> edges = mst_mutual_reachability(points, core);

        std::sort(edges.begin(), edges.end(), [](const detail::MstEdge& x, const detail::MstEdge& y) {
            if (x.w != y.w) return x.w < y.w;
            if (x.a != y.a) return x.a < y.a;
            return x.b < y.b;
        });

        // Single-linkage dendrogram via union-find.
        const int total_nodes = static_cast<int>(2 * n - 1);
        std::vector<int> left(total_nodes, -1), right(total_nodes, -1), size(total_nodes, 1);
        std::vector<double> merge_dist(total_nodes, 0.0);
        {
            detail::UnionFind uf(total_nodes);
            std::vector<int> current(total_nodes);
            std::iota(current.begin(), current.end(), 0);
            int next = static_cast<int>(n);
            for (const auto& e : edges) {
                int ra = current[uf.find(e.a)];
                int rb = current[uf.find(e.b)];
                left[next] = ra;
                right[next] = rb;
                merge_dist[next] = e.w;
                size[next] = size[ra] + size[rb];
                int root_a = uf.find(e.a), root_b = uf.find(e.b);
                uf.parent[root_a] = root_b;
                current[uf.find(root_b)] = next;
                ++next;
            }
        }
        const int root = total_nodes - 1;

        // Condensed tree. Cluster 0 is the (unselectable) root.
        std::vector<double> birth{0.0}, stability{0.0};
        std::vector<int> parent_cluster{-1};
        std::vector<std::vector<int>> children{{}};
        std::vector<int> point_cluster(n, 0);
        auto lambda_of = [](double d) { return 1.0 / std::max(d, 1e-12); };
        auto collect_points = [&](int node, auto&& sink) {
            std::vector<int> stack{node};
            while (!stack.empty()) {
                int cur = stack.back();
                stack.pop_back();
                if (cur < static_cast<int>(n)) {
                    sink(cur);
                } else {
                    stack.push_back(left[cur]);
                    stack.push_back(right[cur]);
                }
            }
        };
        std::vector<std::pair<int, int>> work{{root, 0}};  // (sl node, condensed cluster)
        while (!work.empty()) {
            const int node = work.back().first;
            const int c = work.back().second;
            work.pop_back();
            const double lam = lambda_of(merge_dist[node]);
            int l = left[node], r = right[node];
            int sl = size[l], sr = size[r];
            auto fallout = [&](int subtree) {
                collect_points(subtree, [&](int p) {
                    point_cluster[p] = c;
                    stability[c] += lam - birth[c];
                });
            };
            if (sl >= mcs && sr >= mcs) {
                stability[c] += (lam - birth[c]) * (sl + sr);
                for (int child_node : {l, r}) {
                    int cid = static_cast<int>(birth.size());
                    birth.push_back(lam);
                    stability.push_back(0.0);
                    parent_cluster.push_back(c);
                    children.emplace_back();
                    children[static_cast<std::size_t>(c)].push_back(cid);
                    work.emplace_back(child_node, cid);
                }
            } else if (sl >= mcs) {
                fallout(r);
                work.emplace_back(l, c);
            } else if (sr >= mcs) {
                fallout(l);
                work.emplace_back(r, c);
            } else {
                fallout(l);
                fallout(r);
            }
        }

        // Excess-of-mass selection, bottom-up (clusters were created in
        // topological order). The root is never selectable.
        const int n_clusters = static_cast<int>(birth.size());
        std::vector<bool> selected(n_clusters, false);
        std::vector<double> subtree(n_clusters, 0.0);
        for (int c = n_clusters - 1; c >= 1; --c) {
            const auto& ch = children[static_cast<std::size_t>(c)];
            if (ch.empty()) {
                selected[c] = true;
                subtree[c] = stability[c];
                continue;
            }
            double csum = 0;
            for (int child : ch) csum += subtree[child];
            if (stability[c] >= csum) {
                selected[c] = true;
                subtree[c] = stability[c];
                // Deselect everything below.
                std::vector<int> stack(ch.begin(), ch.end());
                while (!stack.empty()) {
                    int d = stack.back();
                    stack.pop_back();
                    selected[d] = false;
                    for (int dd : children[static_cast<std::size_t>(d)]) stack.push_back(dd);
                }
            } else {
                subtree[c] = csum;
            }
        }

        for (std::size_t p = 0; p < n; ++p) {
            int c = point_cluster[p];
            while (c != -1 && !selected[c]) c = parent_cluster[static_cast<std::size_t>(c)];
            labels[p] = c;  // -1 if no selected ancestor
        }
        detail::relabel_by_size(labels);
        return labels;
    }

private:
    int min_samples_;

    static std::vector<detail::MstEdge> mst_mutual_reachability(const LowDimMatrix& points,
                                                                const std::vector<double>& core) {
        const std::size_t n = points.rows;
        std::vector<bool> in_tree(n, false);
        std::vector<double> best(n, std::numeric_limits<double>::infinity());
        std::vector<int> best_from(n, 0);
        std::vector<detail::MstEdge> edges;
        edges.reserve(n - 1);
        int cur = 0;
        in_tree[0] = true;
        for (std::size_t step = 1; step < n; ++step) {
            for (std::size_t j = 0; j < n; ++j) {
                if (in_tree[j]) continue;
                double d = std::sqrt(detail::sqdist(points, static_cast<std::size_t>(cur), j));
                double mr = std::max({core[static_cast<std::size_t>(cur)], core[j], d});
                if (mr < best[j]) {
                    best[j] = mr;
                    best_from[j] = cur;
                }
            }
            double w = std::numeric_limits<double>::infinity();
            int pick = -1;
            for (std::size_t j = 0; j < n; ++j) {
                if (!in_tree[j] && best[j] < w) {
                    w = best[j];
                    pick = static_cast<int>(j);
                }
            }
            in_tree[static_cast<std::size_t>(pick)] = true;
            edges.push_back({best_from[static_cast<std::size_t>(pick)], pick, w});
            cur = pick;
        }
        return edges;
    }
};

/// Deterministic fallback: single-linkage components at a fixed distance
/// threshold; components below min_cluster_size become outliers. eps <= 0
/// picks 3x the median nearest-neighbor distance.
class ThresholdLinkageClusterer final : public Clusterer {
public:
    explicit ThresholdLinkageClusterer(double eps = 0.0) : eps_(eps) {}

    std::string name() const override { return "reference"; }

    std::vector<int> cluster(const LowDimMatrix& points, int mcs) const override {
        if (mcs < 2) throw DataError("reference clusterer: min_cluster_size must be >= 2");
        const std::size_t n = points.rows;
        std::vector<int> labels(n, -1);
        if (n == 0) return labels;
        if (n < static_cast<std::size_t>(mcs)) return labels;
        double eps = eps_;
        if (eps <= 0) {
            std::vector<double> nn(n, std::numeric_limits<double>::infinity());
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    double d = detail::sqdist(points, i, j);
                    nn[i] = std::min(nn[i], d);
                    nn[j] = std::min(nn[j], d);
                }
            std::vector<double> sorted(nn);
            std::sort(sorted.begin(), sorted.end());
            eps = 3.0 * std::sqrt(sorted[n / 2]);
        }
        detail::UnionFind uf(static_cast<int>(n));
        double eps2 = eps * eps;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (detail::sqdist(points, i, j) <= eps2)
                    uf.parent[uf.find(static_cast<int>(i))] = uf.find(static_cast<int>(j));
        std::map<int, int> comp_size;
        for (std::size_t i = 0; i < n; ++i) ++comp_size[uf.find(static_cast<int>(i))];
        for (std::size_t i = 0; i < n; ++i) {
            int rootc = uf.find(static_cast<int>(i));
            labels[i] = comp_size[rootc] >= mcs ? rootc : -1;
        }
        detail::relabel_by_size(labels);
        return labels;
    }

private:
    double eps_;
};

inline std::unique_ptr<Clusterer> make_clusterer(const std::string& name, double reference_eps = 0.0,
                                                 int min_samples = 0) {
    if (name == "hdbscan") return std::make_unique<HdbscanClusterer>(min_samples);
    if (name == "reference") return std::make_unique<ThresholdLinkageClusterer>(reference_eps);
    throw BackendError("clusterer '" + name + "' is unknown; built-ins are 'hdbscan' and 'reference'");
}

}  // namespace mmt

#endif
