#ifndef MMT_REDUCE_HPP
#define MMT_REDUCE_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmt/embedding.hpp"
#include "mmt/errors.hpp"

namespace mmt {

/// Dense double matrix for reduced coordinates.
struct LowDimMatrix {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<double> data;

    double at(std::size_t r, std::size_t c) const { return data[r * dim + c]; }
};

class Reducer {
public:
    virtual ~Reducer() = default;
    virtual std::string name() const = 0;
    virtual LowDimMatrix reduce(const EmbeddingMatrix& m, int n_components,
                                std::uint64_t seed) const = 0;
};

/// Exact PCA projection. Deterministic for a given input (the seed is
/// unused); eigenvector signs are canonicalized so runs are reproducible
/// across Eigen versions.
class PcaReducer final : public Reducer {
public:
    std::string name() const override { return "pca"; }

    LowDimMatrix reduce(const EmbeddingMatrix& m, int n_components, std::uint64_t) const override {
        if (n_components < 1) throw DataError("pca: n_components must be >= 1");
        if (static_cast<std::size_t>(n_components) >= m.dim)
            throw DataError("pca: n_components (" + std::to_string(n_components) +
                            ") must be smaller than the input dimension (" + std::to_string(m.dim) +
                            ")");
        if (m.rows < static_cast<std::size_t>(n_components))
            throw DataError("pca: need at least n_components=" + std::to_string(n_components) +
                            " rows, got " + std::to_string(m.rows) +
                            "; reduce n_components or supply more documents");
        Eigen::MatrixXd x(m.rows, m.dim);
        for (std::size_t i = 0; i < m.rows; ++i)
            for (std::size_t j = 0; j < m.dim; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.data[i * m.dim + j];
        Eigen::RowVectorXd mean = x.colwise().mean();
        x.rowwise() -= mean;
        Eigen::MatrixXd cov = (x.adjoint() * x) / std::max<double>(1.0, static_cast<double>(m.rows - 1));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        if (es.info() != Eigen::Success) throw DataError("pca: eigendecomposition failed");
        // Eigenvalues come back ascending; take the top n_components.
        Eigen::MatrixXd basis(m.dim, n_components);
        for (int k = 0; k < n_components; ++k) {
            Eigen::VectorXd v = es.eigenvectors().col(static_cast<Eigen::Index>(m.dim) - 1 - k);
            // Sign convention: largest-magnitude coefficient positive.
            Eigen::Index imax;
            v.cwiseAbs().maxCoeff(&imax);
            if (v(imax) < 0) v = -v;
            basis.col(k) = v;
        }
        Eigen::MatrixXd y = x * basis;
        LowDimMatrix out;
        out.rows = m.rows;
        out.dim = static_cast<std::size_t>(n_components);
        out.data.resize(out.rows * out.dim);
        for (std::size_t i = 0; i < out.rows; ++i)
            for (std::size_t j = 0; j < out.dim; ++j)
                out.data[i * out.dim + j] = y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        return out;
    }
};

/// Identity "reduction" (copies the embedding into double precision).
class IdentityReducer final : public Reducer {
public:
    std::string name() const override { return "none"; }
    LowDimMatrix reduce(const EmbeddingMatrix& m, int, std::uint64_t) const override {
        LowDimMatrix out;
        out.rows = m.rows;
        out.dim = m.dim;
        out.data.assign(m.data.begin(), m.data.end());
        return out;
    }
};

/// Registry so an external UMAP (or other) backend can be plugged in
/// without touching call sites. Nothing beyond pca/none ships in-repo.
class ReducerRegistry {
public:
    using Factory = std::function<std::unique_ptr<Reducer>()>;

    static ReducerRegistry& instance() {
        static ReducerRegistry reg;
        return reg;
    }

    void register_backend(const std::string& name, Factory f) { factories_[name] = std::move(f); }

    std::unique_ptr<Reducer> make(const std::string& name) const {
        if (name == "pca") return std::make_unique<PcaReducer>();
        if (name == "none") return std::make_unique<IdentityReducer>();
        auto it = factories_.find(name);
        if (it != factories_.end()) return it->second();
        throw BackendError("reducer '" + name +
                           "' is not available: no backend registered. Built-in reducers are "
                           "'pca' and 'none'; register an external backend via "
                           "ReducerRegistry::register_backend or switch the config to pca.");
    }

private:
    std::map<std::string, Factory> factories_;
};

inline std::unique_ptr<Reducer> make_reducer(const std::string& name) {
    return ReducerRegistry::instance().make(name);
}

}  // namespace mmt

#endif
