#include "gdm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gdm/error.hpp"
#include "gdm/parallel.hpp"

namespace gdm {

namespace {

constexpr std::uint64_t kTopicStream = 1ULL << 40;
constexpr std::uint64_t kDocStream = 1ULL << 41;
constexpr std::uint64_t kAliasThreshold = 256;

bool is_simplex_row(const Matrix& m, Eigen::Index r, double tol) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
        if (!(m(r, i) >= 0.0)) return false;
        sum += m(r, i);
    }
    return std::abs(sum - 1.0) <= tol;
}

// Vose alias method.
class AliasTable {
  public:
    explicit AliasTable(std::span<const double> probs) : prob_(probs.size()), alias_(probs.size()) {
        const std::size_t n = probs.size();
        double total = std::accumulate(probs.begin(), probs.end(), 0.0);
        std::vector<double> scaled(n);
        std::vector<std::size_t> small, large;
        for (std::size_t i = 0; i < n; ++i) {
            scaled[i] = probs[i] * static_cast<double>(n) / total;
            (scaled[i] < 1.0 ? small : large).push_back(i);
        }
        while (!small.empty() && !large.empty()) {
            std::size_t s = small.back(), l = large.back();
            small.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (std::size_t i : large) prob_[i] = 1.0, alias_[i] = i;
        for (std::size_t i : small) prob_[i] = 1.0, alias_[i] = i;
    }

    std::size_t draw(Rng& rng) const {
        std::size_t column = rng.uniform_index(prob_.size());
        return rng.uniform() < prob_[column] ? column : alias_[column];
    }

  private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

std::uint64_t draw_length(const LdaParams& params, std::size_t m, Rng& rng) {
    return std::visit(
        [&](const auto& spec) -> std::uint64_t {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, ConstantLength>) {
                return spec.tokens;
            } else if constexpr (std::is_same_v<T, LengthList>) {
                return spec.tokens[m];
            } else {
                return spec.min + rng.uniform_index(spec.max - spec.min + 1);
            }
        },
        params.doc_lengths);
}

}  // namespace

void LdaParams::validate() const {
    if (K < 1) throw ArgumentError("LDA parameters: K must be at least 1");
    if (V < 2) throw ArgumentError("LDA parameters: V must be at least 2");
    if (M < 1) throw ArgumentError("LDA parameters: M must be at least 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("LDA parameters: alpha must be positive");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw ArgumentError("LDA parameters: eta must be positive");
    std::visit(
        [&](const auto& spec) {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, ConstantLength>) {
                if (spec.tokens < 1) throw ArgumentError("LDA parameters: document length must be >= 1");
            } else if constexpr (std::is_same_v<T, LengthList>) {
                if (spec.tokens.size() != M)
                    throw ArgumentError("LDA parameters: need one length per document");
                for (auto n : spec.tokens)
                    if (n < 1) throw ArgumentError("LDA parameters: document length must be >= 1");
            } else {
                if (spec.min < 1 || spec.max < spec.min)
                    throw ArgumentError("LDA parameters: length range must satisfy 1 <= min <= max");
            }
        },
        doc_lengths);
}

Vector sample_dirichlet(std::size_t dim, double concentration, Rng& rng) {
    if (dim < 1) throw ArgumentError("sample_dirichlet: dim must be at least 1");
    if (!(concentration > 0.0) || !std::isfinite(concentration))
        throw ArgumentError("sample_dirichlet: concentration must be positive");
    Vector out(static_cast<Eigen::Index>(dim));
    if (dim == 1) {
        out[0] = 1.0;
        return out;
    }
    for (std::size_t i = 0; i < dim; ++i) out[static_cast<Eigen::Index>(i)] = rng.log_gamma_draw(concentration);
    const double top = out.maxCoeff();
    out = (out.array() - top).exp();
    out /= out.sum();
    // Keep every coordinate strictly positive even when exp underflows.
    constexpr double kTiny = std::numeric_limits<double>::min();
    bool floored = false;
    for (auto& v : out) {
        if (v < kTiny) {
            v = kTiny;
            floored = true;
        }
    }
    if (floored) out /= out.sum();
    return out;
}

std::vector<std::uint32_t> sample_multinomial(std::span<const double> probs, std::uint64_t n,
                                              Rng& rng) {
    std::vector<std::uint32_t> counts(probs.size(), 0);
    if (n > kAliasThreshold) {
        AliasTable table(probs);
        for (std::uint64_t t = 0; t < n; ++t) ++counts[table.draw(rng)];
    } else {
        for (std::uint64_t t = 0; t < n; ++t) ++counts[sample_proportional(probs, rng)];
    }
    return counts;
}

std::pair<Corpus, GroundTruth> generate_corpus(const LdaParams& params,
                                               const GenerationOverrides& overrides) {
    params.validate();
    const auto K = static_cast<Eigen::Index>(params.K);
    const auto V = static_cast<Eigen::Index>(params.V);
    const auto M = static_cast<Eigen::Index>(params.M);
    const Rng root(params.seed);

    GroundTruth truth;
    truth.params = params;
    if (overrides.beta) {
        if (overrides.beta->rows() != K || overrides.beta->cols() != V)
            throw ArgumentError("generate_corpus: injected beta must be K x V");
        for (Eigen::Index k = 0; k < K; ++k)
            if (!is_simplex_row(*overrides.beta, k, 1e-12))
                throw ArgumentError("generate_corpus: injected beta rows must lie on the simplex");
        truth.beta = *overrides.beta;
    } else {
        truth.beta.resize(K, V);
        for (Eigen::Index k = 0; k < K; ++k) {
            Rng rng = root.substream(kTopicStream + static_cast<std::uint64_t>(k));
            truth.beta.row(k) = sample_dirichlet(params.V, params.eta, rng).transpose();
        }
    }
    if (overrides.theta) {
        if (overrides.theta->rows() != M || overrides.theta->cols() != K)
            throw ArgumentError("generate_corpus: injected theta must be M x K");
        for (Eigen::Index m = 0; m < M; ++m)
            if (!is_simplex_row(*overrides.theta, m, 1e-12))
                throw ArgumentError("generate_corpus: injected theta rows must lie on the simplex");
    }

    truth.theta.resize(M, K);
    truth.p.resize(M, V);
    std::vector<std::vector<std::uint32_t>> rows(params.M);
    parallel_for(params.M, [&](std::size_t m) {
        const auto mi = static_cast<Eigen::Index>(m);
        Rng rng = root.substream(kDocStream + m);
        Vector theta = overrides.theta ? Vector(overrides.theta->row(mi).transpose())
                                       : sample_dirichlet(params.K, params.alpha, rng);
        Vector p = truth.beta.transpose() * theta;
        // p is a convex combination of simplex rows; clean the last ulp so it is a distribution.
        p = p.cwiseMax(0.0);
        p /= p.sum();
        truth.theta.row(mi) = theta.transpose();
        truth.p.row(mi) = p.transpose();
        const std::uint64_t n = draw_length(params, m, rng);
        rows[m] = sample_multinomial({p.data(), static_cast<std::size_t>(p.size())}, n, rng);
    });
    return {Corpus::from_dense(rows), std::move(truth)};
}

}  // namespace gdm
