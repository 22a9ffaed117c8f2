#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "gdm/corpus.hpp"
#include "gdm/rng.hpp"
#include "gdm/types.hpp"

namespace gdm {

struct ConstantLength {
    std::uint64_t tokens = 1;
};
struct LengthList {
    std::vector<std::uint64_t> tokens;
};
/// Lengths drawn uniformly from the closed range [min, max].
struct LengthRange {
    std::uint64_t min = 1;
    std::uint64_t max = 1;
};
using DocLengthSpec = std::variant<ConstantLength, LengthList, LengthRange>;

/// Parameters of the symmetric-Dirichlet LDA generative model.
struct LdaParams {
    std::size_t K = 1;
    std::size_t V = 2;
    std::size_t M = 1;
    DocLengthSpec doc_lengths = ConstantLength{1};
    double alpha = 0.1;
    double eta = 0.1;
    std::uint64_t seed = 0;

    /// Throws ArgumentError when any field is out of range.
    void validate() const;
};

/// The generating parameters: topics (K x V), proportions (M x K) and
/// document word distributions p = theta * beta (M x V).
struct GroundTruth {
    Matrix beta;
    Matrix theta;
    Matrix p;
    LdaParams params;
};

/// Test hook: pin beta and/or theta instead of drawing them.
struct GenerationOverrides {
    std::optional<Matrix> beta;
    std::optional<Matrix> theta;
};

/// Draw from the symmetric Dirichlet on the (dim-1)-simplex via normalized Gamma
/// draws, accumulated in log space so tiny concentrations do not underflow.
Vector sample_dirichlet(std::size_t dim, double concentration, Rng& rng);

/// Multinomial(probs, n) counts. Uses an alias table for n > 256, linear scan otherwise.
std::vector<std::uint32_t> sample_multinomial(std::span<const double> probs, std::uint64_t n,
                                              Rng& rng);

/// Samples a corpus from LDA. Each topic and each document draws from its own
/// substream of `params.seed`, so the output does not depend on the thread count.
std::pair<Corpus, GroundTruth> generate_corpus(const LdaParams& params,
                                               const GenerationOverrides& overrides = {});

}  // namespace gdm
