#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gdm/types.hpp"

namespace gdm {

/// One document as parallel arrays of word indices (strictly increasing) and counts.
struct DocumentView {
    std::span<const std::uint32_t> words;
    std::span<const std::uint32_t> counts;
};

/// Bag-of-words corpus in compressed sparse row form.
///
/// Every stored count is at least one, word indices within a row are strictly
/// increasing and below vocab_size(), and every document has at least one token.
/// Indices are 0-based; the 1-based UCI convention stays inside the loader.
class Corpus {
  public:
    Corpus() = default;

    /// Validates all invariants; throws ValidationError on violation.
    Corpus(std::size_t vocab_size, std::vector<std::size_t> row_ptr,
           std::vector<std::uint32_t> words, std::vector<std::uint32_t> counts,
           std::vector<std::string> vocab = {});

    /// Builds a corpus from dense count rows; zero entries are dropped.
    static Corpus from_dense(const std::vector<std::vector<std::uint32_t>>& rows,
                             std::vector<std::string> vocab = {});

    std::size_t num_docs() const { return lengths_.size(); }
    std::size_t vocab_size() const { return vocab_size_; }
    std::size_t nnz() const { return words_.size(); }
    std::uint64_t length(std::size_t doc) const { return lengths_[doc]; }
    std::uint64_t total_tokens() const;
    const std::vector<std::uint64_t>& lengths() const { return lengths_; }
    const std::vector<std::string>& vocab() const { return vocab_; }

    DocumentView doc(std::size_t m) const;
    /// Count of word `word` in document `m` (0 when absent).
    std::uint32_t count(std::size_t m, std::size_t word) const;

    /// Dense copy of one row.
    std::vector<std::uint32_t> dense_row(std::size_t m) const;

    /// Documents `docs` in the given order; vocabulary shared.
    Corpus subset(std::span<const std::size_t> docs) const;

    bool operator==(const Corpus& other) const = default;

  private:
    std::size_t vocab_size_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> words_;
    std::vector<std::uint32_t> counts_;
    std::vector<std::uint64_t> lengths_;
    std::vector<std::string> vocab_;
};

/// Row-normalized corpus: row m is w_m / N_m, and weight m is N_m.
///
/// Weights are real so the clustering code can be exercised with arbitrary
/// positive weights; for corpora they are the document lengths.
class NormalizedCorpus {
  public:
    NormalizedCorpus() = default;

    /// Dense rows (each on the probability simplex within 1e-12) with positive weights.
    static NormalizedCorpus from_dense(const Matrix& rows, std::vector<double> weights);

    std::size_t num_docs() const { return weights_.size(); }
    std::size_t vocab_size() const { return vocab_size_; }
    std::span<const std::uint32_t> words(std::size_t m) const {
        return {words_.data() + row_ptr_[m], words_.data() + row_ptr_[m + 1]};
    }
    std::span<const double> values(std::size_t m) const {
        return {values_.data() + row_ptr_[m], values_.data() + row_ptr_[m + 1]};
    }
    double weight(std::size_t m) const { return weights_[m]; }
    const std::vector<double>& weights() const { return weights_; }
    /// Squared Euclidean norm of row m.
    double sq_norm(std::size_t m) const { return sq_norms_[m]; }

    /// <row m, v> for a dense V-vector.
    double dot(std::size_t m, const double* dense) const;
    /// Exact ||row m - row n||^2 by sparse merge.
    double sq_distance(std::size_t m, std::size_t n) const;
    /// ||row m - dense||^2; `dense_sq_norm` is ||dense||^2. Clamped at zero.
    double sq_distance(std::size_t m, const double* dense, double dense_sq_norm) const;

    Vector dense_row(std::size_t m) const;
    Matrix to_dense() const;

    /// Rows in the given order.
    NormalizedCorpus permuted(std::span<const std::size_t> order) const;

    /// Number of distinct rows (exact comparison).
    std::size_t count_distinct_rows() const;
    /// Exact row equality.
    bool rows_equal(std::size_t m, std::size_t n) const;

  private:
    friend NormalizedCorpus normalize(const Corpus& corpus);

    std::size_t vocab_size_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> words_;
    std::vector<double> values_;
    std::vector<double> weights_;
    std::vector<double> sq_norms_;
};

/// Parses the UCI bag-of-words format: three header lines (D, W, NNZ) followed by
/// NNZ lines "docID wordID count" with 1-based indices. Duplicate (doc, word) pairs
/// are summed and documents with no tokens are dropped (reported through
/// `dropped_docs` and a log warning).
Corpus load_uci_bag_of_words(std::istream& docword, std::istream* vocab = nullptr,
                             std::size_t* dropped_docs = nullptr);
Corpus load_uci_bag_of_words_file(const std::string& docword_path,
                                  const std::optional<std::string>& vocab_path = std::nullopt);

/// Writes the corpus in UCI format, triples ordered by (doc, word).
void write_uci_bag_of_words(const Corpus& corpus, std::ostream& out);
/// One word per line; placeholder names w0, w1, ... when the corpus has no vocabulary.
void write_vocab(const Corpus& corpus, std::ostream& out);

NormalizedCorpus normalize(const Corpus& corpus);

/// Random disjoint split into (train, heldout) with `n_holdout` heldout documents.
/// Both parts keep the original document order.
std::pair<Corpus, Corpus> split_holdout(const Corpus& corpus, std::size_t n_holdout,
                                        std::uint64_t seed);

/// The heldout document indices chosen by split_holdout, ascending.
std::vector<std::size_t> holdout_indices(std::size_t num_docs, std::size_t n_holdout,
                                         std::uint64_t seed);

}  // namespace gdm
