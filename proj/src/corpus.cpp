#include "gdm/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string_view>
#include <tuple>

#include <spdlog/spdlog.h>

#include "gdm/error.hpp"
#include "gdm/rng.hpp"

namespace gdm {

Corpus::Corpus(std::size_t vocab_size, std::vector<std::size_t> row_ptr,
               std::vector<std::uint32_t> words, std::vector<std::uint32_t> counts,
               std::vector<std::string> vocab)
    : vocab_size_(vocab_size),
      row_ptr_(std::move(row_ptr)),
      words_(std::move(words)),
      counts_(std::move(counts)),
      vocab_(std::move(vocab)) {
    if (row_ptr_.empty() || row_ptr_.front() != 0 || row_ptr_.back() != words_.size())
        throw ValidationError("corpus: malformed row pointer array");
    if (words_.size() != counts_.size())
        throw ValidationError("corpus: word and count arrays differ in length");
    if (!vocab_.empty() && vocab_.size() != vocab_size_)
        throw ValidationError("corpus: vocabulary has " + std::to_string(vocab_.size()) +
                              " entries, expected " + std::to_string(vocab_size_));
    const std::size_t docs = row_ptr_.size() - 1;
    lengths_.assign(docs, 0);
    for (std::size_t m = 0; m < docs; ++m) {
        if (row_ptr_[m + 1] < row_ptr_[m]) throw ValidationError("corpus: decreasing row pointer");
        for (std::size_t j = row_ptr_[m]; j < row_ptr_[m + 1]; ++j) {
            if (words_[j] >= vocab_size_)
                throw ValidationError("corpus: word index " + std::to_string(words_[j]) +
                                      " out of range in document " + std::to_string(m));
            if (j > row_ptr_[m] && words_[j] <= words_[j - 1])
                throw ValidationError("corpus: word indices not strictly increasing in document " +
                                      std::to_string(m));
            if (counts_[j] == 0)
                throw ValidationError("corpus: stored zero count in document " + std::to_string(m));
            lengths_[m] += counts_[j];
        }
        if (lengths_[m] == 0)
            throw ValidationError("corpus: document " + std::to_string(m) + " is empty");
    }
}

Corpus Corpus::from_dense(const std::vector<std::vector<std::uint32_t>>& rows,
                          std::vector<std::string> vocab) {
    std::size_t vocab_size = rows.empty() ? vocab.size() : rows.front().size();
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> words, counts;
    for (const auto& row : rows) {
        if (row.size() != vocab_size) throw ValidationError("from_dense: ragged rows");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] == 0) continue;
            words.push_back(static_cast<std::uint32_t>(i));
            counts.push_back(row[i]);
        }
        row_ptr.push_back(words.size());
    }
    return Corpus(vocab_size, std::move(row_ptr), std::move(words), std::move(counts),
                  std::move(vocab));
}

std::uint64_t Corpus::total_tokens() const {
    return std::accumulate(lengths_.begin(), lengths_.end(), std::uint64_t{0});
}

DocumentView Corpus::doc(std::size_t m) const {
    const std::size_t b = row_ptr_[m], e = row_ptr_[m + 1];
    return {{words_.data() + b, e - b}, {counts_.data() + b, e - b}};
}

std::uint32_t Corpus::count(std::size_t m, std::size_t word) const {
    auto d = doc(m);
    auto it = std::lower_bound(d.words.begin(), d.words.end(), word);
    if (it == d.words.end() || *it != word) return 0;
    return d.counts[static_cast<std::size_t>(it - d.words.begin())];
}

std::vector<std::uint32_t> Corpus::dense_row(std::size_t m) const {
    std::vector<std::uint32_t> out(vocab_size_, 0);
    auto d = doc(m);
    for (std::size_t j = 0; j < d.words.size(); ++j) out[d.words[j]] = d.counts[j];
    return out;
}

Corpus Corpus::subset(std::span<const std::size_t> docs) const {
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> words, counts;
    for (std::size_t m : docs) {
        if (m >= num_docs()) throw ArgumentError("subset: document index out of range");
        auto d = doc(m);
        words.insert(words.end(), d.words.begin(), d.words.end());
        counts.insert(counts.end(), d.counts.begin(), d.counts.end());
        row_ptr.push_back(words.size());
    }
    return Corpus(vocab_size_, std::move(row_ptr), std::move(words), std::move(counts), vocab_);
}

// ---------------------------------------------------------------------------

NormalizedCorpus NormalizedCorpus::from_dense(const Matrix& rows, std::vector<double> weights) {
    if (static_cast<std::size_t>(rows.rows()) != weights.size())
        throw ArgumentError("from_dense: one weight per row required");
    NormalizedCorpus out;
    out.vocab_size_ = static_cast<std::size_t>(rows.cols());
    for (Eigen::Index m = 0; m < rows.rows(); ++m) {
        if (!(weights[m] > 0.0) || !std::isfinite(weights[m]))
            throw ArgumentError("from_dense: weights must be positive");
        double sum = 0.0, sq = 0.0;
        for (Eigen::Index i = 0; i < rows.cols(); ++i) {
            double v = rows(m, i);
            if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("from_dense: entry outside [0,1]");
            sum += v;
            if (v == 0.0) continue;
            out.words_.push_back(static_cast<std::uint32_t>(i));
            out.values_.push_back(v);
            sq += v * v;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("from_dense: row does not sum to 1");
        out.row_ptr_.push_back(out.words_.size());
        out.sq_norms_.push_back(sq);
    }
    out.weights_ = std::move(weights);
    return out;
}

double NormalizedCorpus::dot(std::size_t m, const double* dense) const {
    double acc = 0.0;
    for (std::size_t j = row_ptr_[m]; j < row_ptr_[m + 1]; ++j) acc += values_[j] * dense[words_[j]];
    return acc;
}

double NormalizedCorpus::sq_distance(std::size_t m, std::size_t n) const {
    std::size_t a = row_ptr_[m], ae = row_ptr_[m + 1];
    std::size_t b = row_ptr_[n], be = row_ptr_[n + 1];
    double acc = 0.0;
    while (a < ae || b < be) {
        double d;
        if (b == be || (a < ae && words_[a] < words_[b])) {
            d = values_[a++];
        } else if (a == ae || words_[b] < words_[a]) {
            d = values_[b++];
        } else {
            d = values_[a++] - values_[b++];
        }
        acc += d * d;
    }
    return acc;
}

double NormalizedCorpus::sq_distance(std::size_t m, const double* dense,
                                     double dense_sq_norm) const {
    return std::max(0.0, sq_norms_[m] - 2.0 * dot(m, dense) + dense_sq_norm);
}

Vector NormalizedCorpus::dense_row(std::size_t m) const {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(vocab_size_));
    for (std::size_t j = row_ptr_[m]; j < row_ptr_[m + 1]; ++j) out[words_[j]] = values_[j];
    return out;
}

Matrix NormalizedCorpus::to_dense() const {
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(num_docs()),
                              static_cast<Eigen::Index>(vocab_size_));
    for (std::size_t m = 0; m < num_docs(); ++m)
        for (std::size_t j = row_ptr_[m]; j < row_ptr_[m + 1]; ++j)
            out(static_cast<Eigen::Index>(m), words_[j]) = values_[j];
    return out;
}

NormalizedCorpus NormalizedCorpus::permuted(std::span<const std::size_t> order) const {
    NormalizedCorpus out;
    out.vocab_size_ = vocab_size_;
    out.words_.reserve(words_.size());
    out.values_.reserve(values_.size());
    for (std::size_t m : order) {
        out.words_.insert(out.words_.end(), words_.begin() + row_ptr_[m],
                          words_.begin() + row_ptr_[m + 1]);
        out.values_.insert(out.values_.end(), values_.begin() + row_ptr_[m],
                           values_.begin() + row_ptr_[m + 1]);
        out.row_ptr_.push_back(out.words_.size());
        out.weights_.push_back(weights_[m]);
        out.sq_norms_.push_back(sq_norms_[m]);
    }
    return out;
}

bool NormalizedCorpus::rows_equal(std::size_t m, std::size_t n) const {
    return std::equal(words_.begin() + row_ptr_[m], words_.begin() + row_ptr_[m + 1],
                      words_.begin() + row_ptr_[n], words_.begin() + row_ptr_[n + 1]) &&
           std::equal(values_.begin() + row_ptr_[m], values_.begin() + row_ptr_[m + 1],
                      values_.begin() + row_ptr_[n], values_.begin() + row_ptr_[n + 1]);
}

std::size_t NormalizedCorpus::count_distinct_rows() const {
    std::vector<std::size_t> order(num_docs());
    std::iota(order.begin(), order.end(), 0);
    auto key_less = [&](std::size_t a, std::size_t b) {
        auto wa = words(a), wb = words(b);
        auto va = values(a), vb = values(b);
        std::size_t n = std::min(wa.size(), wb.size());
        for (std::size_t j = 0; j < n; ++j) {
            if (wa[j] != wb[j]) return wa[j] < wb[j];
            if (va[j] != vb[j]) return va[j] < vb[j];
        }
        return wa.size() < wb.size();
    };
    std::sort(order.begin(), order.end(), key_less);
    std::size_t distinct = order.empty() ? 0 : 1;
    for (std::size_t i = 1; i < order.size(); ++i)
        if (!rows_equal(order[i - 1], order[i])) ++distinct;
    return distinct;
}

NormalizedCorpus normalize(const Corpus& corpus) {
    NormalizedCorpus out;
    out.vocab_size_ = corpus.vocab_size();
    out.words_.reserve(corpus.nnz());
    out.values_.reserve(corpus.nnz());
    for (std::size_t m = 0; m < corpus.num_docs(); ++m) {
        auto d = corpus.doc(m);
        const double n = static_cast<double>(corpus.length(m));
        double sq = 0.0;
        for (std::size_t j = 0; j < d.words.size(); ++j) {
            double v = static_cast<double>(d.counts[j]) / n;
            out.words_.push_back(d.words[j]);
            out.values_.push_back(v);
            sq += v * v;
        }
        out.row_ptr_.push_back(out.words_.size());
        out.weights_.push_back(n);
        out.sq_norms_.push_back(sq);
    }
    return out;
}

// ---------------------------------------------------------------------------
// UCI bag-of-words I/O

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::uint64_t parse_uint(std::string_view token, std::size_t line, const char* what) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw ParseError(line, std::string("expected nonnegative integer ") + what + ", got '" +
                                   std::string(token) + "'");
    return value;
}

}  // namespace

Corpus load_uci_bag_of_words(std::istream& docword, std::istream* vocab_stream,
                             std::size_t* dropped_docs) {
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t header[3];
    const char* header_names[3] = {"D", "W", "NNZ"};
    for (int h = 0; h < 3; ++h) {
        if (!std::getline(docword, line))
            throw ParseError(line_no + 1, std::string("missing header line ") + header_names[h]);
        ++line_no;
        header[h] = parse_uint(trim(line), line_no, header_names[h]);
    }
    const std::uint64_t num_docs = header[0], vocab_size = header[1], nnz = header[2];

    struct Triple {
        std::uint32_t doc, word, count;
    };
    std::vector<Triple> triples;
    triples.reserve(nnz);
    std::uint64_t seen = 0;
    while (std::getline(docword, line)) {
        ++line_no;
        std::string_view rest = trim(line);
        if (rest.empty()) continue;
        std::uint64_t fields[3];
        for (int f = 0; f < 3; ++f) {
            rest = trim(rest);
            std::size_t end = 0;
            while (end < rest.size() && !std::isspace(static_cast<unsigned char>(rest[end]))) ++end;
            if (end == 0) throw ParseError(line_no, "expected triple 'docID wordID count'");
            fields[f] = parse_uint(rest.substr(0, end), line_no, "in triple");
            rest.remove_prefix(end);
        }
        if (!trim(rest).empty()) throw ParseError(line_no, "trailing fields after triple");
        ++seen;
        if (fields[0] < 1 || fields[0] > num_docs)
            throw ValidationError("line " + std::to_string(line_no) + ": document index " +
                                  std::to_string(fields[0]) + " outside [1, " +
                                  std::to_string(num_docs) + "]");
        if (fields[1] < 1 || fields[1] > vocab_size)
            throw ValidationError("line " + std::to_string(line_no) + ": word index " +
                                  std::to_string(fields[1]) + " outside [1, " +
                                  std::to_string(vocab_size) + "]");
        if (fields[2] > std::numeric_limits<std::uint32_t>::max())
            throw ValidationError("line " + std::to_string(line_no) + ": count too large");
        if (fields[2] == 0) continue;
        triples.push_back({static_cast<std::uint32_t>(fields[0] - 1),
                           static_cast<std::uint32_t>(fields[1] - 1),
                           static_cast<std::uint32_t>(fields[2])});
    }
    if (seen != nnz)
        throw ValidationError("header declares " + std::to_string(nnz) + " nonzeros, found " +
                              std::to_string(seen));

    std::sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) {
        return std::tie(a.doc, a.word) < std::tie(b.doc, b.word);
    });

    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> words, counts;
    std::size_t t = 0, dropped = 0;
    for (std::uint32_t d = 0; d < num_docs; ++d) {
        const std::size_t start = words.size();
        while (t < triples.size() && triples[t].doc == d) {
            if (words.size() > start && words.back() == triples[t].word) {
                counts.back() += triples[t].count;
            } else {
                words.push_back(triples[t].word);
                counts.push_back(triples[t].count);
            }
            ++t;
        }
        if (words.size() == start) {
            ++dropped;
            continue;
        }
        row_ptr.push_back(words.size());
    }
    if (dropped > 0) spdlog::warn("dropped {} empty document(s) while loading corpus", dropped);
    if (dropped_docs) *dropped_docs = dropped;

    std::vector<std::string> vocab;
    if (vocab_stream) {
        while (std::getline(*vocab_stream, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            vocab.push_back(line);
        }
        while (vocab.size() > vocab_size && vocab.back().empty()) vocab.pop_back();
        if (vocab.size() != vocab_size)
            throw ValidationError("vocabulary has " + std::to_string(vocab.size()) +
                                  " lines, header declares W=" + std::to_string(vocab_size));
    }
    return Corpus(vocab_size, std::move(row_ptr), std::move(words), std::move(counts),
                  std::move(vocab));
}

Corpus load_uci_bag_of_words_file(const std::string& docword_path,
                                  const std::optional<std::string>& vocab_path) {
    std::ifstream docword(docword_path);
    if (!docword) throw std::runtime_error("cannot open " + docword_path);
    if (!vocab_path) return load_uci_bag_of_words(docword);
    std::ifstream vocab(*vocab_path);
    if (!vocab) throw std::runtime_error("cannot open " + *vocab_path);
    return load_uci_bag_of_words(docword, &vocab);
}

void write_uci_bag_of_words(const Corpus& corpus, std::ostream& out) {
    out << corpus.num_docs() << '\n' << corpus.vocab_size() << '\n' << corpus.nnz() << '\n';
    for (std::size_t m = 0; m < corpus.num_docs(); ++m) {
        auto d = corpus.doc(m);
        for (std::size_t j = 0; j < d.words.size(); ++j)
            out << (m + 1) << ' ' << (d.words[j] + 1) << ' ' << d.counts[j] << '\n';
    }
}

void write_vocab(const Corpus& corpus, std::ostream& out) {
    if (!corpus.vocab().empty()) {
        for (const auto& w : corpus.vocab()) out << w << '\n';
        return;
    }
    for (std::size_t i = 0; i < corpus.vocab_size(); ++i) out << "w" << i << '\n';
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::uint64_t kSplitStream = 0x73706c6974ULL;
}

std::vector<std::size_t> holdout_indices(std::size_t num_docs, std::size_t n_holdout,
                                         std::uint64_t seed) {
    if (n_holdout == 0 || n_holdout >= num_docs)
        throw ArgumentError("split_holdout: need 0 < n_holdout < number of documents (" +
                            std::to_string(num_docs) + ")");
    std::vector<std::size_t> order(num_docs);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed, kSplitStream);
    shuffle(order, rng);
    order.resize(n_holdout);
    std::sort(order.begin(), order.end());
    return order;
}

std::pair<Corpus, Corpus> split_holdout(const Corpus& corpus, std::size_t n_holdout,
                                        std::uint64_t seed) {
    auto heldout = holdout_indices(corpus.num_docs(), n_holdout, seed);
    std::vector<std::size_t> train;
    train.reserve(corpus.num_docs() - heldout.size());
    std::size_t h = 0;
    for (std::size_t m = 0; m < corpus.num_docs(); ++m) {
        if (h < heldout.size() && heldout[h] == m) {
            ++h;
            continue;
        }
        train.push_back(m);
    }
    return {corpus.subset(train), corpus.subset(heldout)};
}

}  // namespace gdm
