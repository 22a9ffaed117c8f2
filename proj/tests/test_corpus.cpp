#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "gdm/corpus.hpp"
#include "gdm/error.hpp"
#include "gdm/synth.hpp"

using namespace gdm;

namespace {
Corpus parse(const std::string& text) {
    std::istringstream in(text);
    return load_uci_bag_of_words(in);
}
}  // namespace

TEST_CASE("loads the UCI example") {
    Corpus c = parse("2\n3\n3\n1 1 2\n1 3 1\n2 2 4\n");
    CHECK(c.num_docs() == 2);
    CHECK(c.vocab_size() == 3);
    CHECK(c.dense_row(0) == std::vector<std::uint32_t>{2, 0, 1});
    CHECK(c.dense_row(1) == std::vector<std::uint32_t>{0, 4, 0});
    CHECK(c.length(0) == 3);
    CHECK(c.length(1) == 4);
}

TEST_CASE("duplicate pairs are summed") {
    Corpus c = parse("2\n3\n4\n1 1 2\n1 3 1\n2 2 4\n2 2 1\n");
    CHECK(c.dense_row(1) == std::vector<std::uint32_t>{0, 5, 0});
}

TEST_CASE("word index beyond V is a validation error") {
    CHECK_THROWS_AS(parse("1\n3\n1\n1 4 1\n"), ValidationError);
}

TEST_CASE("document index beyond D is a validation error") {
    CHECK_THROWS_AS(parse("1\n3\n1\n2 1 1\n"), ValidationError);
}

TEST_CASE("NNZ mismatch is a validation error") {
    CHECK_THROWS_AS(parse("1\n3\n2\n1 1 1\n"), ValidationError);
}

TEST_CASE("malformed lines report their line number") {
    try {
        parse("2\n3\n2\n1 1 2\n1 x 1\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
    }
    CHECK_THROWS_AS(parse("2\nthree\n1\n1 1 1\n"), ParseError);
    CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("empty documents are dropped and counted") {
    std::istringstream in("3\n2\n2\n1 1 1\n3 2 2\n");
    std::size_t dropped = 0;
    Corpus c = load_uci_bag_of_words(in, nullptr, &dropped);
    CHECK(dropped == 1);
    CHECK(c.num_docs() == 2);
    CHECK(c.dense_row(1) == std::vector<std::uint32_t>{0, 2});
}

TEST_CASE("vocabulary size must match W") {
    std::istringstream doc("1\n3\n1\n1 1 1\n"), vocab("a\nb\n");
    CHECK_THROWS_AS(load_uci_bag_of_words(doc, &vocab), ValidationError);
    std::istringstream doc2("1\n3\n1\n1 1 1\n"), vocab2("a\nb\nc\n");
    Corpus c = load_uci_bag_of_words(doc2, &vocab2);
    CHECK(c.vocab() == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("normalize examples") {
    Corpus c = Corpus::from_dense({{2, 0, 1}, {0, 5, 0}});
    NormalizedCorpus n = normalize(c);
    CHECK(n.dense_row(0)[0] == doctest::Approx(2.0 / 3.0));
    CHECK(n.dense_row(0)[1] == 0.0);
    CHECK(n.dense_row(0)[2] == doctest::Approx(1.0 / 3.0));
    CHECK(n.dense_row(1)[1] == 1.0);
    CHECK(n.weight(0) == 3.0);
    CHECK(n.weight(1) == 5.0);
}

TEST_CASE("identical documents normalize identically") {
    NormalizedCorpus n = normalize(Corpus::from_dense({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}}));
    CHECK(n.rows_equal(0, 1));
    CHECK(n.rows_equal(1, 2));
    CHECK(n.count_distinct_rows() == 1);
    for (std::size_t m = 0; m < 3; ++m) CHECK(n.weight(m) == 6.0);
}

TEST_CASE("round trip through the UCI format") {
    LdaParams p;
    p.K = 3, p.V = 40, p.M = 60, p.doc_lengths = LengthRange{1, 50}, p.seed = 17;
    Corpus c = generate_corpus(p).first;
    std::stringstream ss;
    write_uci_bag_of_words(c, ss);
    Corpus back = load_uci_bag_of_words(ss);
    CHECK(back == c);
}

TEST_CASE("normalized rows times weights recover the counts") {
    LdaParams p;
    p.K = 4, p.V = 30, p.M = 50, p.doc_lengths = LengthRange{1, 500}, p.seed = 3;
    Corpus c = generate_corpus(p).first;
    NormalizedCorpus n = normalize(c);
    for (std::size_t m = 0; m < c.num_docs(); ++m) {
        double sum = 0.0;
        Vector row = n.dense_row(m);
        for (Eigen::Index i = 0; i < row.size(); ++i) {
            CHECK(std::lround(row[i] * n.weight(m)) == c.count(m, static_cast<std::size_t>(i)));
            sum += row[i];
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("split_holdout partitions deterministically") {
    Corpus c = Corpus::from_dense({{1, 0}, {0, 1}, {2, 0}, {0, 2}, {3, 0}, {0, 3}, {4, 0}, {0, 4}, {5, 0}, {0, 5}});
    auto [train, test] = split_holdout(c, 3, 7);
    CHECK(train.num_docs() == 7);
    CHECK(test.num_docs() == 3);
    auto [train2, test2] = split_holdout(c, 3, 7);
    CHECK(train == train2);
    CHECK(test == test2);

    auto held = holdout_indices(10, 3, 7);
    std::set<std::size_t> held_set(held.begin(), held.end());
    CHECK(held_set.size() == 3);
    std::size_t ti = 0, ri = 0;
    for (std::size_t m = 0; m < 10; ++m) {
        if (held_set.count(m)) CHECK(test.dense_row(ti++) == c.dense_row(m));
        else CHECK(train.dense_row(ri++) == c.dense_row(m));
    }
    CHECK(train.vocab_size() == c.vocab_size());
    CHECK(test.vocab_size() == c.vocab_size());
}

TEST_CASE("split_holdout is a partition for many seeds") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto held = holdout_indices(25, 1 + seed % 24, seed);
        CHECK(held.size() == 1 + seed % 24);
        CHECK(std::is_sorted(held.begin(), held.end()));
        CHECK(std::adjacent_find(held.begin(), held.end()) == held.end());
        CHECK(held.back() < 25);
    }
}

TEST_CASE("split_holdout bounds") {
    Corpus c = Corpus::from_dense({{1, 0}, {0, 1}});
    CHECK_THROWS_AS(split_holdout(c, 2, 0), ArgumentError);
    CHECK_THROWS_AS(split_holdout(c, 0, 0), ArgumentError);
}

TEST_CASE("constructor rejects broken invariants") {
    CHECK_THROWS_AS(Corpus(3, {0, 1}, {5}, {1}), ValidationError);     // word out of range
    CHECK_THROWS_AS(Corpus(3, {0, 1}, {1}, {0}), ValidationError);     // zero count
    CHECK_THROWS_AS(Corpus(3, {0, 2}, {2, 1}, {1, 1}), ValidationError);  // unsorted
    CHECK_THROWS_AS(Corpus(3, {0, 0}, {}, {}), ValidationError);       // empty document
}

TEST_CASE("sparse distances agree with dense arithmetic") {
    NormalizedCorpus n = normalize(Corpus::from_dense({{1, 2, 0, 0}, {0, 1, 1, 2}, {3, 0, 0, 1}}));
    Matrix dense = n.to_dense();
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b)
            CHECK(n.sq_distance(a, b) ==
                  doctest::Approx((dense.row(static_cast<Eigen::Index>(a)) - dense.row(static_cast<Eigen::Index>(b))).squaredNorm()));
    Vector x(4);
    x << 0.1, 0.2, 0.3, 0.4;
    CHECK(n.sq_distance(1, x.data(), x.squaredNorm()) == doctest::Approx((dense.row(1).transpose() - x).squaredNorm()));
    CHECK(n.dot(2, x.data()) == doctest::Approx(dense.row(2).dot(x)));
}
