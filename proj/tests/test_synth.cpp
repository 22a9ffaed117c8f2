#include <doctest.h>

#include <cmath>

#include "gdm/error.hpp"
#include "gdm/geometry.hpp"
#include "gdm/parallel.hpp"
#include "gdm/synth.hpp"

using namespace gdm;

TEST_CASE("sample_dirichlet with dim 1 is the point mass") {
    Rng rng(0);
    Vector v = sample_dirichlet(1, 0.3, rng);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == 1.0);
}

TEST_CASE("sample_dirichlet is deterministic and on the simplex") {
    Rng a(5), b(5);
    Vector x = sample_dirichlet(6, 0.05, a), y = sample_dirichlet(6, 0.05, b);
    CHECK(x == y);
    CHECK(std::abs(x.sum() - 1.0) <= 1e-12);
    CHECK(x.minCoeff() > 0.0);
}

TEST_CASE("sample_dirichlet rejects nonpositive concentration") {
    Rng rng(0);
    CHECK_THROWS_AS(sample_dirichlet(3, 0.0, rng), ArgumentError);
    CHECK_THROWS_AS(sample_dirichlet(3, -1.0, rng), ArgumentError);
}

TEST_CASE("Dirichlet mean is uniform by symmetry (Monte Carlo)") {
    Rng rng(123);
    Vector mean = Vector::Zero(5);
    const int n = 100000;
    for (int i = 0; i < n; ++i) mean += sample_dirichlet(5, 0.1, rng);
    mean /= n;
    for (int k = 0; k < 5; ++k) CHECK(std::abs(mean[k] - 0.2) < 0.01);
}

TEST_CASE("Dirichlet variance matches the closed form") {
    // Var of a coordinate of Dir_K(a): (1/K)(1-1/K)/(K a + 1)
    Rng rng(77);
    const int n = 100000, K = 4;
    const double a = 0.5;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = sample_dirichlet(K, a, rng)[0];
        s += x, s2 += x * x;
    }
    double var = s2 / n - (s / n) * (s / n);
    double expected = (1.0 / K) * (1.0 - 1.0 / K) / (K * a + 1.0);
    CHECK(std::abs(var - expected) < 0.05 * expected);
}

TEST_CASE("sample_multinomial totals and alias path frequencies") {
    Rng rng(4);
    std::vector<double> p = {0.5, 0.3, 0.2, 0.0};
    auto small = sample_multinomial(p, 100, rng);
    CHECK(small[0] + small[1] + small[2] + small[3] == 100);
    CHECK(small[3] == 0);
    auto big = sample_multinomial(p, 200000, rng);
    CHECK(big[3] == 0);
    CHECK(std::abs(big[0] / 200000.0 - 0.5) < 0.005);
    CHECK(std::abs(big[2] / 200000.0 - 0.2) < 0.005);
}

TEST_CASE("injected beta and theta give p = theta beta") {
    LdaParams params;
    params.K = 2, params.V = 4, params.M = 3, params.doc_lengths = ConstantLength{10};
    GenerationOverrides o;
    Matrix beta = Matrix::Zero(2, 4);
    beta(0, 0) = 1.0;
    beta(1, 1) = 1.0;
    o.beta = beta;
    o.theta = Matrix::Constant(3, 2, 0.5);
    auto [corpus, truth] = generate_corpus(params, o);
    for (Eigen::Index m = 0; m < 3; ++m) {
        CHECK(truth.p(m, 0) == 0.5);
        CHECK(truth.p(m, 1) == 0.5);
        CHECK(truth.p(m, 2) == 0.0);
        CHECK(truth.p(m, 3) == 0.0);
        CHECK(corpus.count(static_cast<std::size_t>(m), 2) == 0);
    }
}

TEST_CASE("document totals equal the requested lengths") {
    LdaParams params;
    params.K = 3, params.V = 20, params.M = 40, params.seed = 9;
    params.doc_lengths = LengthRange{5, 700};
    auto [corpus, truth] = generate_corpus(params);
    for (std::size_t m = 0; m < corpus.num_docs(); ++m) {
        CHECK(corpus.length(m) >= 5);
        CHECK(corpus.length(m) <= 700);
    }
    params.doc_lengths = LengthList{std::vector<std::uint64_t>(40, 33)};
    auto c2 = generate_corpus(params).first;
    for (std::size_t m = 0; m < c2.num_docs(); ++m) CHECK(c2.length(m) == 33);
}

TEST_CASE("ground truth invariants") {
    LdaParams params;
    params.K = 4, params.V = 15, params.M = 30, params.doc_lengths = ConstantLength{50}, params.seed = 2;
    auto [corpus, truth] = generate_corpus(params);
    for (Eigen::Index k = 0; k < truth.beta.rows(); ++k) CHECK(std::abs(truth.beta.row(k).sum() - 1.0) <= 1e-12);
    for (Eigen::Index m = 0; m < truth.theta.rows(); ++m) {
        CHECK(std::abs(truth.theta.row(m).sum() - 1.0) <= 1e-12);
        CHECK(std::abs(truth.p.row(m).sum() - 1.0) <= 1e-12);
    }
    CHECK((truth.p - truth.theta * truth.beta).cwiseAbs().maxCoeff() <= 1e-12);

    // p_m lies in conv(beta)
    Projector proj(truth.beta);
    for (Eigen::Index m = 0; m < truth.p.rows(); ++m)
        CHECK(proj.project(Vector(truth.p.row(m).transpose())).sq_distance < 1e-9);
}

TEST_CASE("long single document approaches p (law of large numbers)") {
    LdaParams params;
    params.K = 3, params.V = 10, params.M = 1, params.doc_lengths = ConstantLength{100000}, params.seed = 8;
    auto [corpus, truth] = generate_corpus(params);
    for (std::size_t i = 0; i < 10; ++i)
        CHECK(std::abs(corpus.count(0, i) / 100000.0 - truth.p(0, static_cast<Eigen::Index>(i))) < 0.01);
}

TEST_CASE("generation is deterministic and independent of thread count") {
    LdaParams params;
    params.K = 5, params.V = 50, params.M = 700, params.doc_lengths = LengthRange{10, 300}, params.seed = 31;
    set_max_threads(1);
    auto a = generate_corpus(params);
    set_max_threads(4);
    auto b = generate_corpus(params);
    set_max_threads(0);
    CHECK(a.first == b.first);
    CHECK(a.second.beta == b.second.beta);
    CHECK(a.second.theta == b.second.theta);
    params.seed = 32;
    auto c = generate_corpus(params);
    CHECK(!(c.first == a.first));
}

TEST_CASE("small alpha concentrates each document on one topic") {
    LdaParams params;
    params.K = 4, params.V = 10, params.M = 4000, params.alpha = 1e-3, params.seed = 6;
    params.doc_lengths = ConstantLength{1};
    auto truth = generate_corpus(params).second;
    std::vector<int> argmax_hist(4, 0);
    int concentrated = 0;
    for (Eigen::Index m = 0; m < truth.theta.rows(); ++m) {
        Eigen::Index k;
        double top = truth.theta.row(m).maxCoeff(&k);
        argmax_hist[static_cast<std::size_t>(k)]++;
        if (top > 0.99) ++concentrated;
    }
    CHECK(concentrated > 0.95 * 4000);
    for (int h : argmax_hist) CHECK(std::abs(h - 1000) < 150);
}

TEST_CASE("invalid parameters are rejected") {
    LdaParams p;
    p.V = 1;
    CHECK_THROWS_AS(p.validate(), ArgumentError);
    p.V = 3;
    p.alpha = 0.0;
    CHECK_THROWS_AS(p.validate(), ArgumentError);
    p.alpha = 0.1;
    p.doc_lengths = ConstantLength{0};
    CHECK_THROWS_AS(generate_corpus(p), ArgumentError);
    p.doc_lengths = LengthRange{5, 2};
    CHECK_THROWS_AS(p.validate(), ArgumentError);
}
