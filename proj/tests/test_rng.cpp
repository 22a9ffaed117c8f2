#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "gdm/error.hpp"
#include "gdm/rng.hpp"

using namespace gdm;

TEST_CASE("same seed gives the same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("substreams differ from each other and from the parent") {
    Rng base(7);
    Rng s1 = base.substream(1), s2 = base.substream(2), s1b = base.substream(1);
    CHECK(s1.next_u64() != s2.next_u64());
    Rng again = base.substream(1);
    CHECK(again.next_u64() == s1b.next_u64());
}

TEST_CASE("uniform stays in the open unit interval with mean near one half") {
    Rng rng(1);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("uniform_index covers the range evenly") {
    Rng rng(3);
    std::vector<int> hist(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) hist[rng.uniform_index(7)]++;
    for (int h : hist) CHECK(std::abs(h - n / 7) < 500);
}

TEST_CASE("normal draws have unit variance") {
    Rng rng(5);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("gamma draws match shape for large and small shapes") {
    // Gamma(k, 1) has mean k and variance k.
    for (double shape : {0.1, 0.5, 1.0, 3.0, 20.0}) {
        Rng rng(11);
        const int n = 200000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double g = rng.gamma(shape);
            REQUIRE(g >= 0.0);
            s += g;
            s2 += g * g;
        }
        double mean = s / n, var = s2 / n - mean * mean;
        CHECK(std::abs(mean - shape) < 0.02 * std::max(1.0, shape));
        CHECK(std::abs(var - shape) < 0.05 * std::max(1.0, shape));
    }
}

TEST_CASE("log gamma draws stay finite for tiny shapes") {
    Rng rng(9);
    for (int i = 0; i < 1000; ++i) CHECK(std::isfinite(rng.log_gamma_draw(1e-4)));
}

TEST_CASE("sample_proportional follows the weights") {
    Rng rng(2);
    std::vector<double> w = {1.0, 0.0, 3.0};
    std::vector<int> hist(3, 0);
    const int n = 40000;
    for (int i = 0; i < n; ++i) hist[sample_proportional(w, rng)]++;
    CHECK(hist[1] == 0);
    CHECK(std::abs(hist[2] / double(n) - 0.75) < 0.01);
}

TEST_CASE("shuffle is a permutation and deterministic") {
    std::vector<int> a(50), b;
    std::iota(a.begin(), a.end(), 0);
    b = a;
    Rng r1(4), r2(4);
    shuffle(a, r1);
    shuffle(b, r2);
    CHECK(a == b);
    CHECK(std::set<int>(a.begin(), a.end()).size() == 50);
}
