#include <doctest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "gdm/parallel.hpp"

using namespace gdm;

TEST_CASE("parallel_for visits every index once at several thread counts") {
    for (std::size_t threads : {1, 2, 4, 8}) {
        set_max_threads(threads);
        std::vector<std::atomic<int>> hits(1000);
        parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
        for (auto& h : hits) CHECK(h.load() == 1);
    }
    set_max_threads(0);
}

TEST_CASE("parallel_blocks splits into fixed blocks") {
    set_max_threads(3);
    const std::size_t n = 3 * kBlockSize + 5;
    std::vector<std::size_t> sizes(num_blocks(n), 0);
    parallel_blocks(n, [&](std::size_t b, std::size_t begin, std::size_t end) { sizes[b] = end - begin; });
    CHECK(sizes.size() == 4);
    CHECK(sizes[0] == kBlockSize);
    CHECK(sizes[3] == 5);
    set_max_threads(0);
}

TEST_CASE("exceptions in workers reach the caller") {
    set_max_threads(4);
    CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) {
                        if (i == 37) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
    set_max_threads(0);
}

TEST_CASE("empty range is a no-op") {
    int calls = 0;
    parallel_for(0, [&](std::size_t) { ++calls; });
    CHECK(calls == 0);
}
