#include <gtest/gtest.h>

#include <cstdlib>
#include <stdexcept>

#include "tdimer/parallel.hpp"
#include "tdimer/rng.hpp"

using namespace tdimer;

TEST(Parallel, VisitsEveryIndexOnce) {
    for (std::size_t threads : {1u, 2u, 5u}) {
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; }, threads);
        EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 1000);
    }
}

TEST(Parallel, RethrowsWorkerErrors) {
    EXPECT_THROW(parallel_for(
                     50, [](std::size_t i) {
                         if (i == 17) throw std::runtime_error("boom");
                     },
                     4),
                 std::runtime_error);
}

TEST(Parallel, ThreadCountResolution) {
    set_default_threads(0);
    ::setenv("TDIMER_THREADS", "3", 1);
    EXPECT_EQ(default_threads(), 3u);
    set_default_threads(2);
    EXPECT_EQ(default_threads(), 2u);
    set_default_threads(0);
    ::setenv("TDIMER_THREADS", "junk", 1);
    EXPECT_GE(default_threads(), 1u);
    ::unsetenv("TDIMER_THREADS");
}

TEST(Seeds, DerivedSeedsDiffer) {
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    EXPECT_EQ(derive_seed(5, 9), derive_seed(5, 9));
    Rng a(3), b(3);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next(), b.next());
    Rng r(11);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(r.below(7), 7u);
    }
}
