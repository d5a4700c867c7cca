#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "fplab/analysis.hpp"
#include "fplab/bounds.hpp"
#include "test_util.hpp"

using namespace fplab;

namespace {

std::vector<int> uniform_blocks(int n, int64_t t) {
    std::vector<int> seq;
    for (int v = 0; v < n; ++v)
        seq.insert(seq.end(), static_cast<size_t>(t / n), v);
    return seq;
}

std::vector<int> random_seq(SplitMix64& rng, int max_len, int alphabet) {
    int len = 1 + static_cast<int>(rng.below(max_len));
    std::vector<int> seq(len);
    for (auto& v : seq) v = static_cast<int>(rng.below(alphabet));
    return seq;
}

}  // namespace

TEST_CASE("last_occurrences") {
    CHECK(last_occurrences({1, 2, 1}) == std::vector<int64_t>{3, 2, 3});
    CHECK(last_occurrences({1, 1, 2, 2}) == std::vector<int64_t>{2, 2, 4, 4});
    CHECK(last_occurrences({1, 2, 3}) == std::vector<int64_t>{1, 2, 3});
    CHECK_THROWS_AS(last_occurrences({}), std::invalid_argument);
}

TEST_CASE("sum_S") {
    CHECK(sum_S({1, 1, 2, 2}) == 12);
    CHECK(sum_S({1, 2, 1, 2}) == 14);
    CHECK(sum_S({1, 2}) == 3);
    // all distinct: S = t(t+1)/2 exactly
    CHECK(sum_S({4, 2, 9}) == 6);
}

TEST_CASE("sequence_stats ties the pieces together") {
    SequenceStats st = sequence_stats({2, 1, 2});
    CHECK(st.f == std::vector<int64_t>{3, 2, 3});
    CHECK(st.S == 8);
    // f[i] >= i+1 (1-based position) always
    for (size_t i = 0; i < st.f.size(); ++i)
        CHECK(st.f[i] >= static_cast<int64_t>(i) + 1);
}

TEST_CASE("msbound") {
    CHECK(msbound(uniform_blocks(2, 4), 4) == R("1/2"));
    CHECK(msbound({1, 2, 3, 4, 5, 6, 7}, 7) == R("1/2") + R("1/14"));
    CHECK(msbound(std::vector<int>(9, 1), 9) == R("1/9"));
    CHECK_THROWS_AS(msbound({1, 2}, 3), std::invalid_argument);
}

TEST_CASE("transform reorders by ascending last occurrence") {
    CHECK(last_occurrence_transform({2, 1, 2}) == std::vector<int>{1, 2, 2});
    CHECK(sum_S({2, 1, 2}) == 8);
    CHECK(sum_S({1, 2, 2}) == 7);

    // block-form input is a fixed point
    auto blocks = uniform_blocks(3, 9);
    CHECK(last_occurrence_transform(blocks) == blocks);

    // last occurrences decide the order, not first appearances
    CHECK(last_occurrence_transform({3, 1, 3, 1}) ==
          std::vector<int>{3, 3, 1, 1});
    CHECK(sum_S({3, 1, 3, 1}) == 14);
    CHECK(sum_S({3, 3, 1, 1}) == 12);
}

TEST_CASE("transform never increases S and strictly decreases when it moves") {
    SplitMix64 rng(2024);
    int moved = 0;
    for (int iter = 0; iter < 1000; ++iter) {
        auto seq = random_seq(rng, 12, 4);
        auto out = last_occurrence_transform(seq);
        REQUIRE(out.size() == seq.size());
        auto sorted_in = seq, sorted_out = out;
        std::sort(sorted_in.begin(), sorted_in.end());
        std::sort(sorted_out.begin(), sorted_out.end());
        CHECK(sorted_in == sorted_out);  // multiset preserved
        if (out != seq) {
            CHECK(sum_S(out) < sum_S(seq));
            ++moved;
        } else {
            CHECK(sum_S(out) == sum_S(seq));
        }
    }
    CHECK(moved > 300);  // the generator produces plenty of non-block inputs
}

TEST_CASE("streaming score matches sum_S at every prefix") {
    SplitMix64 rng(404);
    for (int iter = 0; iter < 200; ++iter) {
        int alphabet = 1 + static_cast<int>(rng.below(5));
        int len = 1 + static_cast<int>(rng.below(20));
        LastOccurrenceScore score(alphabet);
        std::vector<int> prefix;
        for (int i = 0; i < len; ++i) {
            prefix.push_back(static_cast<int>(rng.below(alphabet)));
            score.push(prefix.back());
            CHECK(score.score() == sum_S(prefix));
            CHECK(score.length() == static_cast<int64_t>(prefix.size()));
        }
    }
}

TEST_CASE("S is bounded below by t(t+1)/2 with equality iff all distinct") {
    SplitMix64 rng(55);
    for (int iter = 0; iter < 500; ++iter) {
        auto seq = random_seq(rng, 10, 5);
        int64_t t = static_cast<int64_t>(seq.size());
        int64_t s = sum_S(seq);
        CHECK(s >= t * (t + 1) / 2);
        auto sorted = seq;
        std::sort(sorted.begin(), sorted.end());
        bool distinct = std::adjacent_find(sorted.begin(), sorted.end()) ==
                        sorted.end();
        CHECK((s == t * (t + 1) / 2) == distinct);
    }
}

TEST_CASE("brute force block compositions, frozen small cases") {
    MinSResult r42 = brute_force_min_S(4, 2, MinSMode::BlockCompositions);
    CHECK(r42.min_S == 12);
    CHECK(r42.argmin_compositions ==
          std::vector<std::vector<int64_t>>{{2, 2}});

    MinSResult r63 = brute_force_min_S(6, 3, MinSMode::BlockCompositions);
    CHECK(r63.min_S == 24);
    CHECK(r63.argmin_compositions ==
          std::vector<std::vector<int64_t>>{{2, 2, 2}});

    MinSResult r52 = brute_force_min_S(5, 2, MinSMode::BlockCompositions);
    CHECK(r52.min_S == 19);
    CHECK(r52.argmin_compositions ==
          std::vector<std::vector<int64_t>>{{2, 3}, {3, 2}});

    CHECK_THROWS_AS(brute_force_min_S(41, 2, MinSMode::BlockCompositions),
                    std::invalid_argument);
    CHECK_THROWS_AS(brute_force_min_S(20, 9, MinSMode::BlockCompositions),
                    std::invalid_argument);
}

TEST_CASE("brute force over all sequences agrees with block mode") {
    for (auto [t, n] : {std::pair{4, 2}, {5, 2}, {6, 3}, {8, 3}, {7, 2}}) {
        MinSResult all = brute_force_min_S(t, n, MinSMode::AllSequences);
        MinSResult block = brute_force_min_S(t, n, MinSMode::BlockCompositions);
        CHECK(all.min_S == block.min_S);
        CHECK(all.argmin_compositions == block.argmin_compositions);
        CHECK(all.all_minimizers_block_form);
    }
    CHECK_THROWS_AS(brute_force_min_S(11, 2, MinSMode::AllSequences),
                    std::invalid_argument);
    CHECK_THROWS_AS(brute_force_min_S(8, 5, MinSMode::AllSequences),
                    std::invalid_argument);
}

TEST_CASE("all-sequences minimizers use exactly min(n,t) distinct values") {
    for (int n = 1; n <= 3; ++n)
        for (int t = 1; t <= 8; ++t) {
            MinSResult res = brute_force_min_S(t, n, MinSMode::AllSequences);
            CHECK(res.all_minimizers_block_form);
            size_t expected = static_cast<size_t>(std::min(n, static_cast<int>(t)));
            for (const auto& comp : res.argmin_compositions)
                CHECK(comp.size() == expected);
        }
}

TEST_CASE("uniform composition is the unique minimizer when n divides t") {
    for (int n = 1; n <= 4; ++n)
        for (int64_t t = n; t <= 16; t += n) {
            MinSResult res = brute_force_min_S(t, n, MinSMode::BlockCompositions);
            REQUIRE(res.argmin_compositions.size() == 1);
            for (int64_t c : res.argmin_compositions[0]) CHECK(c == t / n);
        }
}

TEST_CASE("msbound of uniform blocks equals epsilon_star") {
    for (int n = 1; n <= 8; ++n)
        for (int64_t t = n; t <= 40; t += n)
            CHECK(msbound(uniform_blocks(n, t), t) == epsilon_star(n, t));
}

TEST_CASE("epsilon_star") {
    CHECK(epsilon_star(2, 4) == R("1/2"));
    CHECK(epsilon_star(10, 100) == R("23/50"));
    CHECK(epsilon_star(10, 100).to_double() == doctest::Approx(0.46));
    // limit shape: for huge t the value approaches 1/2 - 1/(2n) from above
    CHECK(epsilon_star(10, 1000000000) - (R("1/2") - R("1/20")) ==
          R("1/1000000000"));
    try {
        epsilon_star(10, 101);
        FAIL("expected divisibility error");
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        CHECK(msg.find("100") != std::string::npos);
        CHECK(msg.find("110") != std::string::npos);
    }
    CHECK_THROWS_AS(epsilon_star(0, 10), std::invalid_argument);
}

TEST_CASE("min_s csv format") {
    MinSResult res = brute_force_min_S(5, 2, MinSMode::BlockCompositions);
    std::ostringstream out;
    write_min_s_csv(res, out);
    CHECK(out.str() == "t,n,min_S,composition\n5,2,19,2 3\n5,2,19,3 2\n");
}

TEST_CASE("certify_trace_bound passes on engine runs of unit-range games") {
    SplitMix64 rng(314);
    for (int iter = 0; iter < 5; ++iter) {
        BimatrixGame g = build_random(rng.next(), 5, 5, 16);
        FPState st = init(g, FPConfig{});
        Trace tr = run(st, 1000);
        CertifyReport rep = certify_trace_bound(g, tr, 5);
        CHECK(rep.pass);
        CHECK(rep.samples == 200);
        CHECK(rep.violations == 0);
        CHECK(rep.worst_margin >= R("0"));
    }
}

TEST_CASE("certify_trace_bound covers the normalized family game") {
    BimatrixGame g = normalize_to_unit(build_gn(gn_params(5, Rational(2))));
    FPState st = init(g, FPConfig{});
    Trace tr = run(st, 20000);
    CertifyReport rep = certify_trace_bound(g, tr, 20);
    CHECK(rep.pass);
    CHECK(rep.samples == 1000);
}

TEST_CASE("certify_trace_bound rejects payoffs outside the unit range") {
    BimatrixGame g = build_gn(gn_params(5, Rational(2)));  // alpha = 3/2 > 1
    FPState st = init(g, FPConfig{});
    Trace tr = run(st, 100);
    CHECK_THROWS_AS(certify_trace_bound(g, tr, 5), std::invalid_argument);
}

TEST_CASE("trace actions outside the game dimensions are rejected") {
    BimatrixGame g = build_random(9, 2, 2, 8);
    Trace tr;
    tr.push(0, 0, 3);
    tr.push(5, 1, 1);  // no such row strategy
    CHECK_THROWS_AS(certify_trace_bound(g, tr, 1), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_at(g, tr, 4), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_trajectory(g, tr, EpsSchedule::Blocks),
                    std::invalid_argument);
}
