#include <doctest.h>

#include <sstream>

#include "fplab/analysis.hpp"
#include "fplab/engine.hpp"
#include "fplab/generators.hpp"
#include "test_util.hpp"

using namespace fplab;

namespace {

BimatrixGame g5() { return build_gn(gn_params(5, Rational(2))); }

// BigInt recomputation of an accumulator entry straight from the counts.
BigInt acc_from_scratch(const BimatrixGame& game, const FPState& st,
                        Player player, int strategy) {
    BigInt scale = player == Player::Row ? st.row_scale() : st.col_scale();
    const auto& opp_counts =
        player == Player::Row ? st.counts_col : st.counts_row;
    Rational sum;
    for (size_t o = 0; o < opp_counts.size(); ++o) {
        if (!opp_counts[o]) continue;
        const Rational& pay = player == Player::Row
                                  ? game.row_payoff(strategy, static_cast<int>(o))
                                  : game.col_payoff(static_cast<int>(o), strategy);
        sum += Rational(opp_counts[o]) * pay;
    }
    Rational scaled = sum * Rational(scale);
    REQUIRE(scaled.is_integer());
    return scaled.num();
}

}  // namespace

TEST_CASE("init loads the first observation") {
    BimatrixGame g = g5();
    FPConfig cfg;
    FPState st = init(g, cfg);
    CHECK(st.t == 1);
    CHECK(st.counts_row[0] == 1);
    CHECK(st.counts_col[0] == 1);
    CHECK(st.row_scale() == 4);  // lcm of {1, 2, 4}
    CHECK(st.acc_row_value(1) == 4);  // D_R * R[2,1] = 4 * 1
    CHECK(st.acc_row_value(2) == 3);  // D_R * beta
    CHECK(st.acc_row_value(0) == 0);
}

TEST_CASE("init rejects out-of-bounds starts") {
    BimatrixGame g = build_shapley();
    FPConfig cfg;
    cfg.initial_row = 4;
    CHECK_THROWS_AS(init(g, cfg), std::invalid_argument);
    cfg.initial_row = 0;
    cfg.initial_col = -1;
    CHECK_THROWS_AS(init(g, cfg), std::invalid_argument);
}

TEST_CASE("g5 ascends through the first strategies one step each") {
    BimatrixGame g = g5();
    FPState st = init(g, FPConfig{});
    Trace tr = run(st, 5);
    REQUIRE(tr.runs.size() == 5);
    for (int s = 0; s < 5; ++s) {
        CHECK(tr.runs[s].row_action == s);
        CHECK(tr.runs[s].col_action == s);
        CHECK(tr.runs[s].length == 1);
    }
}

TEST_CASE("g5 block of strategy 6 lasts two steps") {
    BimatrixGame g = g5();
    FPState st = init(g, FPConfig{});
    Trace tr = run(st, 8);
    REQUIRE(tr.runs.size() == 7);
    CHECK(tr.runs[5] == TraceRun{5, 5, 2});  // strategy 6 at t = 6,7
    CHECK(tr.runs[6] == TraceRun{6, 6, 1});  // strategy 7 at t = 8
}

TEST_CASE("matching pennies hand trace with lowest-index ties") {
    BimatrixGame g = build_matching_pennies();
    FPState st = init(g, FPConfig{});
    StepRecord s2 = step(st);
    CHECK(s2.row_action == 0);
    CHECK(s2.col_action == 1);
    CHECK_FALSE(s2.row_tie);
    CHECK_FALSE(s2.col_tie);
    StepRecord s3 = step(st);
    CHECK(s3.row_action == 0);  // row argmax {1,2} broken to the lowest
    CHECK(s3.col_action == 1);
    CHECK(s3.row_tie);
    CHECK_FALSE(s3.col_tie);
    StepRecord s4 = step(st);
    CHECK(s4.row_action == 1);
    CHECK(s4.col_action == 1);
}

TEST_CASE("tie rules select within the argmax set") {
    // both rows identical: the row player is tied forever
    std::vector<std::vector<Rational>> r = {{R("1"), R("0")}, {R("1"), R("0")}};
    std::vector<std::vector<Rational>> c = {{R("1"), R("0")}, {R("0"), R("1")}};
    BimatrixGame g = make_game(r, c);

    FPConfig cfg;
    cfg.initial_row = 1;
    cfg.tie_rule = TieRule::LowestIndex;
    FPState low = init(g, cfg);
    CHECK(step(low).row_action == 0);

    cfg.tie_rule = TieRule::HighestIndex;
    FPState high = init(g, cfg);
    CHECK(step(high).row_action == 1);

    cfg.tie_rule = TieRule::IncumbentThenLowest;
    FPState inc = init(g, cfg);
    CHECK(step(inc).row_action == 1);  // incumbent wins its tie
}

TEST_CASE("state_probabilities is uniform after the ascent") {
    BimatrixGame g = g5();
    FPState st = init(g, FPConfig{});
    run(st, 5);
    MixedStrategy p = state_probabilities(st, Player::Row);
    p.validate();
    for (int s = 0; s < 5; ++s) CHECK(p.probs[s] == R("1/5"));
    for (int s = 5; s < 20; ++s) CHECK(p.probs[s] == R("0"));
}

TEST_CASE("probabilities always sum to one") {
    SplitMix64 rng(99);
    for (int iter = 0; iter < 5; ++iter) {
        BimatrixGame g = build_random(rng.next(), 3, 4, 8);
        FPState st = init(g, FPConfig{});
        run(st, 123);
        Rational sum;
        for (const auto& p : state_probabilities(st, Player::Col).probs)
            sum += p;
        CHECK(sum == R("1"));
        CHECK(st.t == 123);
    }
}

TEST_CASE("symmetric games with equal starts stay on the diagonal") {
    SplitMix64 rng(7);
    for (int iter = 0; iter < 8; ++iter) {
        int m = 2 + static_cast<int>(rng.below(5));
        BimatrixGame base = build_random(rng.next(), m, m, 8);
        // make C the transpose of R
        std::vector<std::vector<Rational>> r(m), c(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                r[i].push_back(base.row_payoff(i, j));
                c[i].push_back(base.row_payoff(j, i));
            }
        BimatrixGame g = make_game(r, c);
        FPState st = init(g, FPConfig{});
        Trace tr = run(st, 200);
        for (const auto& run_ : tr.runs)
            CHECK(run_.row_action == run_.col_action);
    }
}

TEST_CASE("accumulators equal the from-scratch recomputation") {
    SplitMix64 rng(21);
    for (int iter = 0; iter < 4; ++iter) {
        int m = 2 + static_cast<int>(rng.below(4));
        int n = 2 + static_cast<int>(rng.below(4));
        BimatrixGame g = build_random(rng.next(), m, n, 10);
        FPState st = init(g, FPConfig{});
        run(st, 300);
        for (int s = 0; s < m; ++s)
            CHECK(st.acc_row_value(s) == acc_from_scratch(g, st, Player::Row, s));
        for (int s = 0; s < n; ++s)
            CHECK(st.acc_col_value(s) == acc_from_scratch(g, st, Player::Col, s));
    }
}

TEST_CASE("family ties only pair the current strategy with its successor") {
    // Exact arithmetic hits argmax ties on this family whenever a block
    // length lands exactly on its recurrence boundary. Every such tie is
    // between the playing strategy and the next one in the cycle, so the
    // block structure survives any deterministic tie rule.
    BimatrixGame g = build_gn(gn_params(4, Rational(2)));
    const int size = 16, top = 15, wrap_to = 8;
    FPState st = init(g, FPConfig{});
    int ties_seen = 0;
    for (int64_t t = 2; t <= 20000; ++t) {
        int incumbent = st.last_row;
        BigInt best = st.acc_row_value(0);
        for (int s = 1; s < size; ++s)
            if (st.acc_row_value(s) > best) best = st.acc_row_value(s);
        std::vector<int> argmax;
        for (int s = 0; s < size; ++s)
            if (st.acc_row_value(s) == best) argmax.push_back(s);
        StepRecord r = step(st);
        CHECK(r.row_tie == (argmax.size() >= 2));
        if (!r.row_tie) continue;
        ++ties_seen;
        int succ = incumbent == top ? wrap_to : incumbent + 1;
        CHECK(argmax == std::vector<int>{std::min(incumbent, succ),
                                         std::max(incumbent, succ)});
    }
    CHECK(ties_seen > 0);  // boundary ties genuinely occur at k=2
}

TEST_CASE("run is deterministic") {
    BimatrixGame g = build_shapley();
    FPState a = init(g, FPConfig{});
    FPState b = init(g, FPConfig{});
    CHECK(run(a, 2000) == run(b, 2000));
}

TEST_CASE("engine matches the oracle on random games") {
    SplitMix64 rng(31);
    for (int iter = 0; iter < 10; ++iter) {
        int m = 2 + static_cast<int>(rng.below(4));
        int n = 2 + static_cast<int>(rng.below(4));
        BimatrixGame g = build_random(rng.next(), m, n, 8);
        FPConfig cfg;
        cfg.tie_rule = iter % 2 ? TieRule::HighestIndex : TieRule::LowestIndex;
        FPState st = init(g, cfg);
        CHECK(run(st, 200) == oracle_run(g, cfg, 200));
    }
}

TEST_CASE("engine matches the oracle on the named games") {
    FPConfig cfg;
    BimatrixGame g4 = build_gn(gn_params(4, Rational(2)));
    FPState st = init(g4, cfg);
    CHECK(run(st, 2000) == oracle_run(g4, cfg, 2000));

    BimatrixGame sh = build_shapley();
    FPState st2 = init(sh, cfg);
    CHECK(run(st2, 1000) == oracle_run(sh, cfg, 1000));
}

TEST_CASE("forced big accumulators reproduce the fast path") {
    BimatrixGame g = build_gn(gn_params(4, Rational(3)));
    FPConfig small_cfg;
    FPConfig big_cfg;
    big_cfg.force_big_accumulators = true;
    FPState a = init(g, small_cfg);
    FPState b = init(g, big_cfg);
    CHECK_FALSE(a.using_big_accumulators());
    CHECK(b.using_big_accumulators());
    CHECK(run(a, 5000) == run(b, 5000));
    CHECK(epsilon_now(a).row_raw == epsilon_now(b).row_raw);
}

TEST_CASE("accumulators promote mid-run when the static bound trips") {
    // huge integer payoffs push the int64 budget down to ~scale steps
    const long long huge = 3
                           * 100000000LL * 1000000000LL;  // 3e17
    std::vector<std::vector<Rational>> r = {{Rational(huge), R("0")},
                                            {R("0"), Rational(huge)}};
    std::vector<std::vector<Rational>> c = {{R("0"), Rational(huge)},
                                            {Rational(huge), R("0")}};
    BimatrixGame g = make_game(r, c);
    FPState fast = init(g, FPConfig{});
    CHECK_FALSE(fast.using_big_accumulators());
    Trace t1 = run(fast, 100);
    CHECK(fast.using_big_accumulators());  // 100 * 3e17 > 2^62

    FPConfig big_cfg;
    big_cfg.force_big_accumulators = true;
    FPState slow = init(g, big_cfg);
    CHECK(t1 == run(slow, 100));
    CHECK(epsilon_now(fast).row_raw == epsilon_now(slow).row_raw);
}

TEST_CASE("huge denominators select the big backend at init") {
    // lcm of denominators beyond int64 forces arbitrary precision up front
    Rational tiny(BigInt(1), Rational::pow(Rational(3), 41).num());  // 1/3^41
    std::vector<std::vector<Rational>> r = {{tiny, R("0")}, {R("0"), R("1")}};
    BimatrixGame g = make_game(r, r);
    FPState st = init(g, FPConfig{});
    CHECK(st.using_big_accumulators());
    run(st, 50);
    Rational sum;
    for (const auto& p : state_probabilities(st, Player::Row).probs) sum += p;
    CHECK(sum == R("1"));
}

TEST_CASE("checkpoint round trip resumes identically") {
    BimatrixGame g = build_gn(gn_params(4, Rational(2)));
    FPState full = init(g, FPConfig{});
    Trace whole = run(full, 3000);

    FPState part = init(g, FPConfig{});
    Trace head = run(part, 1500);
    std::string snap = checkpoint(part);
    FPState resumed = restore(g, snap);
    CHECK(resumed.t == 1500);
    CHECK(resumed.counts_row == part.counts_row);
    Trace tail = run(resumed, 3000);
    head.append(tail);
    CHECK(head == whole);
    CHECK(epsilon_now(resumed).row_raw == epsilon_now(full).row_raw);
}

TEST_CASE("restore rejects corruption and wrong games") {
    BimatrixGame g = build_shapley();
    FPState st = init(g, FPConfig{});
    run(st, 50);
    std::string snap = checkpoint(st);

    CHECK_THROWS_AS(restore(g, "fpstate 2\n" + snap.substr(10)),
                    std::runtime_error);
    CHECK_THROWS_AS(restore(g, snap.substr(0, snap.size() / 2)),
                    std::runtime_error);
    CHECK_THROWS_AS(restore(g, "garbage"), std::runtime_error);
    BimatrixGame other = build_matching_pennies();
    CHECK_THROWS_AS(restore(other, snap), std::runtime_error);
}

TEST_CASE("trace csv round trip and format") {
    BimatrixGame g = build_shapley();
    FPState st = init(g, FPConfig{});
    Trace tr = run(st, 500);
    std::ostringstream out;
    write_trace_csv(tr, out);
    std::string text = out.str();
    CHECK(text.substr(0, 29) == "row_action,col_action,length\n");
    std::istringstream in(text);
    CHECK(read_trace_csv(in) == tr);

    std::istringstream bad_header("a,b,c\n1,1,1\n");
    CHECK_THROWS_AS(read_trace_csv(bad_header), std::runtime_error);
    std::istringstream bad_row("row_action,col_action,length\n0,1,1\n");
    CHECK_THROWS_AS(read_trace_csv(bad_row), std::runtime_error);
}

TEST_CASE("run records epsilon samples on the blocks schedule") {
    BimatrixGame g = g5();
    FPState st = init(g, FPConfig{});
    RunRecorder rec;
    run(st, 64, &rec);
    REQUIRE(!rec.epsilons.empty());
    CHECK(rec.epsilons.front().t == 1);
    CHECK(rec.epsilons.back().t == 64);
    // every step up to n is a block start on this family
    for (int i = 0; i < 5; ++i) CHECK(rec.epsilons[i].t == i + 1);
    // frozen early-phase exact regrets (raw, then normalized by alpha)
    CHECK(rec.epsilons[0].row_raw == R("1"));
    CHECK(rec.epsilons[1].row_raw == R("5/8"));
    CHECK(rec.epsilons[2].row_raw == R("19/36"));
    CHECK(rec.epsilons[3].row_raw == R("31/64"));
    CHECK(rec.epsilons[4].row_raw == R("14/25"));
    CHECK(rec.epsilons[0].row_norm == R("2/3"));
    CHECK(rec.epsilons[1].row_norm == R("5/12"));
    CHECK(rec.epsilons[2].col_norm == R("19/54"));
    CHECK(rec.epsilons[3].col_norm == R("31/96"));
    CHECK(rec.epsilons[4].col_norm == R("28/75"));
}

TEST_CASE("run rejects a target before the current step") {
    BimatrixGame g = build_matching_pennies();
    FPState st = init(g, FPConfig{});
    run(st, 10);
    CHECK_THROWS_AS(run(st, 5), std::invalid_argument);
}
