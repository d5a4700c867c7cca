#include "suites.hpp"

#include <algorithm>
#include <ostream>
#include <vector>

#include "fplab/analysis.hpp"
#include "fplab/bounds.hpp"
#include "fplab/engine.hpp"
#include "fplab/generators.hpp"

namespace fplab::suites {

namespace {

struct Log {
    std::ostream& out;
    bool ok = true;
    void check(bool pass, const std::string& name) {
        out << (pass ? "ok   " : "FAIL ") << name << "\n";
        ok = ok && pass;
    }
};

MixedStrategy random_mix(SplitMix64& rng, int size) {
    std::vector<long long> w(size);
    long long total = 0;
    for (auto& v : w) {
        v = static_cast<long long>(rng.below(16));
        total += v;
    }
    if (total == 0) {
        w[rng.below(size)] = 1;
        total = 1;
    }
    MixedStrategy m;
    for (auto v : w) m.probs.emplace_back(v, total);
    return m;
}

}  // namespace

bool core_suite(bool quick, std::ostream& out) {
    Log log{out};
    SplitMix64 rng(0xC0DE);
    const int games = quick ? 6 : 20;
    bool columns_ok = true, bilinear_ok = true, affine_ok = true;
    bool regret_ok = true, zero_iff_ok = true;
    for (int it = 0; it < games; ++it) {
        int m = 2 + static_cast<int>(rng.below(5));
        int n = 2 + static_cast<int>(rng.below(5));
        BimatrixGame g = build_random(rng.next(), m, n, 10);

        for (int j = 0; j < n; ++j) {
            auto pv = payoff_vector(g, Player::Row, MixedStrategy::point_mass(j, n));
            for (int i = 0; i < m; ++i)
                columns_ok = columns_ok && pv[i] == g.row_payoff(i, j);
        }

        auto a = random_mix(rng, m), b = random_mix(rng, m);
        auto c = random_mix(rng, n);
        Rational lambda(static_cast<long long>(rng.below(6)), 5);
        MixedStrategy mixed;
        for (int i = 0; i < m; ++i)
            mixed.probs.push_back(lambda * a.probs[i] +
                                  (Rational(1) - lambda) * b.probs[i]);
        bilinear_ok = bilinear_ok &&
                      expected_payoff(g, Player::Row, mixed, c) ==
                          lambda * expected_payoff(g, Player::Row, a, c) +
                              (Rational(1) - lambda) *
                                  expected_payoff(g, Player::Row, b, c);

        Rational scale(1 + static_cast<long long>(rng.below(4)), 3);
        Rational shift(static_cast<long long>(rng.below(7)) - 3, 2);
        std::vector<std::vector<Rational>> r2(m), c2(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                r2[i].push_back(scale * g.row_payoff(i, j) + shift);
                c2[i].push_back(scale * g.col_payoff(i, j) + shift);
            }
        BimatrixGame scaled = make_game(r2, c2);
        affine_ok = affine_ok && best_response_set(g, Player::Row, c) ==
                                     best_response_set(scaled, Player::Row, c);

        Regret reg = regret(g, Player::Row, a, c);
        regret_ok = regret_ok && reg.raw >= Rational(0);
        auto br = best_response_set(g, Player::Row, c);
        bool on_br = true;
        for (int s = 0; s < m; ++s)
            if (!a.probs[s].is_zero() &&
                std::find(br.begin(), br.end(), s) == br.end())
                on_br = false;
        zero_iff_ok = zero_iff_ok && reg.raw.is_zero() == on_br;
    }
    log.check(columns_ok, "payoff_vector of a point mass is a matrix column");
    log.check(bilinear_ok, "expected_payoff is bilinear");
    log.check(affine_ok, "best responses invariant under affine rescaling");
    log.check(regret_ok, "regret is nonnegative");
    log.check(zero_iff_ok, "regret is zero iff supported on best responses");
    return log.ok;
}

bool gn_suite(bool quick, std::ostream& out) {
    Log log{out};
    std::vector<std::pair<int, int>> grid;
    if (quick)
        grid = {{4, 2}, {5, 3}};
    else
        for (int n : {4, 5, 6})
            for (int k : {2, 3, 4}) grid.emplace_back(n, k);
    for (auto [n, k] : grid) {
        GnRunCertificate cert = certify_gn(gn_params(n, Rational(k)), 0, 1);
        std::string tag = "n=" + std::to_string(n) + " k=" + std::to_string(k);
        log.check(cert.symmetric, tag + ": players stay symmetric");
        log.check(cert.structure.pass, tag + ": ascending block structure");
        log.check(cert.first_pass_ok && cert.recurrences.pass,
                  tag + ": count recurrences at every first-pass step");
        log.check(cert.recurrences.chain_ok,
                  tag + ": chained growth bound on the top block");
        log.check(cert.tail_mass_monotone, tag + ": tail mass non-increasing");
        log.check(cert.ratio_lower_ok, tag + ": circular ratios >= rho");
        log.check(cert.cycles_completed >= 1, tag + ": completes a full cycle");
        log.check(cert.uniform_ne.is_ne && cert.uniform_ne.no_pure_ne,
                  tag + ": uniform block equilibrium, no pure equilibria");
        out << "     " << tag << " t*=" << cert.pass_report.t_star
            << " steps=" << cert.total_steps << " ties=" << cert.ties
            << " ratio_max=" << cert.ratio_max_observed.str() << "\n";
    }
    return log.ok;
}

bool bounds_suite(bool quick, std::ostream& out) {
    Log log{out};
    SplitMix64 rng(0xB0B);
    const int seqs = quick ? 200 : 1000;
    bool monotone_ok = true, multiset_ok = true;
    for (int it = 0; it < seqs; ++it) {
        int len = 1 + static_cast<int>(rng.below(12));
        std::vector<int> seq(len);
        for (auto& v : seq) v = static_cast<int>(rng.below(4));
        auto tr = last_occurrence_transform(seq);
        if (tr != seq)
            monotone_ok = monotone_ok && sum_S(tr) < sum_S(seq);
        else
            monotone_ok = monotone_ok && sum_S(tr) == sum_S(seq);
        auto a = seq, b = tr;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        multiset_ok = multiset_ok && a == b;
    }
    log.check(monotone_ok, "transform strictly lowers S whenever it moves");
    log.check(multiset_ok, "transform preserves the multiset");

    bool star_ok = true;
    for (int n = 1; n <= 6; ++n)
        for (int64_t t = n; t <= 36; t += n) {
            std::vector<int> blocks;
            for (int v = 0; v < n; ++v)
                blocks.insert(blocks.end(), static_cast<size_t>(t / n), v);
            star_ok = star_ok && msbound(blocks, t) == epsilon_star(n, t);
        }
    log.check(star_ok, "msbound of uniform blocks equals epsilon_star");

    MinSResult r42 = brute_force_min_S(4, 2, MinSMode::BlockCompositions);
    MinSResult r52 = brute_force_min_S(5, 2, MinSMode::BlockCompositions);
    log.check(r42.min_S == 12 && r42.argmin_compositions.size() == 1,
              "t=4 n=2 has the unique uniform minimizer");
    log.check(r52.min_S == 19 && r52.argmin_compositions.size() == 2,
              "t=5 n=2 splits the minimum across (2,3) and (3,2)");

    bool distinct_ok = true;
    const int max_t = quick ? 6 : 8;
    for (int n = 1; n <= 3; ++n)
        for (int t = 1; t <= max_t; ++t) {
            MinSResult res = brute_force_min_S(t, n, MinSMode::AllSequences);
            distinct_ok = distinct_ok && res.all_minimizers_block_form;
            for (const auto& comp : res.argmin_compositions)
                distinct_ok = distinct_ok &&
                              static_cast<int>(comp.size()) == std::min(n, t);
        }
    log.check(distinct_ok, "exhaustive minimizers use exactly min(n,t) values");

    bool certify_ok = true;
    const int games = quick ? 3 : 10;
    for (int it = 0; it < games; ++it) {
        BimatrixGame g = build_random(rng.next(), 5, 5, 16);
        FPState st = init(g, FPConfig{});
        Trace tr = run(st, 500);
        certify_ok = certify_ok && certify_trace_bound(g, tr, 5).pass;
    }
    log.check(certify_ok, "trace bounds certify on random unit-range games");
    return log.ok;
}

}  // namespace fplab::suites
