#include "fplab/bounds.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>

namespace fplab {

std::vector<int64_t> last_occurrences(const std::vector<int>& seq) {
    if (seq.empty())
        throw std::invalid_argument("last_occurrences: empty sequence");
    std::map<int, int64_t> last;
    for (size_t i = 0; i < seq.size(); ++i)
        last[seq[i]] = static_cast<int64_t>(i) + 1;
    std::vector<int64_t> f(seq.size());
    for (size_t i = 0; i < seq.size(); ++i) f[i] = last[seq[i]];
    return f;
}

int64_t sum_S(const std::vector<int>& seq) {
    auto f = last_occurrences(seq);
    int64_t s = 0;
    for (int64_t v : f) s += v;
    return s;
}

SequenceStats sequence_stats(std::vector<int> seq) {
    SequenceStats st;
    st.f = last_occurrences(seq);
    st.S = 0;
    for (int64_t v : st.f) st.S += v;
    st.seq = std::move(seq);
    return st;
}

Rational msbound(const std::vector<int>& seq, int64_t t) {
    if (static_cast<int64_t>(seq.size()) != t)
        throw std::invalid_argument("msbound: sequence length differs from t");
    BigInt tt = BigInt(t) * t;
    return Rational(tt + t - sum_S(seq), tt);
}

std::vector<int> last_occurrence_transform(const std::vector<int>& seq) {
    if (seq.empty())
        throw std::invalid_argument("transform: empty sequence");
    std::map<int, int64_t> last;
    std::map<int, int64_t> count;
    for (size_t i = 0; i < seq.size(); ++i) {
        last[seq[i]] = static_cast<int64_t>(i) + 1;
        ++count[seq[i]];
    }
    std::vector<std::pair<int64_t, int>> order;  // (last occurrence, value)
    order.reserve(last.size());
    for (const auto& [value, pos] : last) order.emplace_back(pos, value);
    std::sort(order.begin(), order.end());
    std::vector<int> out;
    out.reserve(seq.size());
    for (const auto& [pos, value] : order)
        out.insert(out.end(), static_cast<size_t>(count[value]), value);
    return out;
}

namespace {

// S of a block-form sequence given its composition: block u (1-based) ends at
// prefix(u), and each of its c_u members has last occurrence prefix(u).
int64_t composition_S(const std::vector<int64_t>& comp) {
    int64_t prefix = 0, s = 0;
    for (int64_t c : comp) {
        prefix += c;
        s += c * prefix;
    }
    return s;
}

void enumerate_compositions(int64_t t, int n,
                            const std::function<void(const std::vector<int64_t>&)>& fn) {
    std::vector<int64_t> comp(n, 1);
    // odometer over compositions of t into n positive parts
    std::function<void(int, int64_t)> rec = [&](int pos, int64_t remaining) {
        if (pos == n - 1) {
            comp[pos] = remaining;
            fn(comp);
            return;
        }
        for (int64_t c = 1; c <= remaining - (n - 1 - pos); ++c) {
            comp[pos] = c;
            rec(pos + 1, remaining - c);
        }
    };
    rec(0, t);
}

MinSResult min_s_block_mode(int64_t t, int n) {
    MinSResult res;
    res.t = t;
    res.n = n;
    bool have = false;
    enumerate_compositions(t, n, [&](const std::vector<int64_t>& comp) {
        int64_t s = composition_S(comp);
        if (!have || s < res.min_S) {
            res.min_S = s;
            res.argmin_compositions.clear();
            res.argmin_compositions.push_back(comp);
            have = true;
        } else if (s == res.min_S) {
            res.argmin_compositions.push_back(comp);
        }
    });
    std::sort(res.argmin_compositions.begin(), res.argmin_compositions.end());
    return res;
}

MinSResult min_s_all_sequences(int64_t t, int n) {
    MinSResult res;
    res.t = t;
    res.n = n;
    const int len = static_cast<int>(t);
    std::vector<int> seq(len, 0);
    std::vector<int64_t> last(n);
    bool have = false;
    std::vector<std::vector<int64_t>> comps;

    auto eval = [&]() {
        std::fill(last.begin(), last.end(), 0);
        for (int i = len - 1; i >= 0; --i)
            if (last[seq[i]] == 0) last[seq[i]] = i + 1;
        int64_t s = 0;
        for (int i = 0; i < len; ++i) s += last[seq[i]];
        return s;
    };
    auto record = [&]() {
        // canonical form: run lengths; block form means no value repeats
        // across separate runs
        std::vector<int64_t> comp;
        std::vector<bool> seen(n, false);
        bool block_form = true;
        for (int i = 0; i < len;) {
            int j = i;
            while (j < len && seq[j] == seq[i]) ++j;
            if (seen[seq[i]]) block_form = false;
            seen[seq[i]] = true;
            comp.push_back(j - i);
            i = j;
        }
        if (!block_form) {
            res.all_minimizers_block_form = false;
            return;
        }
        comps.push_back(std::move(comp));
    };

    for (;;) {
        int64_t s = eval();
        if (!have || s < res.min_S) {
            res.min_S = s;
            comps.clear();
            res.all_minimizers_block_form = true;
            record();
            have = true;
        } else if (s == res.min_S) {
            record();
        }
        int pos = len - 1;
        while (pos >= 0 && seq[pos] == n - 1) seq[pos--] = 0;
        if (pos < 0) break;
        ++seq[pos];
    }

    std::sort(comps.begin(), comps.end());
    comps.erase(std::unique(comps.begin(), comps.end()), comps.end());
    res.argmin_compositions = std::move(comps);
    return res;
}

}  // namespace

MinSResult brute_force_min_S(int64_t t, int n, MinSMode mode) {
    if (mode == MinSMode::BlockCompositions) {
        if (n < 1 || n > 8 || t < n || t > 40)
            throw std::invalid_argument(
                "brute_force_min_S: block mode requires n <= t <= 40, n <= 8");
        return min_s_block_mode(t, n);
    }
    if (n < 1 || n > 4 || t < 1 || t > 10)
        throw std::invalid_argument(
            "brute_force_min_S: all-sequences mode requires t <= 10, n <= 4");
    return min_s_all_sequences(t, n);
}

Rational epsilon_star(int n, int64_t t) {
    if (n < 1 || t < 1)
        throw std::invalid_argument("epsilon_star: n and t must be >= 1");
    if (t % n != 0) {
        int64_t lower = t - t % n;
        int64_t upper = lower + n;
        std::string near = lower >= n ? std::to_string(lower) + " or " +
                                            std::to_string(upper)
                                      : std::to_string(upper);
        throw std::invalid_argument("epsilon_star: t=" + std::to_string(t) +
                                    " is not divisible by n=" +
                                    std::to_string(n) +
                                    "; nearest valid t: " + near);
    }
    return Rational(1, 2) + Rational(1, t) - Rational(1, 2LL * n);
}

void write_min_s_csv(const MinSResult& result, std::ostream& out) {
    out << "t,n,min_S,composition\n";
    for (const auto& comp : result.argmin_compositions) {
        out << result.t << ',' << result.n << ',' << result.min_S << ',';
        for (size_t i = 0; i < comp.size(); ++i)
            out << (i ? " " : "") << comp[i];
        out << '\n';
    }
}

CertifyReport certify_trace_bound(const BimatrixGame& game, const Trace& trace,
                                  int64_t stride) {
    if (stride < 1)
        throw std::invalid_argument("certify_trace_bound: stride must be >= 1");
    for (Player p : {Player::Row, Player::Col}) {
        auto [lo, hi] = game.payoff_range(p);
        if (lo < Rational(0) || hi > Rational(1))
            throw std::invalid_argument(
                "certify_trace_bound: payoffs outside [0,1]; normalize the "
                "game first");
    }
    if (trace.total_t > 1000000000LL)
        throw std::invalid_argument("certify_trace_bound: trace too long");

    const int m = game.rows(), n = game.cols();
    std::vector<int64_t> counts_row(m, 0), counts_col(n, 0);
    LastOccurrenceScore s_row(m), s_col(n);

    CertifyReport rep;
    rep.pass = true;
    bool have_margin = false;
    auto check = [&](const Rational& eps, const Rational& bound, int64_t t,
                     const char* what, Player p) {
        Rational margin = bound - eps;
        if (!have_margin || margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_at = std::string(what) + " t=" + std::to_string(t) +
                           (p == Player::Row ? " row" : " col");
            have_margin = true;
        }
        if (eps > bound) {
            rep.pass = false;
            ++rep.violations;
        }
    };

    int64_t t = 0;
    for (const auto& run : trace.runs) {
        if (run.row_action < 0 || run.row_action >= m || run.col_action < 0 ||
            run.col_action >= n)
            throw std::invalid_argument(
                "certify_trace_bound: trace action out of game bounds");
        for (int64_t i = 0; i < run.length; ++i) {
            ++t;
            int a = run.row_action, b = run.col_action;
            s_row.push(a);
            s_col.push(b);
            counts_row[a] += 1;
            counts_col[b] += 1;
            if (t % stride != 0) continue;

            ++rep.samples;
            MixedStrategy rm = MixedStrategy::from_counts(counts_row, t);
            MixedStrategy cm = MixedStrategy::from_counts(counts_col, t);
            Rational eps_row = regret(game, Player::Row, rm, cm).raw;
            Rational eps_col = regret(game, Player::Col, cm, rm).raw;

            BigInt tt = BigInt(t) * t;
            check(eps_row, Rational(tt + t - s_row.score(), tt), t, "msbound",
                  Player::Row);
            check(eps_col, Rational(tt + t - s_col.score(), tt), t, "msbound",
                  Player::Col);
            if (t % m == 0)
                check(eps_row, epsilon_star(m, t), t, "epsilon_star",
                      Player::Row);
            if (t % n == 0)
                check(eps_col, epsilon_star(n, t), t, "epsilon_star",
                      Player::Col);
        }
    }
    return rep;
}

}  // namespace fplab
