#include "fplab/engine.hpp"

#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fplab {

bool is_pow2(int64_t t) { return t > 0 && (t & (t - 1)) == 0; }

void Trace::push(int row_action, int col_action, int64_t length) {
    if (length < 1) throw std::invalid_argument("trace: run length must be >= 1");
    if (!runs.empty() && runs.back().row_action == row_action &&
        runs.back().col_action == col_action) {
        runs.back().length += length;
    } else {
        runs.push_back({row_action, col_action, length});
    }
    total_t += length;
}

void Trace::append(const Trace& tail) {
    for (const auto& r : tail.runs) push(r.row_action, r.col_action, r.length);
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
    out << "row_action,col_action,length\n";
    for (const auto& r : trace.runs)
        out << (r.row_action + 1) << ',' << (r.col_action + 1) << ','
            << r.length << '\n';
}

void write_trace_csv_file(const Trace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_trace_csv(trace, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

Trace read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("trace csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "row_action,col_action,length")
        throw std::runtime_error("trace csv: bad header '" + line + "'");
    Trace tr;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        long long row, col, len;
        char c1, c2;
        std::istringstream ss(line);
        if (!(ss >> row >> c1 >> col >> c2 >> len) || c1 != ',' || c2 != ',' ||
            row < 1 || col < 1 || len < 1)
            throw std::runtime_error("trace csv: bad row at line " +
                                     std::to_string(lineno));
        tr.push(static_cast<int>(row - 1), static_cast<int>(col - 1), len);
    }
    return tr;
}

Trace read_trace_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return read_trace_csv(in);
}

namespace {

uint64_t fnv1a(const std::string& bytes) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

BigInt lcm_of_denominators(const BimatrixGame& game, Player p) {
    BigInt d = 1;
    for (int i = 0; i < game.rows(); ++i)
        for (int j = 0; j < game.cols(); ++j)
            d = boost::multiprecision::lcm(d, game.payoff(p, i, j).den());
    return d;
}

template <class T>
std::pair<int, bool> argmax_with_tie(const std::vector<T>& values, TieRule rule,
                                     int incumbent) {
    int best = 0;
    bool tie = false;
    const int size = static_cast<int>(values.size());
    for (int i = 1; i < size; ++i) {
        if (values[i] > values[best]) {
            best = i;
            tie = false;
        } else if (values[i] == values[best]) {
            tie = true;
        }
    }
    int chosen = best;  // lowest index attaining the max
    if (tie) {
        switch (rule) {
            case TieRule::LowestIndex:
                break;
            case TieRule::HighestIndex:
                for (int i = size - 1; i > best; --i)
                    if (values[i] == values[best]) {
                        chosen = i;
                        break;
                    }
                break;
            case TieRule::IncumbentThenLowest:
                if (incumbent >= 0 && incumbent < size &&
                    values[incumbent] == values[best])
                    chosen = incumbent;
                break;
        }
    }
    return {chosen, tie};
}

}  // namespace

struct ScaledTables {
    int m = 0, n = 0;
    BigInt d_row, d_col;
    Rational width_row, width_col;
    uint64_t game_fingerprint = 0;

    bool small_ok = false;
    int64_t max_abs_small = 0;
    std::vector<int64_t> r_bycol_s;  // [col * m + row] = d_row * R[row][col]
    std::vector<int64_t> c_byrow_s;  // [row * n + col] = d_col * C[row][col]
    std::vector<BigInt> r_bycol_b;
    std::vector<BigInt> c_byrow_b;

    static std::shared_ptr<const ScaledTables> build(const BimatrixGame& game);
};

std::shared_ptr<const ScaledTables> ScaledTables::build(
    const BimatrixGame& game) {
    auto tb = std::make_shared<ScaledTables>();
    tb->m = game.rows();
    tb->n = game.cols();
    tb->d_row = lcm_of_denominators(game, Player::Row);
    tb->d_col = lcm_of_denominators(game, Player::Col);
    tb->width_row = game.range_width(Player::Row);
    tb->width_col = game.range_width(Player::Col);

    const size_t cells = static_cast<size_t>(tb->m) * tb->n;
    tb->r_bycol_b.resize(cells);
    tb->c_byrow_b.resize(cells);
    BigInt max_abs = 0;
    for (int i = 0; i < tb->m; ++i)
        for (int j = 0; j < tb->n; ++j) {
            const Rational& r = game.row_payoff(i, j);
            const Rational& c = game.col_payoff(i, j);
            BigInt rv = r.num() * (tb->d_row / r.den());
            BigInt cv = c.num() * (tb->d_col / c.den());
            if (abs(rv) > max_abs) max_abs = abs(rv);
            if (abs(cv) > max_abs) max_abs = abs(cv);
            tb->r_bycol_b[static_cast<size_t>(j) * tb->m + i] = std::move(rv);
            tb->c_byrow_b[static_cast<size_t>(i) * tb->n + j] = std::move(cv);
        }

    tb->small_ok = max_abs <= BigInt(std::numeric_limits<int64_t>::max());
    if (tb->small_ok) {
        tb->max_abs_small = max_abs.convert_to<int64_t>();
        tb->r_bycol_s.resize(cells);
        tb->c_byrow_s.resize(cells);
        for (size_t i = 0; i < cells; ++i) {
            tb->r_bycol_s[i] = tb->r_bycol_b[i].convert_to<int64_t>();
            tb->c_byrow_s[i] = tb->c_byrow_b[i].convert_to<int64_t>();
        }
    }

    std::ostringstream canon;
    canon << tb->m << ' ' << tb->n << '\n';
    for (int i = 0; i < tb->m; ++i)
        for (int j = 0; j < tb->n; ++j)
            canon << game.row_payoff(i, j).str() << ' '
                  << game.col_payoff(i, j).str() << '\n';
    tb->game_fingerprint = fnv1a(canon.str());
    return tb;
}

int FPState::rows() const { return tables_->m; }
int FPState::cols() const { return tables_->n; }
const BigInt& FPState::row_scale() const { return tables_->d_row; }
const BigInt& FPState::col_scale() const { return tables_->d_col; }

BigInt FPState::acc_row_value(int strategy) const {
    return big_ ? acc_row_b_[strategy] : BigInt(acc_row_s_[strategy]);
}

BigInt FPState::acc_col_value(int strategy) const {
    return big_ ? acc_col_b_[strategy] : BigInt(acc_col_s_[strategy]);
}

void FPState::promote_if_needed(int64_t target_t) {
    if (big_ || target_t <= small_step_limit_) return;
    big_ = true;
    acc_row_b_.assign(acc_row_s_.begin(), acc_row_s_.end());
    acc_col_b_.assign(acc_col_s_.begin(), acc_col_s_.end());
    acc_row_s_.clear();
    acc_col_s_.clear();
}

FPState init(const BimatrixGame& game, const FPConfig& config) {
    if (config.initial_row < 0 || config.initial_row >= game.rows() ||
        config.initial_col < 0 || config.initial_col >= game.cols())
        throw std::invalid_argument("init: initial action out of bounds");

    FPState st;
    st.config = config;
    st.tables_ = ScaledTables::build(game);
    const ScaledTables& tb = *st.tables_;

    st.t = 1;
    st.last_row = config.initial_row;
    st.last_col = config.initial_col;
    st.counts_row.assign(tb.m, 0);
    st.counts_col.assign(tb.n, 0);
    st.counts_row[st.last_row] = 1;
    st.counts_col[st.last_col] = 1;

    if (tb.small_ok && !config.force_big_accumulators) {
        st.big_ = false;
        st.small_step_limit_ =
            (int64_t{1} << 62) / std::max<int64_t>(tb.max_abs_small, 1);
        st.acc_row_s_.assign(tb.r_bycol_s.begin() +
                                 static_cast<size_t>(st.last_col) * tb.m,
                             tb.r_bycol_s.begin() +
                                 static_cast<size_t>(st.last_col + 1) * tb.m);
        st.acc_col_s_.assign(tb.c_byrow_s.begin() +
                                 static_cast<size_t>(st.last_row) * tb.n,
                             tb.c_byrow_s.begin() +
                                 static_cast<size_t>(st.last_row + 1) * tb.n);
    } else {
        st.big_ = true;
        st.small_step_limit_ = 0;
        st.acc_row_b_.assign(tb.r_bycol_b.begin() +
                                 static_cast<size_t>(st.last_col) * tb.m,
                             tb.r_bycol_b.begin() +
                                 static_cast<size_t>(st.last_col + 1) * tb.m);
        st.acc_col_b_.assign(tb.c_byrow_b.begin() +
                                 static_cast<size_t>(st.last_row) * tb.n,
                             tb.c_byrow_b.begin() +
                                 static_cast<size_t>(st.last_row + 1) * tb.n);
    }
    return st;
}

StepRecord step(FPState& state) {
    if (state.t < 1) throw std::logic_error("step: state not initialized");
    const ScaledTables& tb = *state.tables_;
    state.promote_if_needed(state.t + 1);

    int row_action, col_action;
    bool row_tie, col_tie;
    if (state.big_) {
        std::tie(row_action, row_tie) = argmax_with_tie(
            state.acc_row_b_, state.config.tie_rule, state.last_row);
        std::tie(col_action, col_tie) = argmax_with_tie(
            state.acc_col_b_, state.config.tie_rule, state.last_col);
        const BigInt* rcol = &tb.r_bycol_b[static_cast<size_t>(col_action) * tb.m];
        const BigInt* crow = &tb.c_byrow_b[static_cast<size_t>(row_action) * tb.n];
        for (int i = 0; i < tb.m; ++i) state.acc_row_b_[i] += rcol[i];
        for (int j = 0; j < tb.n; ++j) state.acc_col_b_[j] += crow[j];
    } else {
        std::tie(row_action, row_tie) = argmax_with_tie(
            state.acc_row_s_, state.config.tie_rule, state.last_row);
        std::tie(col_action, col_tie) = argmax_with_tie(
            state.acc_col_s_, state.config.tie_rule, state.last_col);
        const int64_t* rcol = &tb.r_bycol_s[static_cast<size_t>(col_action) * tb.m];
        const int64_t* crow = &tb.c_byrow_s[static_cast<size_t>(row_action) * tb.n];
        for (int i = 0; i < tb.m; ++i) state.acc_row_s_[i] += rcol[i];
        for (int j = 0; j < tb.n; ++j) state.acc_col_s_[j] += crow[j];
    }

    state.t += 1;
    state.counts_row[row_action] += 1;
    state.counts_col[col_action] += 1;
    state.last_row = row_action;
    state.last_col = col_action;
    return {state.t, row_action, col_action, row_tie, col_tie};
}

Trace run(FPState& state, int64_t total_steps, RunRecorder* recorder) {
    if (total_steps < state.t)
        throw std::invalid_argument("run: target step precedes current state");
    Trace trace;
    const EpsSchedule schedule = state.config.epsilon_schedule;
    auto want_sample = [&](bool block_start) {
        switch (schedule) {
            case EpsSchedule::EveryStep: return true;
            case EpsSchedule::Blocks: return block_start || is_pow2(state.t);
            case EpsSchedule::Pow2: return is_pow2(state.t);
            case EpsSchedule::None: return false;
        }
        return false;
    };
    auto sample = [&](bool block_start) {
        if (recorder && want_sample(block_start))
            recorder->epsilons.push_back(epsilon_now(state));
    };

    if (state.t == 1) {
        trace.push(state.last_row, state.last_col);
        sample(true);
    }
    while (state.t < total_steps) {
        const int prev_row = state.last_row;
        const int prev_col = state.last_col;
        StepRecord rec = step(state);
        trace.push(rec.row_action, rec.col_action);
        if (recorder) {
            recorder->ties_row += rec.row_tie ? 1 : 0;
            recorder->ties_col += rec.col_tie ? 1 : 0;
        }
        sample(rec.row_action != prev_row || rec.col_action != prev_col);
    }
    if (recorder && schedule != EpsSchedule::None &&
        (recorder->epsilons.empty() || recorder->epsilons.back().t != state.t))
        recorder->epsilons.push_back(epsilon_now(state));
    return trace;
}

Trace oracle_run(const BimatrixGame& game, const FPConfig& config,
                 int64_t total_steps) {
    if (config.initial_row < 0 || config.initial_row >= game.rows() ||
        config.initial_col < 0 || config.initial_col >= game.cols())
        throw std::invalid_argument("oracle_run: initial action out of bounds");
    if (total_steps < 1)
        throw std::invalid_argument("oracle_run: need at least one step");

    const int m = game.rows(), n = game.cols();
    // Own scaling, kept deliberately separate from the engine's tables.
    BigInt dr = lcm_of_denominators(game, Player::Row);
    BigInt dc = lcm_of_denominators(game, Player::Col);
    std::vector<BigInt> rs(static_cast<size_t>(m) * n);
    std::vector<BigInt> cs(static_cast<size_t>(m) * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            const Rational& r = game.row_payoff(i, j);
            const Rational& c = game.col_payoff(i, j);
            rs[static_cast<size_t>(i) * n + j] = r.num() * (dr / r.den());
            cs[static_cast<size_t>(i) * n + j] = c.num() * (dc / c.den());
        }

    std::vector<int64_t> counts_row(m, 0), counts_col(n, 0);
    int last_row = config.initial_row, last_col = config.initial_col;
    counts_row[last_row] = 1;
    counts_col[last_col] = 1;
    Trace trace;
    trace.push(last_row, last_col);

    std::vector<BigInt> row_vals(m), col_vals(n);
    for (int64_t t = 2; t <= total_steps; ++t) {
        for (int i = 0; i < m; ++i) {
            BigInt sum = 0;
            const BigInt* row = &rs[static_cast<size_t>(i) * n];
            for (int j = 0; j < n; ++j)
                if (counts_col[j]) sum += counts_col[j] * row[j];
            row_vals[i] = std::move(sum);
        }
        for (int j = 0; j < n; ++j) {
            BigInt sum = 0;
            for (int i = 0; i < m; ++i)
                if (counts_row[i]) sum += counts_row[i] * cs[static_cast<size_t>(i) * n + j];
            col_vals[j] = std::move(sum);
        }
        auto [ra, rt] = argmax_with_tie(row_vals, config.tie_rule, last_row);
        auto [ca, ct] = argmax_with_tie(col_vals, config.tie_rule, last_col);
        (void)rt;
        (void)ct;
        counts_row[ra] += 1;
        counts_col[ca] += 1;
        last_row = ra;
        last_col = ca;
        trace.push(ra, ca);
    }
    return trace;
}

MixedStrategy state_probabilities(const FPState& state, Player player) {
    const auto& counts =
        player == Player::Row ? state.counts_row : state.counts_col;
    return MixedStrategy::from_counts(counts, state.t);
}

EpsilonPoint epsilon_now(const FPState& state) {
    const ScaledTables& tb = *state.tables_;
    const BigInt t(state.t);
    auto one_side = [&](const std::vector<int64_t>& counts, int size,
                        auto acc_at, const BigInt& scale,
                        const Rational& width) {
        BigInt best = acc_at(0);
        for (int i = 1; i < size; ++i) {
            BigInt v = acc_at(i);
            if (v > best) best = v;
        }
        BigInt own_dot = 0;
        for (int i = 0; i < size; ++i)
            if (counts[i]) own_dot += BigInt(counts[i]) * acc_at(i);
        Rational raw(best * t - own_dot, scale * t * t);
        Rational norm = width.is_zero() ? Rational(0) : raw / width;
        return std::make_pair(raw, norm);
    };
    EpsilonPoint pt;
    pt.t = state.t;
    auto [rr, rn] = one_side(
        state.counts_row, tb.m,
        [&](int i) { return state.acc_row_value(i); }, tb.d_row, tb.width_row);
    auto [cr, cn] = one_side(
        state.counts_col, tb.n,
        [&](int i) { return state.acc_col_value(i); }, tb.d_col, tb.width_col);
    pt.row_raw = rr;
    pt.row_norm = rn;
    pt.col_raw = cr;
    pt.col_norm = cn;
    return pt;
}

std::string checkpoint(const FPState& state) {
    const ScaledTables& tb = *state.tables_;
    std::ostringstream out;
    out << "fpstate 1\n";
    out << static_cast<int>(state.config.tie_rule) << ' '
        << static_cast<int>(state.config.epsilon_schedule) << ' '
        << (state.config.force_big_accumulators ? 1 : 0) << ' '
        << state.config.initial_row << ' ' << state.config.initial_col << '\n';
    out << tb.m << ' ' << tb.n << ' ' << tb.d_row << ' ' << tb.d_col << ' '
        << tb.game_fingerprint << '\n';
    out << state.t << ' ' << state.last_row << ' ' << state.last_col << ' '
        << (state.big_ ? 1 : 0) << '\n';
    auto dump_counts = [&](const std::vector<int64_t>& v) {
        for (size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
        out << '\n';
    };
    dump_counts(state.counts_row);
    dump_counts(state.counts_col);
    auto dump_acc = [&](int size, auto acc_at) {
        for (int i = 0; i < size; ++i)
            out << (i ? " " : "") << acc_at(i);
        out << '\n';
    };
    dump_acc(tb.m, [&](int i) { return state.acc_row_value(i); });
    dump_acc(tb.n, [&](int i) { return state.acc_col_value(i); });
    return out.str();
}

FPState restore(const BimatrixGame& game, const std::string& snapshot) {
    std::istringstream in(snapshot);
    auto fail = [](const std::string& why) -> void {
        throw std::runtime_error("restore: " + why);
    };
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version)) fail("truncated header");
    if (magic != "fpstate") fail("bad magic '" + magic + "'");
    if (version != 1) fail("unsupported version " + std::to_string(version));

    int tie, sched, force_big, init_row, init_col;
    if (!(in >> tie >> sched >> force_big >> init_row >> init_col))
        fail("truncated config");
    if (tie < 0 || tie > 2 || sched < 0 || sched > 3) fail("bad config enum");

    int m, n;
    BigInt d_row, d_col;
    uint64_t fingerprint;
    if (!(in >> m >> n >> d_row >> d_col >> fingerprint))
        fail("truncated game header");

    FPConfig cfg;
    cfg.tie_rule = static_cast<TieRule>(tie);
    cfg.epsilon_schedule = static_cast<EpsSchedule>(sched);
    cfg.force_big_accumulators = force_big != 0;
    cfg.initial_row = init_row;
    cfg.initial_col = init_col;

    FPState st;
    st.config = cfg;
    st.tables_ = ScaledTables::build(game);
    const ScaledTables& tb = *st.tables_;
    if (tb.m != m || tb.n != n || tb.d_row != d_row || tb.d_col != d_col ||
        tb.game_fingerprint != fingerprint)
        fail("snapshot does not match this game");

    int big;
    if (!(in >> st.t >> st.last_row >> st.last_col >> big)) fail("truncated state");
    if (st.t < 1 || st.last_row < 0 || st.last_row >= m || st.last_col < 0 ||
        st.last_col >= n)
        fail("state fields out of range");

    auto read_counts = [&](std::vector<int64_t>& v, int size) {
        v.resize(size);
        int64_t sum = 0;
        for (int i = 0; i < size; ++i) {
            if (!(in >> v[i]) || v[i] < 0) fail("bad counts");
            sum += v[i];
        }
        if (sum != st.t) fail("counts do not sum to t");
    };
    read_counts(st.counts_row, m);
    read_counts(st.counts_col, n);

    st.big_ = big != 0 || !tb.small_ok || cfg.force_big_accumulators;
    st.small_step_limit_ =
        tb.small_ok ? (int64_t{1} << 62) / std::max<int64_t>(tb.max_abs_small, 1)
                    : 0;
    auto read_acc_big = [&](std::vector<BigInt>& v, int size) {
        v.resize(size);
        for (int i = 0; i < size; ++i)
            if (!(in >> v[i])) fail("bad accumulator");
    };
    if (st.big_) {
        read_acc_big(st.acc_row_b_, m);
        read_acc_big(st.acc_col_b_, n);
    } else {
        std::vector<BigInt> row, col;
        read_acc_big(row, m);
        read_acc_big(col, n);
        st.acc_row_s_.resize(m);
        st.acc_col_s_.resize(n);
        for (int i = 0; i < m; ++i) st.acc_row_s_[i] = row[i].convert_to<int64_t>();
        for (int j = 0; j < n; ++j) st.acc_col_s_[j] = col[j].convert_to<int64_t>();
    }
    return st;
}

}  // namespace fplab
