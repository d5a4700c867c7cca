#include "fplab/game.hpp"

#include <stdexcept>
#include <string>

namespace fplab {

void MixedStrategy::validate() const {
    if (probs.empty())
        throw std::invalid_argument("mixed strategy: empty");
    Rational sum;
    for (const auto& p : probs) {
        if (p.sign() < 0)
            throw std::invalid_argument("mixed strategy: negative probability");
        sum += p;
    }
    if (sum != Rational(1))
        throw std::invalid_argument("mixed strategy: probabilities sum to " +
                                    sum.str() + ", expected 1");
}

MixedStrategy MixedStrategy::point_mass(int index, int size) {
    if (index < 0 || index >= size)
        throw std::invalid_argument("point mass index out of range");
    MixedStrategy m;
    m.probs.assign(size, Rational(0));
    m.probs[index] = Rational(1);
    return m;
}

MixedStrategy MixedStrategy::uniform(int size) {
    MixedStrategy m;
    m.probs.assign(size, Rational(1, size));
    return m;
}

MixedStrategy MixedStrategy::uniform_over(const std::vector<int>& support,
                                          int size) {
    if (support.empty())
        throw std::invalid_argument("uniform_over: empty support");
    MixedStrategy m;
    m.probs.assign(size, Rational(0));
    Rational w(1, static_cast<long long>(support.size()));
    for (int s : support) {
        if (s < 0 || s >= size)
            throw std::invalid_argument("uniform_over: index out of range");
        m.probs[s] = w;
    }
    return m;
}

MixedStrategy MixedStrategy::from_counts(const std::vector<int64_t>& counts,
                                         int64_t total) {
    if (total <= 0) throw std::invalid_argument("from_counts: total must be positive");
    MixedStrategy m;
    m.probs.reserve(counts.size());
    for (int64_t c : counts) m.probs.emplace_back(c, total);
    return m;
}

BimatrixGame::BimatrixGame(std::vector<std::vector<Rational>> r_rows,
                           std::vector<std::vector<Rational>> c_rows) {
    if (r_rows.empty() || r_rows[0].empty())
        throw std::invalid_argument("game: empty payoff matrix");
    m_ = static_cast<int>(r_rows.size());
    n_ = static_cast<int>(r_rows[0].size());
    if (c_rows.size() != r_rows.size())
        throw std::invalid_argument("game: R and C row counts differ");
    auto flatten = [&](std::vector<std::vector<Rational>>& rows,
                       std::vector<Rational>& flat, Rational& lo, Rational& hi) {
        flat.reserve(static_cast<size_t>(m_) * n_);
        for (auto& row : rows) {
            if (static_cast<int>(row.size()) != n_)
                throw std::invalid_argument("game: ragged or mismatched matrix");
            for (auto& v : row) flat.push_back(std::move(v));
        }
        lo = hi = flat[0];
        for (const auto& v : flat) {
            if (v < lo) lo = v;
            if (v > hi) hi = v;
        }
    };
    flatten(r_rows, r_, rmin_, rmax_);
    flatten(c_rows, c_, cmin_, cmax_);
}

BimatrixGame make_game(std::vector<std::vector<Rational>> r_rows,
                       std::vector<std::vector<Rational>> c_rows) {
    return BimatrixGame(std::move(r_rows), std::move(c_rows));
}

namespace {

void check_mix(const MixedStrategy& mix, int expected, const char* what) {
    if (mix.size() != expected)
        throw std::invalid_argument(std::string(what) + ": length " +
                                    std::to_string(mix.size()) + ", expected " +
                                    std::to_string(expected));
}

}  // namespace

Rational expected_payoff(const BimatrixGame& game, Player player,
                         const MixedStrategy& row_mix,
                         const MixedStrategy& col_mix) {
    check_mix(row_mix, game.rows(), "row mix");
    check_mix(col_mix, game.cols(), "col mix");
    Rational total;
    for (int i = 0; i < game.rows(); ++i) {
        if (row_mix.probs[i].is_zero()) continue;
        Rational row_sum;
        for (int j = 0; j < game.cols(); ++j) {
            if (col_mix.probs[j].is_zero()) continue;
            row_sum += game.payoff(player, i, j) * col_mix.probs[j];
        }
        total += row_mix.probs[i] * row_sum;
    }
    return total;
}

std::vector<Rational> payoff_vector(const BimatrixGame& game, Player player,
                                    const MixedStrategy& opp_mix) {
    const bool row = player == Player::Row;
    check_mix(opp_mix, row ? game.cols() : game.rows(), "opponent mix");
    const int own = game.strategy_count(player);
    const int opp = row ? game.cols() : game.rows();
    std::vector<Rational> out(own);
    for (int s = 0; s < own; ++s) {
        Rational sum;
        for (int o = 0; o < opp; ++o) {
            if (opp_mix.probs[o].is_zero()) continue;
            const Rational& pay =
                row ? game.row_payoff(s, o) : game.col_payoff(o, s);
            sum += pay * opp_mix.probs[o];
        }
        out[s] = std::move(sum);
    }
    return out;
}

std::vector<int> best_response_set(const BimatrixGame& game, Player player,
                                   const MixedStrategy& opp_mix) {
    auto pv = payoff_vector(game, player, opp_mix);
    Rational best = pv[0];
    for (const auto& v : pv)
        if (v > best) best = v;
    std::vector<int> out;
    for (int s = 0; s < static_cast<int>(pv.size()); ++s)
        if (pv[s] == best) out.push_back(s);
    return out;
}

Regret regret(const BimatrixGame& game, Player player,
              const MixedStrategy& own_mix, const MixedStrategy& opp_mix) {
    auto pv = payoff_vector(game, player, opp_mix);
    check_mix(own_mix, game.strategy_count(player), "own mix");
    Rational best = pv[0];
    Rational own;
    for (int s = 0; s < static_cast<int>(pv.size()); ++s) {
        if (pv[s] > best) best = pv[s];
        if (!own_mix.probs[s].is_zero()) own += own_mix.probs[s] * pv[s];
    }
    Regret r;
    r.raw = best - own;
    Rational width = game.range_width(player);
    r.normalized = width.is_zero() ? Rational(0) : r.raw / width;
    return r;
}

BimatrixGame normalize_to_unit(const BimatrixGame& game) {
    auto map_matrix = [&](Player p) {
        auto [lo, hi] = game.payoff_range(p);
        Rational width = hi - lo;
        std::vector<std::vector<Rational>> rows(game.rows());
        for (int i = 0; i < game.rows(); ++i) {
            rows[i].reserve(game.cols());
            for (int j = 0; j < game.cols(); ++j) {
                const Rational& v = game.payoff(p, i, j);
                rows[i].push_back(width.is_zero() ? Rational(0)
                                                  : (v - lo) / width);
            }
        }
        return rows;
    };
    return BimatrixGame(map_matrix(Player::Row), map_matrix(Player::Col));
}

}  // namespace fplab
