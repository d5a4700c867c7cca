#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fplab/rational.hpp"

namespace fplab {

enum class Player { Row, Col };

constexpr Player opponent_of(Player p) {
    return p == Player::Row ? Player::Col : Player::Row;
}

/// Probability distribution over one player's pure strategies.
/// Entries are exact rationals, nonnegative, summing to exactly 1.
struct MixedStrategy {
    std::vector<Rational> probs;

    int size() const { return static_cast<int>(probs.size()); }

    /// Throws std::invalid_argument if entries are negative or do not sum to 1.
    void validate() const;

    static MixedStrategy point_mass(int index, int size);
    static MixedStrategy uniform(int size);
    static MixedStrategy uniform_over(const std::vector<int>& support, int size);
    static MixedStrategy from_counts(const std::vector<int64_t>& counts,
                                     int64_t total);
};

/// Two-player normal-form game. R holds the row player's payoffs, C the
/// column player's, both m x n with exact rational entries. Per-player
/// payoff ranges are cached at construction.
class BimatrixGame {
public:
    BimatrixGame(std::vector<std::vector<Rational>> r_rows,
                 std::vector<std::vector<Rational>> c_rows);

    int rows() const { return m_; }
    int cols() const { return n_; }

    const Rational& row_payoff(int i, int j) const { return r_[idx(i, j)]; }
    const Rational& col_payoff(int i, int j) const { return c_[idx(i, j)]; }
    const Rational& payoff(Player p, int i, int j) const {
        return p == Player::Row ? row_payoff(i, j) : col_payoff(i, j);
    }

    int strategy_count(Player p) const { return p == Player::Row ? m_ : n_; }

    /// Cached (min, max) over the player's own matrix.
    std::pair<Rational, Rational> payoff_range(Player p) const {
        return p == Player::Row ? std::make_pair(rmin_, rmax_)
                                : std::make_pair(cmin_, cmax_);
    }
    Rational range_width(Player p) const {
        auto [lo, hi] = payoff_range(p);
        return hi - lo;
    }

    bool operator==(const BimatrixGame& o) const {
        return m_ == o.m_ && n_ == o.n_ && r_ == o.r_ && c_ == o.c_;
    }

private:
    size_t idx(int i, int j) const { return static_cast<size_t>(i) * n_ + j; }

    int m_, n_;
    std::vector<Rational> r_, c_;  // row-major
    Rational rmin_, rmax_, cmin_, cmax_;
};

/// Validating constructor wrapper. Throws std::invalid_argument on empty or
/// mismatched matrices.
BimatrixGame make_game(std::vector<std::vector<Rational>> r_rows,
                       std::vector<std::vector<Rational>> c_rows);

/// Exact bilinear payoff of `player` under the profile (row_mix, col_mix).
Rational expected_payoff(const BimatrixGame& game, Player player,
                         const MixedStrategy& row_mix,
                         const MixedStrategy& col_mix);

/// Entry s = payoff of the player's pure strategy s against opp_mix.
std::vector<Rational> payoff_vector(const BimatrixGame& game, Player player,
                                    const MixedStrategy& opp_mix);

/// All strategies attaining the exact maximum of payoff_vector, ascending.
/// Ties are never broken here; tie policy belongs to the engine.
std::vector<int> best_response_set(const BimatrixGame& game, Player player,
                                   const MixedStrategy& opp_mix);

struct Regret {
    Rational raw;         // best-response payoff minus own payoff
    Rational normalized;  // raw / payoff range width (0 when width is 0)
};

Regret regret(const BimatrixGame& game, Player player,
              const MixedStrategy& own_mix, const MixedStrategy& opp_mix);

/// Affinely maps each player's payoffs onto [0,1] via x -> (x-min)/(max-min).
/// A constant matrix maps to all zeros.
BimatrixGame normalize_to_unit(const BimatrixGame& game);

}  // namespace fplab
