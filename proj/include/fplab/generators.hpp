#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "fplab/game.hpp"

namespace fplab {

/// Parameters of the cyclic 4n x 4n family. The family is parametrized by a
/// rational k > 1 with alpha = 1 + 1/k and beta = 1 - 1/k^2 so that every
/// derived quantity stays an exact rational. rho = (alpha-beta)/(alpha-1) is
/// the growth ratio of consecutive block lengths; rb = beta/(alpha-1).
struct GnParams {
    int n = 0;
    Rational alpha;
    Rational beta;
    Rational rho;
    Rational rb;
    std::optional<Rational> k;
    std::optional<double> delta_equiv;  // 1 - ln(k)/ln(n), reported only
    // rho^(n-1) * beta >= 1; when false the block-cycling regime is not
    // guaranteed and callers should warn.
    bool cycling_guard_ok = true;
};

/// k-coupled parameters: alpha = 1+1/k, beta = 1-1/k^2. Throws on n < 2 or
/// k <= 1.
GnParams gn_params(int n, const Rational& k);

/// Direct (alpha, beta) override; k and delta_equiv are left unset.
/// Requires alpha > 1 and 0 < beta < 1.
GnParams gn_params_from_alpha_beta(int n, const Rational& alpha,
                                   const Rational& beta);

/// Builds the 4n x 4n game: the row matrix follows the family's placement
/// rules applied in listed order with first match winning; the column matrix
/// is its transpose.
BimatrixGame build_gn(const GnParams& params);

/// Shapley's 3x3 cycling game.
BimatrixGame build_shapley();

/// 2x2 matching pennies (constant-sum form with payoffs in {0,1}).
BimatrixGame build_matching_pennies();

/// Deterministic random game: every entry is j/2^denom_bits with j drawn
/// uniformly from [0, 2^denom_bits] by splitmix64. Identical across platforms
/// for a given seed. Requires m,n >= 1 and 1 <= denom_bits <= 30.
BimatrixGame build_random(uint64_t seed, int m, int n, int denom_bits);

/// splitmix64 with the standard constants; used everywhere randomness is
/// needed so that runs reproduce bit-for-bit across languages and platforms.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound), rejection-sampled (no modulo bias).
    uint64_t below(uint64_t bound) {
        uint64_t limit = bound * (UINT64_MAX / bound);
        uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % bound;
    }
};

/// Parse failure for the game file format; carries 1-based line and column.
struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error("parse error at line " + std::to_string(line_) +
                             ", col " + std::to_string(col_) + ": " + msg),
          line(line_),
          col(col_) {}
};

// Game file format (.fpg), UTF-8 with LF line endings:
//   line 1: "fpg 1"
//   line 2: "<m> <n>"
//   m rows of n tokens for R, then m rows for C
// Tokens are signed integers or "p/q" with q > 0. Lines starting with '#'
// are ignored. read(write(g)) == g exactly.
void write_game(const BimatrixGame& game, std::ostream& out);
void write_game_file(const BimatrixGame& game, const std::string& path);
BimatrixGame read_game(std::istream& in);
BimatrixGame read_game_file(const std::string& path);

}  // namespace fplab
