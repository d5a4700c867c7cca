#include "fplab/generators.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

namespace fplab {

GnParams gn_params(int n, const Rational& k) {
    if (n < 2) throw std::invalid_argument("gn_params: n must be >= 2");
    if (k <= Rational(1)) throw std::invalid_argument("gn_params: k must be > 1");
    Rational one(1);
    GnParams p;
    p.n = n;
    p.alpha = one + one / k;
    p.beta = one - one / (k * k);
    p.rho = (p.alpha - p.beta) / (p.alpha - one);
    p.rb = p.beta / (p.alpha - one);
    p.k = k;
    p.delta_equiv = 1.0 - std::log(k.to_double()) / std::log(double(n));
    p.cycling_guard_ok = Rational::pow(p.rho, n - 1) * p.beta >= one;
    return p;
}

GnParams gn_params_from_alpha_beta(int n, const Rational& alpha,
                                   const Rational& beta) {
    if (n < 2) throw std::invalid_argument("gn_params: n must be >= 2");
    Rational one(1);
    if (alpha <= one) throw std::invalid_argument("gn_params: alpha must be > 1");
    if (beta <= Rational(0) || beta >= one)
        throw std::invalid_argument("gn_params: beta must be in (0,1)");
    GnParams p;
    p.n = n;
    p.alpha = alpha;
    p.beta = beta;
    p.rho = (alpha - beta) / (alpha - one);
    p.rb = beta / (alpha - one);
    p.cycling_guard_ok = Rational::pow(p.rho, n - 1) * beta >= one;
    return p;
}

BimatrixGame build_gn(const GnParams& params) {
    const int n = params.n;
    if (n < 2) throw std::invalid_argument("build_gn: invalid params");
    const int size = 4 * n;
    const Rational& alpha = params.alpha;
    const Rational& beta = params.beta;
    const Rational one(1), zero(0);

    // Placement rules for R, applied in order, first match wins; i and j are
    // 1-based as in the family's definition.
    auto entry = [&](int i, int j) -> Rational {
        if (i >= 2 && i <= n && j == i - 1) return one;
        if (i >= n + 1 && j == i) return one;
        if (i >= n + 1 && j == i - 1) return alpha;
        if (i == 2 * n + 1 && j == 4 * n) return alpha;
        if (i > j && j <= 2 * n) return beta;
        if (i > j && i - j <= n) return beta;
        if (j >= 3 * n + 1 && i >= 2 * n + 1 && i <= j - n) return beta;
        return zero;
    };

    std::vector<std::vector<Rational>> r(size), c(size);
    for (int i = 0; i < size; ++i) {
        r[i].resize(size);
        c[i].resize(size);
    }
    for (int i = 1; i <= size; ++i)
        for (int j = 1; j <= size; ++j) {
            Rational v = entry(i, j);
            r[i - 1][j - 1] = v;
            c[j - 1][i - 1] = std::move(v);  // column matrix is the transpose
        }
    return BimatrixGame(std::move(r), std::move(c));
}

BimatrixGame build_shapley() {
    auto q = [](long long v) { return Rational(v); };
    std::vector<std::vector<Rational>> r = {
        {q(0), q(1), q(0)}, {q(0), q(0), q(1)}, {q(1), q(0), q(0)}};
    std::vector<std::vector<Rational>> c = {
        {q(0), q(0), q(1)}, {q(1), q(0), q(0)}, {q(0), q(1), q(0)}};
    return BimatrixGame(std::move(r), std::move(c));
}

BimatrixGame build_matching_pennies() {
    auto q = [](long long v) { return Rational(v); };
    std::vector<std::vector<Rational>> r = {{q(1), q(0)}, {q(0), q(1)}};
    std::vector<std::vector<Rational>> c = {{q(0), q(1)}, {q(1), q(0)}};
    return BimatrixGame(std::move(r), std::move(c));
}

BimatrixGame build_random(uint64_t seed, int m, int n, int denom_bits) {
    if (m < 1 || n < 1)
        throw std::invalid_argument("build_random: dimensions must be >= 1");
    if (denom_bits < 1 || denom_bits > 30)
        throw std::invalid_argument("build_random: denom_bits out of [1,30]");
    SplitMix64 rng(seed);
    const long long denom = 1LL << denom_bits;
    auto draw_matrix = [&]() {
        std::vector<std::vector<Rational>> rows(m);
        for (int i = 0; i < m; ++i) {
            rows[i].reserve(n);
            for (int j = 0; j < n; ++j) {
                // inclusive range [0, 2^bits]
                long long v = static_cast<long long>(
                    rng.below(static_cast<uint64_t>(denom) + 1));
                rows[i].emplace_back(v, denom);
            }
        }
        return rows;
    };
    auto r = draw_matrix();
    auto c = draw_matrix();
    return BimatrixGame(std::move(r), std::move(c));
}

void write_game(const BimatrixGame& game, std::ostream& out) {
    out << "fpg 1\n";
    out << game.rows() << ' ' << game.cols() << '\n';
    auto dump = [&](Player p) {
        for (int i = 0; i < game.rows(); ++i) {
            for (int j = 0; j < game.cols(); ++j) {
                if (j) out << ' ';
                out << game.payoff(p, i, j).str();
            }
            out << '\n';
        }
    };
    dump(Player::Row);
    dump(Player::Col);
}

void write_game_file(const BimatrixGame& game, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_game(game, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

struct Token {
    std::string text;
    int line;
    int col;
};

// Whitespace-separated tokens; '#' starts a comment running to end of line.
class TokenReader {
public:
    explicit TokenReader(std::istream& in) : in_(in) {}

    bool next(Token& tok) {
        while (true) {
            if (pos_ >= line_.size()) {
                if (!std::getline(in_, line_)) return false;
                ++lineno_;
                pos_ = 0;
                continue;
            }
            char ch = line_[pos_];
            if (ch == ' ' || ch == '\t' || ch == '\r') {
                ++pos_;
                continue;
            }
            if (ch == '#') {
                pos_ = line_.size();
                continue;
            }
            size_t start = pos_;
            while (pos_ < line_.size() && line_[pos_] != ' ' &&
                   line_[pos_] != '\t' && line_[pos_] != '\r' &&
                   line_[pos_] != '#')
                ++pos_;
            tok = {line_.substr(start, pos_ - start), lineno_,
                   static_cast<int>(start) + 1};
            return true;
        }
    }

    Token require(const char* what) {
        Token tok;
        if (!next(tok))
            throw ParseError(std::string("unexpected end of input, expected ") +
                                 what,
                             lineno_, 1);
        return tok;
    }

private:
    std::istream& in_;
    std::string line_;
    size_t pos_ = 0;
    int lineno_ = 0;
};

int parse_dim(const Token& tok) {
    try {
        size_t used = 0;
        long v = std::stol(tok.text, &used);
        if (used != tok.text.size() || v < 1 || v > 100000)
            throw std::invalid_argument("range");
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw ParseError("bad dimension '" + tok.text + "'", tok.line, tok.col);
    }
}

}  // namespace

BimatrixGame read_game(std::istream& in) {
    TokenReader reader(in);
    Token magic = reader.require("magic");
    Token version = reader.require("format version");
    if (magic.text != "fpg")
        throw ParseError("bad magic '" + magic.text + "', expected 'fpg'",
                         magic.line, magic.col);
    if (version.text != "1")
        throw ParseError("unsupported version '" + version.text + "'",
                         version.line, version.col);
    int m = parse_dim(reader.require("row count"));
    int n = parse_dim(reader.require("column count"));
    auto read_matrix = [&]() {
        std::vector<std::vector<Rational>> rows(m);
        for (int i = 0; i < m; ++i) {
            rows[i].reserve(n);
            for (int j = 0; j < n; ++j) {
                Token tok = reader.require("payoff entry");
                try {
                    rows[i].push_back(Rational::parse(tok.text));
                } catch (const std::invalid_argument& e) {
                    throw ParseError(e.what(), tok.line, tok.col);
                }
            }
        }
        return rows;
    };
    auto r = read_matrix();
    auto c = read_matrix();
    Token extra;
    if (reader.next(extra))
        throw ParseError("trailing token '" + extra.text + "'", extra.line,
                         extra.col);
    return BimatrixGame(std::move(r), std::move(c));
}

BimatrixGame read_game_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return read_game(in);
}

}  // namespace fplab
