#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fplab/engine.hpp"
#include "fplab/game.hpp"

namespace fplab {

/// f[k] = last 1-based position at which seq[k]'s value occurs.
std::vector<int64_t> last_occurrences(const std::vector<int>& seq);

/// S(seq) = sum of last occurrences over all positions.
/// Always >= t(t+1)/2, with equality iff all entries are distinct.
int64_t sum_S(const std::vector<int>& seq);

struct SequenceStats {
    std::vector<int> seq;
    std::vector<int64_t> f;
    int64_t S = 0;
};
SequenceStats sequence_stats(std::vector<int> seq);

/// Exact 1 + 1/t - S/t^2. Requires |seq| == t.
Rational msbound(const std::vector<int>& seq, int64_t t);

/// Reorders a sequence into block form: distinct values sorted by ascending
/// last occurrence, each value repeated its multiplicity. Never increases S,
/// and strictly decreases it when the output differs from the input.
std::vector<int> last_occurrence_transform(const std::vector<int>& seq);

/// Streaming S(a) over a growing sequence: appending action a at position
/// t bumps the last occurrence of all earlier copies of a to t, so
/// S += t + count(a) * (t - last(a)). Equals sum_S of the prefix at every
/// step without rescanning it.
class LastOccurrenceScore {
public:
    explicit LastOccurrenceScore(int alphabet)
        : count_(alphabet, 0), last_(alphabet, 0) {}

    void push(int action) {
        ++t_;
        s_ += t_ + count_[action] * (t_ - last_[action]);
        count_[action] += 1;
        last_[action] = t_;
    }

    int64_t score() const { return s_; }
    int64_t length() const { return t_; }

private:
    std::vector<int64_t> count_;
    std::vector<int64_t> last_;
    int64_t t_ = 0;
    int64_t s_ = 0;
};

enum class MinSMode { BlockCompositions, AllSequences };

struct MinSResult {
    int64_t t = 0;
    int n = 0;
    int64_t min_S = 0;
    /// Block lengths of every minimizer, deduplicated up to relabeling and
    /// sorted lexicographically. Each sums to t.
    std::vector<std::vector<int64_t>> argmin_compositions;
    /// AllSequences mode: whether every minimizing sequence was in block form
    /// (each value in one consecutive run).
    bool all_minimizers_block_form = true;
};

/// Exact minimum of S over block compositions of t into n positive parts
/// (n <= t <= 40, n <= 8), or over all n^t sequences (t <= 10, n <= 4).
MinSResult brute_force_min_S(int64_t t, int n, MinSMode mode);

/// Exact 1/2 + 1/t - 1/(2n). Defined only when n divides t; otherwise throws
/// std::invalid_argument naming the nearest valid t.
Rational epsilon_star(int n, int64_t t);

/// CSV: header `t,n,min_S,composition`, one row per minimizing composition
/// with parts space-separated.
void write_min_s_csv(const MinSResult& result, std::ostream& out);

struct CertifyReport {
    bool pass = false;
    int64_t samples = 0;
    int64_t violations = 0;
    Rational worst_margin;  // min over checks of (bound - epsilon)
    std::string worst_at;
};

/// Checks, at every sampled step t (multiples of stride), that each player's
/// exact regret is at most 1 + 1/t - S/t^2 for their own sequence, and at
/// most 1/2 + 1/t - 1/(2n) whenever their strategy count n divides t.
/// Requires all payoffs within [0,1] (normalize first).
CertifyReport certify_trace_bound(const BimatrixGame& game, const Trace& trace,
                                  int64_t stride);

}  // namespace fplab
