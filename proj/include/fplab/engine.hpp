#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "fplab/game.hpp"

namespace fplab {

enum class TieRule { LowestIndex, HighestIndex, IncumbentThenLowest };

// Sampling schedule for regret snapshots along a run. Blocks means block
// boundaries plus powers of two (the default: per-step regret is rarely
// worth its cost on long runs).
enum class EpsSchedule { Blocks, Pow2, EveryStep, None };

struct FPConfig {
    TieRule tie_rule = TieRule::LowestIndex;
    int initial_row = 0;
    int initial_col = 0;
    EpsSchedule epsilon_schedule = EpsSchedule::Blocks;
    // Testing knob: start on the arbitrary-precision accumulator backend
    // instead of letting the overflow bound decide.
    bool force_big_accumulators = false;
};

struct StepRecord {
    int64_t t;
    int row_action;
    int col_action;
    bool row_tie;
    bool col_tie;
};

/// Run-length-encoded joint action sequence.
struct TraceRun {
    int row_action;
    int col_action;
    int64_t length;
    bool operator==(const TraceRun&) const = default;
};

struct Trace {
    std::vector<TraceRun> runs;
    int64_t total_t = 0;

    void push(int row_action, int col_action, int64_t length = 1);
    void append(const Trace& tail);
    bool operator==(const Trace&) const = default;
};

/// Trace CSV (RLE): header `row_action,col_action,length`, 1-based actions.
void write_trace_csv(const Trace& trace, std::ostream& out);
void write_trace_csv_file(const Trace& trace, const std::string& path);
Trace read_trace_csv(std::istream& in);
Trace read_trace_csv_file(const std::string& path);

/// Exact regrets of both players' empirical mixes at step t.
struct EpsilonPoint {
    int64_t t = 0;
    Rational row_raw, row_norm;
    Rational col_raw, col_norm;
};

/// Per-game integer scaling shared by all states: matrices are pre-multiplied
/// by the LCM of their entry denominators so accumulators are plain integers
/// and argmax comparisons are exact.
struct ScaledTables;

/// Fictitious-play bookkeeping after t steps. counts_* are the action counts
/// over each player's sequence; the accumulators hold D * (cumulative payoff
/// of every own pure strategy against the opponent's sequence). Accumulators
/// live on an int64 fast path while a precomputed overflow bound holds, and
/// are promoted to arbitrary-precision integers beyond it.
class FPState {
public:
    FPConfig config;
    int64_t t = 0;
    int last_row = -1;
    int last_col = -1;
    std::vector<int64_t> counts_row;
    std::vector<int64_t> counts_col;

    int rows() const;
    int cols() const;
    const BigInt& row_scale() const;  // D_R
    const BigInt& col_scale() const;  // D_C

    /// Exact accumulator value (independent of backend).
    BigInt acc_row_value(int strategy) const;
    BigInt acc_col_value(int strategy) const;

    bool using_big_accumulators() const { return big_; }

private:
    friend FPState init(const BimatrixGame&, const FPConfig&);
    friend StepRecord step(FPState&);
    friend EpsilonPoint epsilon_now(const FPState&);
    friend std::string checkpoint(const FPState&);
    friend FPState restore(const BimatrixGame&, const std::string&);

    std::shared_ptr<const ScaledTables> tables_;
    bool big_ = false;
    std::vector<int64_t> acc_row_s_, acc_col_s_;
    std::vector<BigInt> acc_row_b_, acc_col_b_;
    int64_t small_step_limit_ = 0;  // promote when t would exceed this

    void promote_if_needed(int64_t target_t);
};

/// State after step 1: both players are assigned their initial action.
FPState init(const BimatrixGame& game, const FPConfig& config);

/// Advances one step: both players best-respond (per tie rule) to the
/// opponent's empirical distribution over the first t steps, simultaneously.
StepRecord step(FPState& state);

/// Collects ties and scheduled regret samples along a run.
struct RunRecorder {
    int64_t ties_row = 0;
    int64_t ties_col = 0;
    std::vector<EpsilonPoint> epsilons;
};

/// Advances to t = T and returns the RLE trace of the steps this call
/// observed. Called on a fresh state (t = 1), the trace covers steps 1..T;
/// called on a resumed state it covers (t_entry, T]. Deterministic.
Trace run(FPState& state, int64_t total_steps, RunRecorder* recorder = nullptr);

/// Reference implementation: recomputes both best responses from scratch
/// every step with full O(m*n) exact arithmetic and no carried accumulators.
/// Intended for small horizons; ground truth for differential tests.
Trace oracle_run(const BimatrixGame& game, const FPConfig& config,
                 int64_t total_steps);

/// Empirical mixed strategy counts/t of one player.
MixedStrategy state_probabilities(const FPState& state, Player player);

/// Exact regrets of both empirical mixes, computed from the accumulators.
EpsilonPoint epsilon_now(const FPState& state);

/// Versioned text snapshot. restore() rebuilds a state that behaves
/// identically for all future steps; it validates a fingerprint of the game
/// and throws std::runtime_error on version or game mismatch or corruption.
std::string checkpoint(const FPState& state);
FPState restore(const BimatrixGame& game, const std::string& snapshot);

/// True at block starts (t=1 or joint action changed) and powers of two;
/// shared sampling predicate so engine and offline analyses agree.
bool is_pow2(int64_t t);

}  // namespace fplab
