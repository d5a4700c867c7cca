#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fplab/engine.hpp"
#include "fplab/generators.hpp"

namespace fplab {

/// Maximal stretch of one repeated action in a symmetric run.
struct Block {
    int action;       // 0-based strategy index
    int64_t start_t;  // first step of the block (1-based step counter)
    int64_t length;
};

/// RLE of the shared action sequence. Throws std::invalid_argument if any
/// run has row_action != col_action.
std::vector<Block> extract_blocks(const Trace& trace);

struct StructureReport {
    bool pass = false;
    std::vector<std::string> violations;
};

/// Checks the ascending-block structure of a 4n-strategy family run: every
/// transition is +1 or the 4n -> 2n+1 wrap, the first n strategies appear in
/// exactly one length-1 block each, and strategies 1..2n never reappear
/// after the first pass.
StructureReport check_ascending_structure(const std::vector<Block>& blocks,
                                          int n);

/// First ascending sweep through all 4n strategies. t_star is the last step
/// of the first block of the top strategy; t_last[s] is the last step at
/// which s is played during the sweep; ell_at_t_star[s] the play count of s
/// at t_star (equal to its first-pass block length).
struct FirstPassReport {
    int64_t t_star = 0;
    std::vector<int64_t> t_last;
    std::vector<int64_t> ell_at_t_star;
};

/// Throws std::runtime_error if the trace ends before the first block of the
/// top strategy is complete (one step past it is required).
FirstPassReport first_pass(const std::vector<Block>& blocks, int n);

struct RecurrenceReport {
    bool pass = false;
    std::vector<std::string> violations;
    // chained growth bound: ell_{t*}(4n-1) >= rho^(3n-1)
    int64_t ell_second_last = 0;
    Rational chain_bound;
    bool chain_ok = false;
};

/// Verifies the exact per-strategy count recurrences of the first pass:
///   rho*ell(i-1) <= ell(i) <= 1 + rho*ell(i-1)                 (n+1 <= i <= 3n)
///   rho*ell(i-1) <= ell(i) <= 1 + rho*ell(i-1) + rb*ell(i-n)   (3n+1 <= i <= 4n-1)
/// plus the chained bound ell_{t*}(4n-1) >= rho^(3n-1).
RecurrenceReport check_count_recurrences(const FirstPassReport& report,
                                         const GnParams& params);

struct RatioReport {
    Rational min_ratio;  // over block strategies i not in {s_t, s_t+1}
    Rational max_ratio;  // over all block strategies
    int min_at = -1;     // 0-based strategy attaining min_ratio
    int max_at = -1;
};

/// Exact circular count ratios p_t(i)/p_t(i-1) over the top block
/// {2n+1..4n}; i-1 of 2n+1 wraps to 4n. Throws on a zero count inside the
/// block. current_action is s_t (0-based).
RatioReport ratio_profile(const std::vector<int64_t>& counts, int64_t t, int n,
                          int current_action);
RatioReport ratio_profile(const FPState& state, int n, int current_action);

/// Exact probability mass on the first `cutoff` strategies.
Rational tail_mass(const std::vector<int64_t>& counts, int64_t t, int cutoff);
Rational tail_mass(const FPState& state, int cutoff);

/// Replays a trace and invokes fn(t, counts_row, counts_col, row_action,
/// col_action) at each scheduled step; counts include step t. Scheduling
/// matches the engine recorder: block starts plus powers of two plus the
/// final step for Blocks, etc.
using SampleVisitor = std::function<void(
    int64_t, const std::vector<int64_t>&, const std::vector<int64_t>&, int, int)>;
void visit_trace_samples(const Trace& trace, int rows, int cols,
                         EpsSchedule schedule, const SampleVisitor& fn);

/// Exact regrets of both players' empirical mixes at each scheduled step,
/// recomputed from the trace through the core payoff routines (independent
/// of the engine's accumulator fast path).
std::vector<EpsilonPoint> epsilon_trajectory(const BimatrixGame& game,
                                             const Trace& trace,
                                             EpsSchedule schedule);

/// Regrets at one step t of the trace.
EpsilonPoint epsilon_at(const BimatrixGame& game, const Trace& trace, int64_t t);

struct UniformBlockNe {
    bool is_ne = false;
    Rational value;
    bool no_pure_ne = false;
};

/// For a 4n x 4n family game: verifies that the uniform profile over the top
/// block {2n+1..4n} has exactly zero regret for both players, returns its
/// payoff, and exhaustively confirms the absence of pure Nash equilibria.
UniformBlockNe check_uniform_block_ne(const BimatrixGame& game, int n);

/// Exact early-phase regret floor 1/alpha - (beta/alpha)*(i-1)/(2i) for the
/// 1-based action index i.
Rational early_phase_floor(const GnParams& params, int action_1based);

/// One-stop certification of a family run: runs the engine (auto-extending
/// the horizon until the first pass plus min_cycles full cycles are complete
/// when total_steps == 0), then evaluates every structural check.
struct GnRunCertificate {
    GnParams params;
    int64_t total_steps = 0;
    int64_t ties = 0;
    bool symmetric = false;
    StructureReport structure;
    bool first_pass_ok = false;
    FirstPassReport pass_report;
    RecurrenceReport recurrences;
    int cycles_completed = 0;  // complete top-block cycles after t*
    bool tail_mass_monotone = false;
    Rational tail_mass_at_tstar;
    Rational tail_mass_final;
    bool ratio_lower_ok = false;  // min ratio >= rho at every sampled t >= t*
    Rational ratio_min_observed;
    Rational ratio_max_observed;
    std::optional<Rational> ratio_upper_ref;  // 1 + 3/k when k is known
    std::vector<EpsilonPoint> epsilons;       // engine fast-path samples
    Rational eps_norm_min_after_tstar;
    bool early_phase_ok = false;  // raw eps >= early_phase_floor for t <= n
    UniformBlockNe uniform_ne;
    Trace trace;

    // Structural verdict. Tie flags and the early-phase regret floor are
    // reported but not gated here: exact arithmetic produces benign argmax
    // ties at block boundaries for rational parameters, and the early floor
    // is a per-configuration certification, not a family-wide fact.
    bool all_pass() const {
        return symmetric && structure.pass && first_pass_ok &&
               recurrences.pass && recurrences.chain_ok && tail_mass_monotone &&
               ratio_lower_ok && uniform_ne.is_ne && uniform_ne.no_pure_ne;
    }
};

GnRunCertificate certify_gn(const GnParams& params, int64_t total_steps,
                            int min_cycles = 1,
                            int64_t step_cap = 50000000);

/// Analysis report JSON (serialized, deterministic key order). `checks`
/// selects from {structure, recurrences, ratios, tailmass, ne}; empty means
/// all that are applicable. Family-specific checks need params.
std::string analysis_report_json(const BimatrixGame& game, const Trace& trace,
                                 const std::optional<GnParams>& params,
                                 const std::vector<std::string>& checks);

/// True iff every check requested and evaluated in the report passed.
bool analysis_report_ok(const std::string& report_json);

}  // namespace fplab
