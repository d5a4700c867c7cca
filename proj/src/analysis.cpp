#include "fplab/analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace fplab {

std::vector<Block> extract_blocks(const Trace& trace) {
    std::vector<Block> blocks;
    blocks.reserve(trace.runs.size());
    int64_t t = 1;
    for (const auto& run : trace.runs) {
        if (run.row_action != run.col_action)
            throw std::invalid_argument(
                "extract_blocks: trace is not symmetric at step " +
                std::to_string(t));
        blocks.push_back({run.row_action, t, run.length});
        t += run.length;
    }
    return blocks;
}

StructureReport check_ascending_structure(const std::vector<Block>& blocks,
                                          int n) {
    StructureReport rep;
    const int top = 4 * n - 1;   // 0-based index of strategy 4n
    const int wrap_to = 2 * n;   // 0-based index of strategy 2n+1
    auto complain = [&](std::string msg) {
        rep.violations.push_back(std::move(msg));
    };

    for (size_t b = 0; b + 1 < blocks.size(); ++b) {
        int cur = blocks[b].action, nxt = blocks[b + 1].action;
        bool ok = (nxt == cur + 1) || (cur == top && nxt == wrap_to);
        if (!ok)
            complain("transition " + std::to_string(cur + 1) + " -> " +
                     std::to_string(nxt + 1) + " at t=" +
                     std::to_string(blocks[b + 1].start_t));
    }

    // Strategies 1..n: one block each, length 1, in ascending order up front.
    if (static_cast<int>(blocks.size()) < n) {
        complain("trace too short to cover the first " + std::to_string(n) +
                 " strategies");
    } else {
        for (int i = 0; i < n; ++i) {
            if (blocks[i].action != i)
                complain("block " + std::to_string(i + 1) + " plays strategy " +
                         std::to_string(blocks[i].action + 1) + ", expected " +
                         std::to_string(i + 1));
            else if (blocks[i].length != 1)
                complain("strategy " + std::to_string(i + 1) +
                         " has block length " +
                         std::to_string(blocks[i].length) + ", expected 1");
        }
    }

    // Strategies 1..2n never reappear after their first-pass block.
    std::vector<int> seen(2 * n, 0);
    for (const auto& b : blocks)
        if (b.action < 2 * n && ++seen[b.action] == 2)
            complain("strategy " + std::to_string(b.action + 1) +
                     " reappears at t=" + std::to_string(b.start_t));

    rep.pass = rep.violations.empty();
    return rep;
}

FirstPassReport first_pass(const std::vector<Block>& blocks, int n) {
    const int size = 4 * n;
    const int top = size - 1;
    size_t top_idx = blocks.size();
    for (size_t b = 0; b < blocks.size(); ++b)
        if (blocks[b].action == top) {
            top_idx = b;
            break;
        }
    if (top_idx >= blocks.size())
        throw std::runtime_error("first pass incomplete: strategy " +
                                 std::to_string(size) + " never played");
    if (top_idx + 1 >= blocks.size())
        throw std::runtime_error(
            "first pass incomplete: trace ends inside the first block of "
            "strategy " +
            std::to_string(size));

    FirstPassReport rep;
    rep.t_last.assign(size, 0);
    rep.ell_at_t_star.assign(size, 0);
    for (size_t b = 0; b <= top_idx; ++b) {
        const Block& blk = blocks[b];
        if (blk.action < 0 || blk.action >= size)
            throw std::runtime_error("first pass: action out of range");
        if (rep.ell_at_t_star[blk.action] != 0)
            throw std::runtime_error("first pass: strategy " +
                                     std::to_string(blk.action + 1) +
                                     " played in two blocks before t*");
        rep.ell_at_t_star[blk.action] = blk.length;
        rep.t_last[blk.action] = blk.start_t + blk.length - 1;
    }
    for (int s = 0; s < size; ++s)
        if (rep.ell_at_t_star[s] == 0)
            throw std::runtime_error("first pass incomplete: strategy " +
                                     std::to_string(s + 1) + " never played");
    rep.t_star = rep.t_last[top];
    return rep;
}

RecurrenceReport check_count_recurrences(const FirstPassReport& report,
                                         const GnParams& params) {
    RecurrenceReport rep;
    const int n = params.n;
    const Rational& rho = params.rho;
    const Rational& rb = params.rb;
    const auto& ell = report.ell_at_t_star;
    auto complain = [&](int i_1b, const std::string& side, const Rational& lhs,
                        const Rational& rhs) {
        rep.violations.push_back("strategy " + std::to_string(i_1b) + ": " +
                                 side + " bound violated (" + lhs.str() +
                                 " vs " + rhs.str() + ")");
    };

    for (int i = n + 1; i <= 4 * n - 1; ++i) {
        Rational cur(ell[i - 1]);
        Rational prev(ell[i - 2]);
        Rational lower = rho * prev;
        if (cur < lower) complain(i, "lower", cur, lower);
        Rational upper = Rational(1) + rho * prev;
        if (i > 3 * n) upper += rb * Rational(ell[i - n - 1]);
        if (cur > upper) complain(i, "upper", cur, upper);
    }

    rep.ell_second_last = ell[4 * n - 2];
    rep.chain_bound = Rational::pow(params.rho, 3 * n - 1);
    rep.chain_ok = Rational(rep.ell_second_last) >= rep.chain_bound;
    rep.pass = rep.violations.empty();
    return rep;
}

RatioReport ratio_profile(const std::vector<int64_t>& counts, int64_t t, int n,
                          int current_action) {
    if (t < 1) throw std::invalid_argument("ratio_profile: t must be >= 1");
    const int lo = 2 * n, hi = 4 * n - 1;
    if (static_cast<int>(counts.size()) < hi + 1)
        throw std::invalid_argument("ratio_profile: counts vector too short");
    for (int i = lo; i <= hi; ++i)
        if (counts[i] <= 0)
            throw std::invalid_argument("ratio_profile: zero count for strategy " +
                                        std::to_string(i + 1));

    const int succ = current_action >= lo && current_action <= hi
                         ? (current_action == hi ? lo : current_action + 1)
                         : -1;
    RatioReport rep;
    for (int i = lo; i <= hi; ++i) {
        const int prev = i == lo ? hi : i - 1;
        Rational ratio(counts[i], counts[prev]);
        if (rep.max_at < 0 || ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.max_at = i;
        }
        if (i == current_action || i == succ) continue;
        if (rep.min_at < 0 || ratio < rep.min_ratio) {
            rep.min_ratio = ratio;
            rep.min_at = i;
        }
    }
    return rep;
}

RatioReport ratio_profile(const FPState& state, int n, int current_action) {
    return ratio_profile(state.counts_row, state.t, n, current_action);
}

Rational tail_mass(const std::vector<int64_t>& counts, int64_t t, int cutoff) {
    if (t < 1) throw std::invalid_argument("tail_mass: t must be >= 1");
    cutoff = std::min<int>(cutoff, static_cast<int>(counts.size()));
    BigInt sum = 0;
    for (int i = 0; i < cutoff; ++i) sum += counts[i];
    return Rational(sum, BigInt(t));
}

Rational tail_mass(const FPState& state, int cutoff) {
    return tail_mass(state.counts_row, state.t, cutoff);
}

void visit_trace_samples(const Trace& trace, int rows, int cols,
                         EpsSchedule schedule, const SampleVisitor& fn) {
    if (schedule == EpsSchedule::None) return;
    std::vector<int64_t> counts_row(rows, 0), counts_col(cols, 0);
    int64_t done = 0;  // counts cover steps 1..done
    std::vector<int64_t> points;
    for (size_t ri = 0; ri < trace.runs.size(); ++ri) {
        const TraceRun& run = trace.runs[ri];
        if (run.row_action < 0 || run.row_action >= rows ||
            run.col_action < 0 || run.col_action >= cols)
            throw std::invalid_argument("trace action out of game bounds");
        const int64_t first = done + 1, last = done + run.length;
        points.clear();
        if (schedule == EpsSchedule::EveryStep) {
            for (int64_t t = first; t <= last; ++t) points.push_back(t);
        } else {
            if (schedule == EpsSchedule::Blocks) points.push_back(first);
            int64_t p = 1;
            while (p < first) p <<= 1;
            for (; p <= last; p <<= 1) points.push_back(p);
            if (ri + 1 == trace.runs.size()) points.push_back(last);
            std::sort(points.begin(), points.end());
            points.erase(std::unique(points.begin(), points.end()),
                         points.end());
        }
        int64_t cur = done;
        for (int64_t t : points) {
            counts_row[run.row_action] += t - cur;
            counts_col[run.col_action] += t - cur;
            cur = t;
            fn(t, counts_row, counts_col, run.row_action, run.col_action);
        }
        counts_row[run.row_action] += last - cur;
        counts_col[run.col_action] += last - cur;
        done = last;
    }
}

std::vector<EpsilonPoint> epsilon_trajectory(const BimatrixGame& game,
                                             const Trace& trace,
                                             EpsSchedule schedule) {
    std::vector<EpsilonPoint> out;
    visit_trace_samples(
        trace, game.rows(), game.cols(), schedule,
        [&](int64_t t, const std::vector<int64_t>& cr,
            const std::vector<int64_t>& cc, int, int) {
            MixedStrategy rm = MixedStrategy::from_counts(cr, t);
            MixedStrategy cm = MixedStrategy::from_counts(cc, t);
            Regret r = regret(game, Player::Row, rm, cm);
            Regret c = regret(game, Player::Col, cm, rm);
            out.push_back({t, r.raw, r.normalized, c.raw, c.normalized});
        });
    return out;
}

EpsilonPoint epsilon_at(const BimatrixGame& game, const Trace& trace,
                        int64_t t) {
    if (t < 1 || t > trace.total_t)
        throw std::invalid_argument("epsilon_at: step outside trace");
    std::vector<int64_t> cr(game.rows(), 0), cc(game.cols(), 0);
    int64_t done = 0;
    for (const auto& run : trace.runs) {
        if (run.row_action < 0 || run.row_action >= game.rows() ||
            run.col_action < 0 || run.col_action >= game.cols())
            throw std::invalid_argument("trace action out of game bounds");
        int64_t take = std::min(run.length, t - done);
        if (take <= 0) break;
        cr[run.row_action] += take;
        cc[run.col_action] += take;
        done += take;
        if (done == t) break;
    }
    MixedStrategy rm = MixedStrategy::from_counts(cr, t);
    MixedStrategy cm = MixedStrategy::from_counts(cc, t);
    Regret r = regret(game, Player::Row, rm, cm);
    Regret c = regret(game, Player::Col, cm, rm);
    return {t, r.raw, r.normalized, c.raw, c.normalized};
}

UniformBlockNe check_uniform_block_ne(const BimatrixGame& game, int n) {
    const int size = 4 * n;
    if (game.rows() != size || game.cols() != size)
        throw std::invalid_argument("check_uniform_block_ne: game is not 4n x 4n");
    std::vector<int> support;
    for (int s = 2 * n; s < size; ++s) support.push_back(s);
    MixedStrategy mix = MixedStrategy::uniform_over(support, size);

    UniformBlockNe out;
    Regret r = regret(game, Player::Row, mix, mix);
    Regret c = regret(game, Player::Col, mix, mix);
    out.is_ne = r.raw.is_zero() && c.raw.is_zero();
    out.value = expected_payoff(game, Player::Row, mix, mix);

    bool found_pure = false;
    for (int i = 0; i < size && !found_pure; ++i)
        for (int j = 0; j < size && !found_pure; ++j) {
            bool row_best = true, col_best = true;
            for (int i2 = 0; i2 < size && row_best; ++i2)
                if (game.row_payoff(i2, j) > game.row_payoff(i, j))
                    row_best = false;
            for (int j2 = 0; j2 < size && col_best; ++j2)
                if (game.col_payoff(i, j2) > game.col_payoff(i, j))
                    col_best = false;
            found_pure = row_best && col_best;
        }
    out.no_pure_ne = !found_pure;
    return out;
}

Rational early_phase_floor(const GnParams& params, int action_1based) {
    Rational i(action_1based);
    Rational one(1);
    return one / params.alpha -
           (params.beta / params.alpha) * (i - one) / (Rational(2) * i);
}

namespace {

// Completed blocks of the top strategy (a block is complete when another
// block follows it in the trace).
int completed_top_blocks(const Trace& trace, int top) {
    int count = 0;
    for (size_t i = 0; i + 1 < trace.runs.size(); ++i)
        if (trace.runs[i].row_action == top) ++count;
    return count;
}

}  // namespace

GnRunCertificate certify_gn(const GnParams& params, int64_t total_steps,
                            int min_cycles, int64_t step_cap) {
    const int n = params.n;
    const int top = 4 * n - 1;
    BimatrixGame game = build_gn(params);
    FPConfig cfg;  // lowest-index ties, start (1,1), blocks+pow2 sampling

    int64_t target = total_steps;
    if (target == 0) {
        // Dry sizing pass: extend until the first pass and min_cycles full
        // cycles are in the trace, then redo one clean recorded run so the
        // sample schedule is independent of the doubling.
        FPState st = init(game, cfg);
        Trace tr;
        int64_t horizon = 64LL * n;
        for (;;) {
            horizon = std::min(horizon, step_cap);
            tr.append(run(st, horizon));
            if (completed_top_blocks(tr, top) >= min_cycles + 1 ||
                horizon >= step_cap)
                break;
            horizon *= 4;
        }
        target = st.t;
    }

    GnRunCertificate cert;
    cert.params = params;
    cert.total_steps = target;

    FPState st = init(game, cfg);
    RunRecorder rec;
    cert.trace = run(st, target, &rec);
    cert.ties = rec.ties_row + rec.ties_col;
    cert.epsilons = std::move(rec.epsilons);

    cert.symmetric = true;
    for (const auto& r : cert.trace.runs)
        if (r.row_action != r.col_action) cert.symmetric = false;
    if (!cert.symmetric) return cert;

    auto blocks = extract_blocks(cert.trace);
    cert.structure = check_ascending_structure(blocks, n);
    try {
        cert.pass_report = first_pass(blocks, n);
        cert.first_pass_ok = true;
    } catch (const std::runtime_error& e) {
        cert.first_pass_ok = false;
        cert.structure.violations.push_back(e.what());
        cert.structure.pass = false;
        return cert;
    }
    cert.recurrences = check_count_recurrences(cert.pass_report, params);
    cert.cycles_completed =
        std::max(0, completed_top_blocks(cert.trace, top) - 1);

    const int64_t t_star = cert.pass_report.t_star;
    {
        BigInt head = 0;
        for (int s = 0; s < 2 * n; ++s)
            head += cert.pass_report.ell_at_t_star[s];
        cert.tail_mass_at_tstar = Rational(head, BigInt(t_star));
    }

    bool monotone = true, lower_ok = true, have_prev = false, have_ratio = false;
    Rational prev_tail;
    visit_trace_samples(
        cert.trace, 4 * n, 4 * n, EpsSchedule::Blocks,
        [&](int64_t t, const std::vector<int64_t>& cr,
            const std::vector<int64_t>&, int action, int) {
            if (t < t_star) return;
            Rational tail = tail_mass(cr, t, 2 * n);
            if (have_prev && tail > prev_tail) monotone = false;
            prev_tail = tail;
            have_prev = true;
            cert.tail_mass_final = tail;

            RatioReport rr = ratio_profile(cr, t, n, action);
            if (rr.min_ratio < params.rho) lower_ok = false;
            if (!have_ratio) {
                cert.ratio_min_observed = rr.min_ratio;
                cert.ratio_max_observed = rr.max_ratio;
                have_ratio = true;
            } else {
                if (rr.min_ratio < cert.ratio_min_observed)
                    cert.ratio_min_observed = rr.min_ratio;
                if (rr.max_ratio > cert.ratio_max_observed)
                    cert.ratio_max_observed = rr.max_ratio;
            }
        });
    cert.tail_mass_monotone = monotone;
    cert.ratio_lower_ok = lower_ok && have_ratio;
    if (params.k)
        cert.ratio_upper_ref = Rational(1) + Rational(3) / *params.k;

    // Early phase: every t <= n is a block start on a structurally sound run,
    // so the engine sampled each of them.
    int early_seen = 0;
    bool early_ok = true;
    bool have_eps_min = false;
    for (const auto& ep : cert.epsilons) {
        if (ep.t <= n) {
            Rational floor = early_phase_floor(params, static_cast<int>(ep.t));
            if (ep.row_raw < floor || ep.col_raw < floor) early_ok = false;
            ++early_seen;
        }
        if (ep.t >= t_star) {
            Rational norm =
                ep.row_norm > ep.col_norm ? ep.row_norm : ep.col_norm;
            if (!have_eps_min || norm < cert.eps_norm_min_after_tstar) {
                cert.eps_norm_min_after_tstar = norm;
                have_eps_min = true;
            }
        }
    }
    cert.early_phase_ok = early_ok && early_seen == std::min<int64_t>(n, target);

    cert.uniform_ne = check_uniform_block_ne(game, n);
    return cert;
}

namespace {

nlohmann::json rational_json(const Rational& v) {
    return {{"exact", v.str()}, {"float", v.to_double()}};
}

}  // namespace

std::string analysis_report_json(const BimatrixGame& game, const Trace& trace,
                                 const std::optional<GnParams>& params,
                                 const std::vector<std::string>& checks) {
    using nlohmann::json;
    std::set<std::string> want(checks.begin(), checks.end());
    const bool all = want.empty();
    auto requested = [&](const char* name) {
        return all || want.count(name) > 0;
    };
    static const std::set<std::string> known = {"structure", "recurrences",
                                                "ratios", "tailmass", "ne"};
    for (const auto& w : want)
        if (!known.count(w))
            throw std::invalid_argument("unknown check '" + w + "'");

    json j;
    j["t"] = trace.total_t;

    bool symmetric = game.rows() == game.cols();
    for (const auto& r : trace.runs)
        if (r.row_action != r.col_action) symmetric = false;

    EpsilonPoint final_eps = epsilon_at(game, trace, trace.total_t);
    j["epsilon_row"] = {{"raw", rational_json(final_eps.row_raw)},
                        {"norm", rational_json(final_eps.row_norm)}};
    j["epsilon_col"] = {{"raw", rational_json(final_eps.col_raw)},
                        {"norm", rational_json(final_eps.col_norm)}};

    json checks_out = json::object();
    std::optional<FirstPassReport> fp;
    std::vector<Block> blocks;
    if (symmetric) {
        blocks = extract_blocks(trace);
        json barr = json::array();
        for (const auto& b : blocks)
            barr.push_back(
                {{"action", b.action + 1}, {"start", b.start_t}, {"len", b.length}});
        j["blocks"] = std::move(barr);
    } else {
        j["blocks"] = nullptr;
    }
    if (symmetric && params) {
        const int n = params->n;
        StructureReport sr = check_ascending_structure(blocks, n);
        if (requested("structure")) {
            checks_out["structure"] = sr.pass ? "pass" : "fail";
            if (!sr.pass) checks_out["structure_violations"] = sr.violations;
        }
        try {
            fp = first_pass(blocks, n);
        } catch (const std::runtime_error&) {
        }
        j["t_star"] = fp ? json(fp->t_star) : json(nullptr);

        if (requested("recurrences")) {
            if (fp) {
                RecurrenceReport rr = check_count_recurrences(*fp, *params);
                checks_out["recurrences"] =
                    rr.pass && rr.chain_ok ? "pass" : "fail";
                if (!rr.violations.empty())
                    checks_out["recurrence_violations"] = rr.violations;
            } else {
                checks_out["recurrences"] = "fail";
            }
        }

        if ((requested("ratios") || requested("tailmass")) && fp) {
            bool monotone = true, lower_ok = true, have_prev = false;
            bool have_any = false;
            Rational prev_tail, tail_final, rmin, rmax;
            visit_trace_samples(
                trace, game.rows(), game.cols(), EpsSchedule::Blocks,
                [&](int64_t t, const std::vector<int64_t>& cr,
                    const std::vector<int64_t>&, int action, int) {
                    if (t < fp->t_star) return;
                    Rational tail = tail_mass(cr, t, 2 * n);
                    if (have_prev && tail > prev_tail) monotone = false;
                    prev_tail = tail;
                    have_prev = true;
                    tail_final = tail;
                    RatioReport rr = ratio_profile(cr, t, n, action);
                    if (rr.min_ratio < params->rho) lower_ok = false;
                    if (!have_any) {
                        rmin = rr.min_ratio;
                        rmax = rr.max_ratio;
                        have_any = true;
                    } else {
                        if (rr.min_ratio < rmin) rmin = rr.min_ratio;
                        if (rr.max_ratio > rmax) rmax = rr.max_ratio;
                    }
                });
            if (have_any) {
                j["ratio_min"] = rational_json(rmin);
                j["ratio_max"] = rational_json(rmax);
                j["tail_mass"] = rational_json(tail_final);
            }
            if (requested("ratios")) {
                checks_out["ratios"] = lower_ok && have_any ? "pass" : "fail";
                checks_out["ratio_upper"] = "measured";
            }
            if (requested("tailmass"))
                checks_out["tailmass"] = monotone && have_prev ? "pass" : "fail";
        } else if (requested("ratios") || requested("tailmass")) {
            if (requested("ratios")) checks_out["ratios"] = "fail";
            if (requested("tailmass")) checks_out["tailmass"] = "fail";
        }

        if (requested("ne")) {
            UniformBlockNe ne = check_uniform_block_ne(game, n);
            checks_out["ne"] = ne.is_ne && ne.no_pure_ne ? "pass" : "fail";
            j["uniform_block_value"] = rational_json(ne.value);
        }
    } else {
        j["t_star"] = nullptr;
        if (!all)
            for (const auto& w : want) checks_out[w] = "fail";
    }

    j["checks"] = std::move(checks_out);
    return j.dump(2) + "\n";
}

bool analysis_report_ok(const std::string& report_json) {
    auto j = nlohmann::json::parse(report_json);
    if (!j.contains("checks")) return false;
    for (const auto& [key, value] : j["checks"].items()) {
        (void)key;
        if (value.is_string() && value.get<std::string>() == "fail")
            return false;
    }
    return true;
}

}  // namespace fplab
