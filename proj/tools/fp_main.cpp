// fp: generate games, run exact fictitious play, analyze traces, evaluate
// regret bounds, and sweep parameter grids.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error,
// 3 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "fplab/analysis.hpp"
#include "fplab/bounds.hpp"
#include "fplab/engine.hpp"
#include "fplab/generators.hpp"
#include "suites.hpp"

using namespace fplab;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

json rational_json(const Rational& v) {
    return {{"exact", v.str()}, {"float", v.to_double()}};
}

TieRule parse_tie_rule(const std::string& name) {
    if (name == "lowest") return TieRule::LowestIndex;
    if (name == "highest") return TieRule::HighestIndex;
    if (name == "incumbent") return TieRule::IncumbentThenLowest;
    throw UsageError("unknown tie rule '" + name + "'");
}

EpsSchedule parse_schedule(const std::string& name) {
    if (name == "blocks") return EpsSchedule::Blocks;
    if (name == "pow2") return EpsSchedule::Pow2;
    if (name == "all") return EpsSchedule::EveryStep;
    if (name == "none") return EpsSchedule::None;
    throw UsageError("unknown epsilon schedule '" + name + "'");
}

// ---------------------------------------------------------------- gen ----

struct GenArgs {
    std::string family;
    int n = 0;
    std::string k, alpha, beta;
    uint64_t seed = 0;
    std::string size;
    int denom_bits = 20;
    std::string output;
};

int cmd_gen(const GenArgs& a) {
    BimatrixGame game = build_matching_pennies();
    std::ostringstream banner;
    if (a.family == "gn") {
        if (a.n < 2) throw UsageError("gn requires --n >= 2");
        GnParams params;
        if (!a.k.empty()) {
            if (!a.alpha.empty() || !a.beta.empty())
                throw UsageError("give either --k or --alpha/--beta, not both");
            params = gn_params(a.n, Rational::parse(a.k));
        } else if (!a.alpha.empty() && !a.beta.empty()) {
            params = gn_params_from_alpha_beta(a.n, Rational::parse(a.alpha),
                                               Rational::parse(a.beta));
        } else {
            throw UsageError("gn requires --k or both --alpha and --beta");
        }
        if (!params.cycling_guard_ok)
            std::cerr << "warning: rho^(n-1)*beta < 1; block cycling is not "
                         "guaranteed for these parameters\n";
        game = build_gn(params);
        banner << "gn n=" << params.n << " size=" << game.rows() << "x"
               << game.cols() << " alpha=" << params.alpha.str()
               << " beta=" << params.beta.str() << " rho=" << params.rho.str()
               << " rb=" << params.rb.str();
        if (params.delta_equiv) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", *params.delta_equiv);
            banner << " delta_equiv=" << buf;
        }
    } else if (a.family == "shapley") {
        game = build_shapley();
        banner << "shapley size=3x3";
    } else if (a.family == "mp") {
        game = build_matching_pennies();
        banner << "mp size=2x2";
    } else if (a.family == "random") {
        int m = 0, n = 0;
        char x = 0;
        std::istringstream ss(a.size);
        if (!(ss >> m >> x >> n) || x != 'x' || !ss.eof())
            throw UsageError("--size must look like MxN");
        game = build_random(a.seed, m, n, a.denom_bits);
        banner << "random seed=" << a.seed << " size=" << m << "x" << n
               << " denom_bits=" << a.denom_bits;
    } else {
        throw UsageError("unknown family '" + a.family + "'");
    }
    write_game_file(game, a.output);
    std::cout << banner.str() << "\n";
    return 0;
}

// ---------------------------------------------------------------- run ----

struct RunArgs {
    std::string game;
    int64_t steps = 0;
    std::string tie_rule = "lowest";
    std::string start = "1,1";
    std::string schedule = "blocks";
    std::string trace_out;
    std::string stats_out;
    std::string expand_out;
};

int cmd_run(const RunArgs& a) {
    BimatrixGame game = read_game_file(a.game);
    if (a.steps < 1) throw UsageError("--steps must be >= 1");

    FPConfig cfg;
    cfg.tie_rule = parse_tie_rule(a.tie_rule);
    cfg.epsilon_schedule = parse_schedule(a.schedule);
    {
        long r = 0, c = 0;
        char comma = 0;
        std::istringstream ss(a.start);
        if (!(ss >> r >> comma >> c) || comma != ',' || !ss.eof())
            throw UsageError("--start must look like R,C (1-based)");
        if (r < 1 || r > game.rows() || c < 1 || c > game.cols())
            throw UsageError("--start out of bounds for a " +
                             std::to_string(game.rows()) + "x" +
                             std::to_string(game.cols()) + " game");
        cfg.initial_row = static_cast<int>(r - 1);
        cfg.initial_col = static_cast<int>(c - 1);
    }
    if (!a.expand_out.empty() && a.steps > 1000000)
        throw UsageError("--expand is capped at 10^6 steps");
    if (cfg.epsilon_schedule == EpsSchedule::EveryStep && a.steps > 1000000)
        throw UsageError("--eps-schedule all is capped at 10^6 steps");
    if (a.trace_out == "-" && (a.stats_out.empty() || a.stats_out == "-"))
        throw UsageError("--trace-out - conflicts with stats on stdout");

    FPState state = init(game, cfg);
    RunRecorder rec;
    Trace trace = ::run(state, a.steps, &rec);

    if (!a.trace_out.empty()) {
        std::ostringstream out;
        write_trace_csv(trace, out);
        write_text(a.trace_out, out.str());
    }
    if (!a.expand_out.empty()) {
        std::ostringstream out;
        out << "t,row_action,col_action\n";
        int64_t t = 1;
        for (const auto& r : trace.runs)
            for (int64_t i = 0; i < r.length; ++i, ++t)
                out << t << ',' << (r.row_action + 1) << ','
                    << (r.col_action + 1) << '\n';
        write_text(a.expand_out, out.str());
    }

    EpsilonPoint eps = epsilon_now(state);
    json stats;
    stats["t"] = state.t;
    stats["ties_row"] = rec.ties_row;
    stats["ties_col"] = rec.ties_col;
    stats["trace_runs"] = trace.runs.size();
    stats["eps_samples"] = rec.epsilons.size();
    stats["backend"] = state.using_big_accumulators() ? "bigint" : "int64";
    stats["epsilon_final"] = {
        {"row", {{"raw", rational_json(eps.row_raw)},
                 {"norm", rational_json(eps.row_norm)}}},
        {"col", {{"raw", rational_json(eps.col_raw)},
                 {"norm", rational_json(eps.col_norm)}}}};
    std::string stats_text = stats.dump(2) + "\n";
    if (!a.stats_out.empty())
        write_text(a.stats_out, stats_text);
    else if (a.trace_out != "-")
        std::cout << stats_text;
    return 0;
}

// ------------------------------------------------------------- analyze ----

struct AnalyzeArgs {
    std::string game;
    std::string trace;
    int n = 0;
    std::string k, alpha, beta;
    std::string checks;
    std::string report = "-";
};

std::vector<std::string> split_csv_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::optional<GnParams> family_params(int n, const std::string& k,
                                      const std::string& alpha,
                                      const std::string& beta) {
    if (n == 0) return std::nullopt;
    if (!k.empty()) return gn_params(n, Rational::parse(k));
    if (!alpha.empty() && !beta.empty())
        return gn_params_from_alpha_beta(n, Rational::parse(alpha),
                                         Rational::parse(beta));
    throw UsageError("--n needs --k or both --alpha and --beta");
}

int cmd_analyze(const AnalyzeArgs& a) {
    BimatrixGame game = read_game_file(a.game);
    Trace trace = read_trace_csv_file(a.trace);
    std::optional<GnParams> params =
        family_params(a.n, a.k, a.alpha, a.beta);
    std::vector<std::string> checks = split_csv_list(a.checks);
    if (!checks.empty() && !params)
        throw UsageError("--checks requires family parameters (--n with --k "
                         "or --alpha/--beta)");
    std::string report = analysis_report_json(game, trace, params, checks);
    write_text(a.report, report);
    return analysis_report_ok(report) ? 0 : 1;
}

// -------------------------------------------------------------- bounds ----

struct BoundsArgs {
    bool epsilon_star_mode = false;
    bool min_s_mode = false;
    bool certify_mode = false;
    bool exhaustive = false;
    int64_t t = 0;
    int n = 0;
    std::string game, trace, output = "-";
    int64_t stride = 1;
};

int cmd_bounds(const BoundsArgs& a) {
    int modes = int(a.epsilon_star_mode) + int(a.min_s_mode) + int(a.certify_mode);
    if (modes != 1)
        throw UsageError(
            "pick exactly one of --epsilon-star, --min-s, --certify");
    if (a.epsilon_star_mode) {
        Rational v = epsilon_star(a.n, a.t);
        std::ostringstream out;
        out << v.str() << " (" << v.to_double() << ")\n";
        write_text(a.output, out.str());
        return 0;
    }
    if (a.min_s_mode) {
        MinSResult res = brute_force_min_S(
            a.t, a.n,
            a.exhaustive ? MinSMode::AllSequences : MinSMode::BlockCompositions);
        std::ostringstream out;
        write_min_s_csv(res, out);
        write_text(a.output, out.str());
        return 0;
    }
    BimatrixGame game = read_game_file(a.game);
    Trace trace = read_trace_csv_file(a.trace);
    CertifyReport rep = certify_trace_bound(game, trace, a.stride);
    std::ostringstream out;
    out << (rep.pass ? "PASS" : "FAIL") << " samples=" << rep.samples
        << " violations=" << rep.violations;
    if (rep.samples)
        out << " worst_margin=" << rep.worst_margin.str() << " ("
            << rep.worst_margin.to_double() << ") at " << rep.worst_at;
    out << "\n";
    write_text(a.output, out.str());
    return rep.pass ? 0 : 1;
}

// -------------------------------------------------------------- verify ----

int cmd_verify(const std::string& suite, bool quick) {
    bool ok = true;
    if (suite == "core" || suite == "all")
        ok = suites::core_suite(quick, std::cout) && ok;
    if (suite == "gn" || suite == "all")
        ok = suites::gn_suite(quick, std::cout) && ok;
    if (suite == "bounds" || suite == "all")
        ok = suites::bounds_suite(quick, std::cout) && ok;
    std::cout << (ok ? "all checks passed" : "verification FAILED") << "\n";
    return ok ? 0 : 1;
}

// --------------------------------------------------------------- sweep ----

struct SweepArgs {
    std::string family = "gn";
    std::string n_list;
    std::string k_list;
    int64_t steps = 0;  // 0 = run to first pass plus one cycle
    int jobs = 1;
    std::string output_dir;
};

struct SweepTask {
    int n;
    Rational k;
    std::string file;
    std::string report;
    bool ok = false;
    std::string error;
};

int cmd_sweep(const SweepArgs& a) {
    if (a.family != "gn") throw UsageError("sweep supports --family gn");
    if (a.jobs < 1) throw UsageError("--jobs must be >= 1");
    std::vector<int> ns;
    for (const auto& tok : split_csv_list(a.n_list)) ns.push_back(std::stoi(tok));
    std::vector<Rational> ks;
    for (const auto& tok : split_csv_list(a.k_list))
        ks.push_back(Rational::parse(tok));
    if (ns.empty() || ks.empty())
        throw UsageError("--n-list and --k-list must be non-empty");

    std::filesystem::create_directories(a.output_dir);
    std::vector<SweepTask> tasks;
    for (int n : ns)
        for (const Rational& k : ks) {
            SweepTask t;
            t.n = n;
            t.k = k;
            std::string ktag = k.num().str();
            if (!k.is_integer()) ktag += "-" + k.den().str();
            t.file = "gn_n" + std::to_string(n) + "_k" + ktag + ".json";
            tasks.push_back(std::move(t));
        }

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            SweepTask& task = tasks[i];
            try {
                GnParams params = gn_params(task.n, task.k);
                BimatrixGame game = build_gn(params);
                Trace trace;
                if (a.steps == 0) {
                    trace = certify_gn(params, 0, 1).trace;
                } else {
                    FPState st = init(game, FPConfig{});
                    trace = ::run(st, a.steps);
                }
                task.report = analysis_report_json(game, trace, params, {});
                task.ok = analysis_report_ok(task.report);
                write_text(a.output_dir + "/" + task.file, task.report);
            } catch (const std::exception& e) {
                task.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < a.jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // aggregated index in task order, independent of worker scheduling
    json index = json::array();
    bool all_ok = true;
    for (const auto& task : tasks) {
        json entry;
        entry["n"] = task.n;
        entry["k"] = task.k.str();
        entry["file"] = task.file;
        if (task.error.empty()) {
            entry["ok"] = task.ok;
        } else {
            entry["ok"] = false;
            entry["error"] = task.error;
        }
        all_ok = all_ok && entry["ok"].get<bool>();
        index.push_back(std::move(entry));
    }
    write_text(a.output_dir + "/index.json", index.dump(2) + "\n");
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "fp: exact fictitious-play laboratory for two-player normal-form "
        "games"};
    app.require_subcommand(1);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "generate a game file");
    gen->add_option("--family", gen_args.family, "gn|shapley|mp|random")
        ->required();
    gen->add_option("--n", gen_args.n, "block parameter (game is 4n x 4n)");
    gen->add_option("--k", gen_args.k, "rational k > 1; alpha=1+1/k");
    gen->add_option("--alpha", gen_args.alpha, "override alpha");
    gen->add_option("--beta", gen_args.beta, "override beta");
    gen->add_option("--seed", gen_args.seed, "random family seed");
    gen->add_option("--size", gen_args.size, "random family MxN");
    gen->add_option("--denom-bits", gen_args.denom_bits,
                    "random family denominator bits (<= 30)");
    gen->add_option("-o,--output", gen_args.output, "output .fpg file")
        ->required();

    RunArgs run_args;
    auto* runc = app.add_subcommand("run", "run fictitious play on a game");
    runc->add_option("--game", run_args.game, ".fpg file")->required();
    runc->add_option("--steps", run_args.steps, "steps to run")->required();
    runc->add_option("--tie-break", run_args.tie_rule,
                     "lowest|highest|incumbent");
    runc->add_option("--start", run_args.start, "initial actions R,C (1-based)");
    runc->add_option("--eps-schedule", run_args.schedule,
                     "blocks|pow2|all|none");
    runc->add_option("--trace-out", run_args.trace_out, "RLE trace CSV path");
    runc->add_option("--stats-out", run_args.stats_out, "stats JSON path");
    runc->add_option("--expand", run_args.expand_out,
                     "full per-step CSV (steps capped at 10^6)");

    AnalyzeArgs an_args;
    auto* an = app.add_subcommand("analyze", "analyze a recorded trace");
    an->add_option("--game", an_args.game, ".fpg file")->required();
    an->add_option("--trace", an_args.trace, "trace CSV")->required();
    an->add_option("--n", an_args.n, "family block parameter");
    an->add_option("--k", an_args.k, "family k");
    an->add_option("--alpha", an_args.alpha, "family alpha");
    an->add_option("--beta", an_args.beta, "family beta");
    an->add_option("--checks", an_args.checks,
                   "comma list: structure,recurrences,ratios,tailmass,ne");
    an->add_option("--report", an_args.report, "output JSON path or -");

    BoundsArgs b_args;
    auto* bo = app.add_subcommand("bounds", "regret bound computations");
    bo->add_flag("--epsilon-star", b_args.epsilon_star_mode,
                 "evaluate 1/2 + 1/t - 1/(2n)");
    bo->add_flag("--min-s", b_args.min_s_mode, "minimize S by brute force");
    bo->add_flag("--certify", b_args.certify_mode,
                 "check trace regrets against the bounds");
    bo->add_flag("--exhaustive", b_args.exhaustive,
                 "search all sequences instead of block compositions");
    bo->add_option("--t", b_args.t, "sequence length");
    bo->add_option("--n", b_args.n, "strategy count");
    bo->add_option("--game", b_args.game, ".fpg file (certify)");
    bo->add_option("--trace", b_args.trace, "trace CSV (certify)");
    bo->add_option("--stride", b_args.stride, "certify sampling stride");
    bo->add_option("-o,--output", b_args.output, "output path or -");

    std::string verify_suite;
    bool verify_quick = false;
    auto* ve = app.add_subcommand("verify", "run built-in property suites");
    ve->add_option("--suite", verify_suite, "core|gn|bounds|all")->required();
    ve->add_flag("--quick", verify_quick, "smaller sizes");

    SweepArgs s_args;
    auto* sw = app.add_subcommand("sweep", "run a family parameter grid");
    sw->add_option("--family", s_args.family, "gn");
    sw->add_option("--n-list", s_args.n_list, "comma list of n")->required();
    sw->add_option("--k-list", s_args.k_list, "comma list of k")->required();
    sw->add_option("--steps", s_args.steps,
                   "steps per run (0 = first pass plus one cycle)");
    sw->add_option("--jobs", s_args.jobs, "parallel workers");
    sw->add_option("-o,--output", s_args.output_dir, "output directory")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_args);
        if (runc->parsed()) return cmd_run(run_args);
        if (an->parsed()) return cmd_analyze(an_args);
        if (bo->parsed()) return cmd_bounds(b_args);
        if (ve->parsed()) {
            if (verify_suite != "core" && verify_suite != "gn" &&
                verify_suite != "bounds" && verify_suite != "all")
                throw UsageError("unknown suite '" + verify_suite + "'");
            return cmd_verify(verify_suite, verify_quick);
        }
        if (sw->parsed()) return cmd_sweep(s_args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::overflow_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
