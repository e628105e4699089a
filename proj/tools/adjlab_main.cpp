// adjlab: divisorial and moduli parts of log adjunction on combinatorial
// models.  Exit codes: 0 success, 1 expectation mismatch, 2 bad input,
// 3 comparison budget exhausted.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adjlab/dot_export.hpp"
#include "adjlab/errors.hpp"
#include "adjlab/json_io.hpp"
#include "adjlab/scenarios.hpp"
#include "adjlab/verify.hpp"

namespace {

using namespace adjlab;

struct RunOptions {
    std::string scenario;
    int cap = -1;  // -1: use the scenario's cap
    int depth = 3;
    std::string trace_path;
    std::string dot_path;
    bool approx = false;
};

std::string show(const ExtReal& v, bool approx) {
    std::string s = v.str();
    if (approx && !v.is_rational()) {
        // tighten the cached enclosures so the decimal hint is honest
        for (int i = 0; i < 120; ++i) {
            Enclosure e = v.interval();
            if (Rat(e.hi - e.lo) < Rat(1, 1000000)) break;
            for (const auto& [name, c] : v.coeffs()) v.context()->refine(name);
        }
        std::ostringstream os;
        os << " (~" << v.approx() << ")";
        s += os.str();
    }
    return s;
}

Scenario resolve(const std::string& ref) {
    if (std::filesystem::exists(ref)) return load_scenario(ref);
    return canned(ref);
}

void apply_budget_env(const Scenario& sc) {
    const char* env = std::getenv("ADJLAB_PRECISION_BUDGET");
    if (!env || !sc.ctx) return;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0)
        throw InputError("ADJLAB_PRECISION_BUDGET must be a nonnegative "
                         "integer");
    sc.ctx->set_budget(static_cast<int>(v));
}

int run_curve(const Scenario& sc, const RunOptions& opt) {
    if (!opt.dot_path.empty())
        throw InputError("--dot needs a cover scenario");
    std::vector<std::string> mismatches;
    Json report;
    report["scenario"] = sc.name;
    report["kind"] = "curve";
    Json points = Json::object();
    for (const auto& [pt, fib] : sc.curve.fibers) {
        ExtReal dp = discriminant_mult(fib);
        std::cout << pt << ": discriminant " << show(dp, opt.approx) << "\n";
        Json entry;
        entry["discriminant"] = ext_to_json(dp);
        Json mods = Json::array();
        for (size_t i = 0; i < fib.branches.size(); ++i) {
            ExtReal mod = moduli_mult(fib.branches[i], dp);
            std::cout << "  branch " << i << " (m=" << fib.branches[i].m
                      << ", d=" << show(fib.branches[i].d, opt.approx)
                      << "): moduli " << show(mod, opt.approx) << "\n";
            mods.push_back(ext_to_json(mod));
        }
        entry["moduli"] = mods;
        points[pt] = entry;
        if (auto it = sc.expected.disc_values.find(pt);
            it != sc.expected.disc_values.end() && !(it->second == dp))
            mismatches.push_back("discriminant over " + pt + ": got " +
                                 dp.str() + ", expected " + it->second.str());
        if (auto it = sc.expected.moduli_values.find(pt);
            it != sc.expected.moduli_values.end()) {
            for (size_t i = 0;
                 i < it->second.size() && i < fib.branches.size(); ++i) {
                ExtReal mod = moduli_mult(fib.branches[i], dp);
                if (!(mod == it->second[i]))
                    mismatches.push_back(
                        "moduli over " + pt + ", branch " + std::to_string(i) +
                        ": got " + mod.str() + ", expected " +
                        it->second[i].str());
            }
        }
    }
    report["points"] = points;
    if (!opt.trace_path.empty()) save_text(opt.trace_path, report.dump(2));
    for (const auto& m : mismatches) std::cout << "mismatch: " << m << "\n";
    std::cout << (mismatches.empty() ? "claims hold\n" : "claims failed\n");
    return mismatches.empty() ? 0 : 1;
}

int run_cover(const Scenario& sc, const RunOptions& opt) {
    std::vector<std::string> mismatches;
    // claimed point values refer to the state as loaded
    for (const auto& [pt, want] : sc.expected.point_values) {
        ExtReal got = ddiv_mult_at(sc.cover, pt);
        std::cout << "blowup value over " << pt << ": "
                  << show(got, opt.approx) << "\n";
        if (!(got == want))
            mismatches.push_back("value over " + pt + ": got " + got.str() +
                                 ", expected " + want.str());
    }
    int cap = opt.cap >= 0 ? opt.cap : sc.cap;
    StabilizeResult res = stabilize(sc.cover, cap, opt.depth);
    std::cout << (res.stabilized ? "stabilized" : "cap reached") << " after "
              << res.blowups << " blowups and " << res.saturations
              << " saturations (cap " << cap << ")\n";
    for (const StepRecord& r : res.trace) {
        switch (r.kind) {
            case StepKind::Normalization:
                std::cout << "  normalize " << r.location << " by "
                          << show(r.shift, opt.approx) << "\n";
                break;
            case StepKind::Saturation:
                std::cout << "  saturate " << r.location << " sheet "
                          << r.sheet << "\n";
                break;
            case StepKind::Blowup:
                std::cout << "  blow up " << r.location << ": value "
                          << show(r.ddiv, opt.approx);
                if (r.comult_pair)
                    std::cout << ", co-multiplicities ("
                              << show(r.comult_pair->first, opt.approx) << ", "
                              << show(r.comult_pair->second, opt.approx)
                              << ")";
                std::cout << "\n";
                break;
        }
    }
    if (sc.expected.stabilizes && *sc.expected.stabilizes != res.stabilized)
        mismatches.push_back(std::string("expected the run to ") +
                             (*sc.expected.stabilizes ? "stabilize"
                                                      : "hit the cap"));
    if (sc.expected.blowups && *sc.expected.blowups != res.blowups)
        mismatches.push_back("blowups: got " + std::to_string(res.blowups) +
                             ", expected " +
                             std::to_string(*sc.expected.blowups));
    if (sc.expected.saturations && *sc.expected.saturations != res.saturations)
        mismatches.push_back("saturations: got " +
                             std::to_string(res.saturations) + ", expected " +
                             std::to_string(*sc.expected.saturations));
    if (!opt.trace_path.empty()) {
        Json j = trace_to_json(res);
        j["scenario"] = sc.name;
        save_text(opt.trace_path, j.dump(2));
    }
    if (!opt.dot_path.empty())
        save_text(opt.dot_path, to_dot(res.state, opt.depth));
    for (const auto& m : mismatches) std::cout << "mismatch: " << m << "\n";
    std::cout << (mismatches.empty() ? "claims hold\n" : "claims failed\n");
    return mismatches.empty() ? 0 : 1;
}

int cmd_run(const RunOptions& opt) {
    Scenario sc = resolve(opt.scenario);
    apply_budget_env(sc);
    std::cout << "scenario " << sc.name << "\n";
    if (!sc.expected.note.empty())
        std::cout << "note: " << sc.expected.note << "\n";
    return sc.kind == ScenarioKind::Curve ? run_curve(sc, opt)
                                          : run_cover(sc, opt);
}

int cmd_verify(bool full) {
    std::vector<CriterionResult> rows = acceptance_criteria(full);
    bool all = true;
    for (const auto& r : rows) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " — "
                  << r.detail << "\n";
        if (!r.pass) all = false;
    }
    std::cout << (all ? "all criteria hold" : "criteria failed") << "\n";
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "divisorial and moduli parts of log adjunction on combinatorial "
        "models"};
    app.require_subcommand(1);

    RunOptions opt;
    CLI::App* run = app.add_subcommand(
        "run", "evaluate a scenario (a JSON file or a canned name)");
    run->add_option("scenario", opt.scenario, "scenario file or canned name")
        ->required();
    run->add_option("--cap", opt.cap, "override the scenario's step cap");
    run->add_option("--depth", opt.depth,
                    "probe depth for checks and DOT export (default 3)");
    run->add_option("--trace", opt.trace_path, "write the run's JSON trace");
    run->add_option("--dot", opt.dot_path,
                    "write the final blowup tree as graphviz");
    run->add_flag("--approx", opt.approx,
                  "append decimal approximations to exact values");

    CLI::App* list =
        app.add_subcommand("list-examples", "print the canned scenario names");

    std::string grid = "small";
    CLI::App* verify = app.add_subcommand(
        "verify-all", "run the acceptance criteria suite");
    verify->add_option("--grid", grid, "grid size: small or full")
        ->check(CLI::IsMember({"small", "full"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad usage is an input error
    }

    try {
        if (run->parsed()) return cmd_run(opt);
        if (list->parsed()) {
            for (const auto& name : canned_names()) std::cout << name << "\n";
            return 0;
        }
        if (verify->parsed()) return cmd_verify(grid == "full");
    } catch (const PrecisionExhausted& e) {
        std::cerr << "precision budget exhausted: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
