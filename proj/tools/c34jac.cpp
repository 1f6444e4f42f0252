// Command-line front end for certified Jacobian arithmetic on C_{3,4}
// curves: divisor I/O, group operations, scalar multiplication, operation
// benchmarking, and a quick self-test.
//
// Exit codes: 0 success, 2 parse error, 3 sampling exhausted.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "c34/jacobian.hpp"

namespace {

using namespace c34;

struct Session {
    Curve34 curve;
    std::optional<CurveConstants> consts;  // absent: fused formulas unusable
    PipelineMode mode = PipelineMode::fused;
    std::mt19937_64 rng;

    explicit Session(const Curve34& c) : curve(c), rng(0) {
        try {
            consts = derive_constants(curve);
        } catch (const InconsistentExtraction&) {
            consts = std::nullopt;
        }
    }

    PipelineMode effective_mode() const {
        return consts ? mode : PipelineMode::generic;
    }
    CurveConstants cc() const {
        std::uint64_t p = curve.modulus();
        return consts ? *consts
                      : CurveConstants{Fp::zero(p), Fp::zero(p), Fp::zero(p)};
    }
};

Curve34 make_curve(const std::string& curve_text, std::uint64_t p_flag) {
    if (!curve_text.empty()) return parse_curve(curve_text);
    if (p_flag != 0)  // shortcut: y^3 = x^4 + 1 over F_p, i.e. c00 = -1
        return Curve34::from_int_coeffs(p_flag, {-1, 0, 0, 0, 0, 0, 0, 0, 0});
    throw ParseError("no curve given; use --curve or --p", 0);
}

void print_result(const GroupResult& r) {
    std::cout << serialize_divisor(r.value) << "\n";
    if (r.fallback) std::cout << "fallback=true\n";
}

int cmd_random(Session& s) {
    TypicalDivisor D = random_typical(s.curve, s.rng);
    std::cout << serialize_divisor(JacobianElement::typical(D)) << "\n";
    return 0;
}

int cmd_add(Session& s, const std::vector<std::string>& divs) {
    if (divs.size() != 2) throw ParseError("add needs exactly two --div", 0);
    OpCounter ctx;
    JacobianElement x = parse_divisor(divs[0], s.curve.modulus());
    JacobianElement y = parse_divisor(divs[1], s.curve.modulus());
    print_result(group_add(s.curve, s.cc(), x, y, s.effective_mode(), ctx));
    return 0;
}

int cmd_double(Session& s, const std::vector<std::string>& divs) {
    if (divs.size() != 1) throw ParseError("double needs exactly one --div", 0);
    OpCounter ctx;
    JacobianElement x = parse_divisor(divs[0], s.curve.modulus());
    print_result(group_double(s.curve, s.cc(), x, s.effective_mode(), ctx));
    return 0;
}

int cmd_neg(Session& s, const std::vector<std::string>& divs) {
    if (divs.size() != 1) throw ParseError("neg needs exactly one --div", 0);
    OpCounter ctx;
    JacobianElement x = parse_divisor(divs[0], s.curve.modulus());
    print_result(group_neg(s.curve, x, ctx));
    return 0;
}

int cmd_smul(Session& s, std::int64_t n, const std::vector<std::string>& divs) {
    if (divs.size() != 1) throw ParseError("smul needs exactly one --div", 0);
    OpCounter ctx;
    JacobianElement x = parse_divisor(divs[0], s.curve.modulus());
    print_result(group_smul(s.curve, s.cc(), n, x, s.effective_mode(), ctx));
    return 0;
}

int cmd_bench(Session& s, int trials) {
    if (!s.consts) {
        std::cout << "bench requires a curve supported by the fused "
                     "formulas (constant extraction failed)\n";
        return 1;
    }
    CurveConstants cc = *s.consts;
    std::map<std::pair<std::uint64_t, std::uint64_t>, int> fused_hist;
    OpCounter add_tot, dub_tot;
    int add_runs = 0, dub_runs = 0, fallbacks = 0;
    OpCounter ctx;

    auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < trials; ++k) {
        TypicalDivisor D = random_typical(s.curve, s.rng);
        TypicalDivisor E = random_typical(s.curve, s.rng);
        JacobianElement x = JacobianElement::typical(
            ensure_triple(s.curve, JacobianElement::typical(D), ctx));
        JacobianElement y = JacobianElement::typical(
            ensure_triple(s.curve, JacobianElement::typical(E), ctx));

        // fused-stage histogram, measured in isolation
        OpCounter front;
        AddResult ar = add_divisors(s.curve,
                                    wnd_basis(s.curve, D, 10, front),
                                    wnd_basis(s.curve, E, 10, front), front);
        if (ar.success) {
            OpCounter stage0 = front;
            FusedResult fr =
                fused_flipflip(STPair::from_elements(ar.s, ar.t), cc, front);
            if (fr.success) {
                OpCounter d = front - stage0;
                ++fused_hist[{d.mul, d.inv}];
            }
        }

        OpCounter a0 = ctx;
        GroupResult ga = group_add(s.curve, cc, x, y, PipelineMode::fused, ctx);
        if (ga.fallback) {
            ++fallbacks;
        } else {
            add_tot.mul += (ctx - a0).mul;
            add_tot.inv += (ctx - a0).inv;
            ++add_runs;
        }

        OpCounter d0 = ctx;
        GroupResult gd = group_double(s.curve, cc, x, PipelineMode::fused, ctx);
        if (gd.fallback) {
            ++fallbacks;
        } else {
            dub_tot.mul += (ctx - d0).mul;
            dub_tot.inv += (ctx - d0).inv;
            ++dub_runs;
        }
    }
    auto t1 = std::chrono::steady_clock::now();
    double ms =
        std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0)
            .count() /
        1000.0;

    std::cout << "fused-stage histogram over " << trials << " trials:\n";
    bool spike_ok = fused_hist.size() == 1 &&
                    fused_hist.begin()->first ==
                        std::pair<std::uint64_t, std::uint64_t>{19, 1};
    for (const auto& [key, count] : fused_hist)
        std::cout << "  (" << key.first << "M, " << key.second
                  << "I): " << count << "\n";
    std::cout << "fused stage exactly (19M, 1I): "
              << (spike_ok ? "yes" : "NO") << "\n";
    if (add_runs)
        std::cout << "addition mean: " << (add_tot.mul / add_runs) << "M "
                  << (add_tot.inv / add_runs)
                  << "I   (reference front-end formulas: 98M 2I)\n";
    if (dub_runs)
        std::cout << "doubling mean: " << (dub_tot.mul / dub_runs) << "M "
                  << (dub_tot.inv / dub_runs)
                  << "I   (reference front-end formulas: 110M 2I)\n";
    std::cout << "fallback rate: " << fallbacks << "/" << 2 * trials << "\n";
    std::cout << "wall clock: " << ms << " ms for " << 2 * trials
              << " group operations\n";
    return spike_ok ? 0 : 1;
}

int cmd_selftest(Session& s, int trials) {
    OpCounter ctx;
    int failures = 0;
    auto check = [&](bool ok, const char* what) {
        std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
        if (!ok) ++failures;
    };
    for (int k = 0; k < trials; ++k) {
        TypicalDivisor D = random_typical(s.curve, s.rng);
        TypicalDivisor E = random_typical(s.curve, s.rng);
        JacobianElement x = JacobianElement::typical(D);
        JacobianElement y = JacobianElement::typical(E);

        GroupResult xy =
            group_add(s.curve, s.cc(), x, y, s.effective_mode(), ctx);
        GroupResult yx =
            group_add(s.curve, s.cc(), y, x, s.effective_mode(), ctx);
        check(xy.value == yx.value, "commutativity");

        GroupResult nx = group_neg(s.curve, x, ctx);
        GroupResult z =
            group_add(s.curve, s.cc(), x, nx.value, s.effective_mode(), ctx);
        check(z.value.is_zero(), "x + (-x) = 0");

        GroupResult dx =
            group_double(s.curve, s.cc(), x, s.effective_mode(), ctx);
        check(oracle_class_equal(
                  s.curve, dx.value,
                  detail::oracle_reduce(
                      s.curve, oracle_double(s.curve, oracle_from_typical(
                                                          s.curve, D)))),
              "doubling matches oracle");
    }
    std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED")
              << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified Jacobian arithmetic for C_{3,4} curves"};
    app.require_subcommand(1);

    std::string curve_text;
    std::uint64_t p_flag = 0;
    std::vector<std::string> divs;
    std::uint64_t seed = 0;
    int trials = 100;
    std::int64_t n = 1;
    std::string mode = "fused";
    app.add_option("--curve", curve_text,
                   "curve text: curve p=<dec> c=<9 comma-separated>");
    app.add_option("--p", p_flag, "shortcut curve y^3 = x^4 + 1 over F_p");
    app.add_option("--div", divs, "divisor text (repeatable)");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--trials", trials, "trial count for bench/selftest");
    app.add_option("--n", n, "scalar for smul");
    app.add_option("--mode", mode, "pipeline: fused (default) or generic");

    auto* v_random = app.add_subcommand("random", "sample a typical divisor");
    auto* v_add = app.add_subcommand("add", "add two divisor classes");
    auto* v_double = app.add_subcommand("double", "double a divisor class");
    auto* v_neg = app.add_subcommand("neg", "negate a divisor class");
    auto* v_smul = app.add_subcommand("smul", "scalar-multiply by --n");
    auto* v_bench = app.add_subcommand("bench", "operation-count benchmark");
    auto* v_selftest = app.add_subcommand("selftest", "quick property check");
    for (CLI::App* sub : {v_random, v_add, v_double, v_neg, v_smul, v_bench,
                          v_selftest})
        sub->fallthrough();  // let flags after the verb reach the main app

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        Session s(make_curve(curve_text, p_flag));
        if (mode == "generic") s.mode = c34::PipelineMode::generic;
        else if (mode != "fused") throw c34::ParseError("bad --mode", 0);
        s.rng.seed(seed);
        if (v_random->parsed()) return cmd_random(s);
        if (v_add->parsed()) return cmd_add(s, divs);
        if (v_double->parsed()) return cmd_double(s, divs);
        if (v_neg->parsed()) return cmd_neg(s, divs);
        if (v_smul->parsed()) return cmd_smul(s, n, divs);
        if (v_bench->parsed()) return cmd_bench(s, trials);
        if (v_selftest->parsed()) return cmd_selftest(s, std::max(1, trials / 20));
    } catch (const c34::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const c34::SamplingExhausted& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
