// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes. All checks are exact.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <jetcalc/bigness.hpp>
#include <jetcalc/cli.hpp>
#include <jetcalc/degeneracy.hpp>
#include <jetcalc/expr.hpp>
#include <jetcalc/schur.hpp>
#include <jetcalc/towerchow.hpp>

#include "expr_corpus.hpp"

using namespace jetcalc;
using nlohmann::json;

namespace
{

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void fail(const std::string &why)
    {
        pass = false;
        notes.push_back(why);
    }
    void check(bool ok, const std::string &why)
    {
        if (!ok) {
            fail(why);
        }
    }
};

// Certified bounds emitted by criteria 1, 2 and 5, re-validated by criterion 8.
struct Bound {
    std::string origin;
    MultiPoly poly;
    std::int64_t delta;
};
std::vector<Bound> emitted;

std::string geom_label(const TowerGeometry &g) { return "N=" + std::to_string(g.N()) + " c=" + std::to_string(g.c()); }

MultiPoly d(std::size_t nv, std::size_t i) { return MultiPoly::variable(nv, i - 1); }
MultiPoly k(std::size_t nv, long v) { return MultiPoly::constant(nv, v); }

std::vector<Integer> ones(int c) { return std::vector<Integer>(static_cast<std::size_t>(c), Integer(1)); }

ChowClass random_top_monomial(const TowerGeometry &g, int level, std::mt19937_64 &rng)
{
    int remaining = g.level_dim(level);
    ChowMonomial m;
    m.u.assign(static_cast<std::size_t>(level), 0);
    std::uniform_int_distribution<int> slot(0, level + 1);
    while (remaining > 0) {
        const int s = slot(rng);
        if (s == 0) {
            ++m.h;
            --remaining;
        } else if (s <= level) {
            ++m.u[static_cast<std::size_t>(s - 1)];
            --remaining;
        } else {
            std::uniform_int_distribution<int> idx(1, std::min(remaining, g.n()));
            const int i = idx(rng);
            m.s0.push_back(i);
            remaining -= i;
        }
    }
    std::sort(m.s0.begin(), m.s0.end());
    ChowClass cls(g, level);
    cls.add_term(std::move(m), k(static_cast<std::size_t>(g.c()), 1));
    return cls;
}

// 1. Curve oracle through the command-line front end.
Outcome curve_oracle()
{
    Outcome o;
    const MultiPoly base = d(2, 1) * d(2, 2);
    for (long a : {0L, 1L}) {
        const auto r = cli::run({"delta", "--N", "3", "--c", "2", "--a", std::to_string(a), "--json", "--max", "200"});
        if (r.exit_code != 0) {
            o.fail("a=" + std::to_string(a) + ": exit " + std::to_string(r.exit_code));
            continue;
        }
        const json j = json::parse(r.out);
        const MultiPoly diff = multipoly_from_json(j["difference"], 2);
        // deg K_X of the curve, shifted by a deg X for the extra twist
        const MultiPoly oracle = base * (d(2, 1) + d(2, 2) - k(2, 4 + a));
        o.check(diff == oracle, "a=" + std::to_string(a) + ": difference " + to_string(diff));
        o.check(j["delta"] == 3, "a=" + std::to_string(a) + ": delta " + j["delta"].dump());
        if (j["delta"].is_number()) {
            emitted.push_back({"curve a=" + std::to_string(a), diff, j["delta"].get<std::int64_t>()});
        }
    }
    return o;
}

std::vector<TowerGeometry> morse_grid()
{
    std::vector<TowerGeometry> out;
    for (int N = 2; N <= 6; ++N) {
        for (int c = 1; c < N; ++c) {
            out.emplace_back(N, c);
        }
    }
    for (int c = 2; c < 7; ++c) {
        out.emplace_back(7, c);
    }
    return out;
}

// 2. Morse grid.
Outcome morse_grid_check()
{
    Outcome o;
    for (const auto &g : morse_grid()) {
        for (std::int64_t a : {0, 1}) {
            const auto t0 = Clock::now();
            const MorseReport r = morse_criterion(g, a, default_delta_cap);
            const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
            std::vector<std::string> bad;
            if (!(r.degree_rhs < g.N())) {
                bad.push_back("degree(rhs)=" + std::to_string(r.degree_rhs));
            }
            if (degree(r.difference) != g.N()) {
                bad.push_back("degree(difference)=" + std::to_string(degree(r.difference)));
            }
            const bool dom_eq = !r.difference.is_zero() && dominant(r.difference) == dominant(r.target);
            if (!dom_eq) {
                bad.push_back("dominant(difference)=" + to_string(dominant(r.difference)) + " vs dominant(target)="
                              + to_string(dominant(r.target)) + " [" + to_string(asym_compare(r.difference, r.target))
                              + "]");
            }
            if (!(r.difference.is_zero() ? false : dominant(r.difference).evaluate(ones(g.c())) > 0)) {
                bad.push_back("dominant not positive at (1,...,1)");
            }
            if (!r.delta) {
                bad.push_back("no certified delta <= " + std::to_string(default_delta_cap));
            } else {
                emitted.push_back({"morse " + geom_label(g) + " a=" + std::to_string(a), r.difference, *r.delta});
            }
            std::ostringstream line;
            line << "  [2] " << geom_label(g) << " a=" << a << " kappa=" << g.kappa() << " delta="
                 << (r.delta ? std::to_string(*r.delta) : std::string("none")) << " (" << secs << " s) "
                 << (bad.empty() ? "PASS" : "FAIL");
            for (const auto &b : bad) {
                line << "; " << b;
            }
            std::cout << line.str() << "\n";
            if (!bad.empty()) {
                o.fail(geom_label(g) + " a=" + std::to_string(a));
            }
        }
    }
    return o;
}

// 3. Dual-oracle integration.
Outcome dual_oracle()
{
    Outcome o;
    std::mt19937_64 rng(2024);
    for (int N = 2; N <= 6; ++N) {
        for (int c = 1; c < N; ++c) {
            const TowerGeometry g(N, c);
            Integrator integ(g);
            int mismatches = 0;
            for (int t = 0; t < 100; ++t) {
                const int level = t % (g.kappa() + 1);
                const ChowClass m = random_top_monomial(g, level, rng);
                if (integ.integrate(m) != integrate_by_expansion(g, level, m)) {
                    ++mismatches;
                }
            }
            o.check(mismatches == 0, geom_label(g) + ": " + std::to_string(mismatches) + " mismatches");
        }
    }
    return o;
}

// 4. Conjugate-partition identity.
Outcome schur_sweep()
{
    Outcome o;
    auto sweep = [&](const ClassSequence<MultiPoly> &c, const std::string &label) {
        const auto s = series_inverse(c, 6);
        for (int w = 1; w <= 6; ++w) {
            for (const auto &lambda : partitions_of(w)) {
                o.check(schur_delta(lambda, c) == schur_delta(lambda.conjugate(), s), label + " " + to_string(lambda));
            }
        }
    };
    std::vector<MultiPoly> formal{MultiPoly::constant(6, 1)};
    for (std::size_t i = 0; i < 6; ++i) {
        formal.push_back(MultiPoly::variable(6, i));
    }
    sweep(ClassSequence<MultiPoly>(formal), "formal");

    std::mt19937_64 rng(77);
    for (int t = 0; t < 10; ++t) {
        const int N = std::uniform_int_distribution<int>(3, 8)(rng);
        const int c = std::uniform_int_distribution<int>(1, N - 1)(rng);
        const long m = std::uniform_int_distribution<long>(-3, 3)(rng);
        const TowerGeometry g(N, c);
        sweep(ClassSequence<MultiPoly>(base_segre(g, m)), geom_label(g) + " m=" + std::to_string(m));
    }
    return o;
}

// 5. Numerical positivity for c >= n.
Outcome positivity()
{
    Outcome o;
    std::mt19937_64 rng(55);
    for (int N = 2; N <= 8; ++N) {
        for (int c = 1; c < N; ++c) {
            const TowerGeometry g(N, c);
            if (c < g.n()) {
                continue;
            }
            for (std::int64_t a : {0, 1, 2}) {
                const auto rep = numerical_positivity_report(g, a, default_delta_cap);
                const std::string label = geom_label(g) + " a=" + std::to_string(a);
                o.check(rep.D.has_value(), label + ": unresolved partition");
                o.check(rep.all_dominant_ok(), label + ": dominant determinant identity");
                for (const auto &p : rep.partitions) {
                    if (p.bound) {
                        emitted.push_back({"positivity " + label + " " + to_string(p.lambda), p.delta, *p.bound});
                    }
                    for (int t = 0; t < 5; ++t) {
                        std::vector<Integer> pt;
                        for (int i = 0; i < c; ++i) {
                            pt.emplace_back(std::uniform_int_distribution<long>(1, 50)(rng));
                        }
                        o.check(p.dominant_rhs.evaluate(pt) > 0, label + " " + to_string(p.lambda) + ": split sequence");
                    }
                }
            }
        }
    }
    return o;
}

// 6. Degree estimates over every admissible index tuple.
Outcome degree_estimates()
{
    Outcome o;
    for (int N = 2; N <= 7; ++N) {
        for (int c = 1; c < N; ++c) {
            const TowerGeometry g(N, c);
            const int n = g.n();
            int checked = 0;
            std::vector<int> cur;
            // sorted tuples of positive indices with sum <= n, completed by h^(n - sum)
            std::function<void(int, int)> rec = [&](int lo, int remaining) {
                const auto r = intersection_degree_report(g, cur, remaining);
                ++checked;
                o.check(r.all_ok(), geom_label(g) + " tuple size " + std::to_string(cur.size()) + " l="
                                        + std::to_string(remaining));
                for (int i = lo; i <= remaining; ++i) {
                    cur.push_back(i);
                    rec(i, remaining - i);
                    cur.pop_back();
                }
            };
            rec(1, n);
            // kappa-tuples that may contain zero entries, l = 0
            std::function<void(int, int)> kap = [&](int lo, int remaining) {
                if (static_cast<int>(cur.size()) == g.kappa()) {
                    if (remaining == 0) {
                        const auto r = intersection_degree_report(g, cur, 0);
                        ++checked;
                        o.check(r.all_ok(), geom_label(g) + " kappa tuple");
                    }
                    return;
                }
                for (int i = lo; i <= remaining; ++i) {
                    cur.push_back(i);
                    kap(i, remaining - i);
                    cur.pop_back();
                }
            };
            kap(0, n);
            o.check(checked > 0, geom_label(g) + ": nothing checked");
        }
    }
    return o;
}

// 7. Degeneracy table.
Outcome degeneracy_table()
{
    Outcome o;
    for (int N = 1; N <= 12; ++N) {
        for (int c = 1; c <= N; ++c) {
            const auto r = degeneracy_report({N, c});
            o.check(r.locus_dim == N - 3 * c && r.hyperbolic == (3 * c >= N),
                    "N=" + std::to_string(N) + " c=" + std::to_string(c));
        }
    }
    const auto hci = degeneracy_report({9, 3});
    o.check(hci.locus_dim == 0 && hci.hyperbolic, "N=9 c=3 threshold");
    const auto hyp = degeneracy_report({4, 1});
    o.check(hyp.locus_dim == 1 && (4 - 1) - hyp.locus_dim == 2, "N=4 c=1 codimension 2");
    return o;
}

// 8. Every emitted bound holds at 50 random points above it.
Outcome soundness()
{
    Outcome o;
    std::mt19937_64 rng(88);
    for (const auto &b : emitted) {
        std::uniform_int_distribution<long> dist(b.delta, b.delta + 2000);
        const std::size_t nv = b.poly.num_vars();
        for (int t = 0; t < 50; ++t) {
            std::vector<Integer> pt;
            for (std::size_t i = 0; i < nv; ++i) {
                pt.emplace_back(dist(rng));
            }
            if (!(b.poly.evaluate(pt) > 0)) {
                o.fail(b.origin);
                break;
            }
        }
    }
    o.notes.insert(o.notes.begin(), std::to_string(emitted.size()) + " bounds audited");
    return o;
}

// 9. Command-line contract.
Outcome cli_contract()
{
    Outcome o;
    const TowerGeometry g(5, 2);
    for (const auto &src : expr_corpus()) {
        try {
            const Expr e = parse(src, g, 3);
            const std::string printed = print(e);
            const Expr again = parse(printed, g, 3);
            o.check(again == e && print(again) == printed, "round trip: " + src);
        } catch (const std::exception &ex) {
            o.fail("corpus entry rejected: " + src + " (" + ex.what() + ")");
        }
    }
    for (const std::string src : {"u(1) +", "h $ 2", "(h", "u(4)", "s(1 2)", "h^", "integrate(h)", "2 3"}) {
        const auto r = cli::run({"integrate", "--N", "5", "--c", "2", "--level", "3", "--", src});
        bool positioned = false;
        if (json::accept(r.err)) {
            const json j = json::parse(r.err);
            positioned = j.contains("line") && j.contains("column");
        }
        o.check(r.exit_code == 2 && positioned && r.err.find('\n') == r.err.size() - 1, "malformed: " + src);
    }
    const std::vector<std::vector<std::string>> invocations{
        {"delta", "--N", "5", "--c", "2", "--a", "1", "--json"},
        {"positivity", "--N", "6", "--c", "3", "--a", "0"},
        {"audit", "--N", "4", "--c", "1", "--json"},
        {"segre", "--N", "6", "--c", "2", "--m", "-2"},
        {"schur-verify", "--weight", "5", "--json"},
        {"degeneracy", "--N", "9", "--c", "3"},
        {"integrate", "--N", "4", "--c", "1", "--level", "3", "(l(1) + l(2) + l(3))^7"},
    };
    for (const auto &args : invocations) {
        const auto a = cli::run(args);
        const auto b = cli::run(args);
        o.check(a.exit_code == b.exit_code && a.out == b.out && a.err == b.err && !a.out.empty(),
                "nondeterministic: " + args.front());
    }
    return o;
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char *name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "curve oracle", 1.0, curve_oracle},
        {2, "Morse grid", 600.0, morse_grid_check},
        {3, "dual-oracle integration", 600.0, dual_oracle},
        {4, "Schur identity sweep", 30.0, schur_sweep},
        {5, "numerical positivity", 300.0, positivity},
        {6, "degree estimate exhaustion", 120.0, degree_estimates},
        {7, "degeneracy table", 1.0, degeneracy_table},
        {8, "certificate soundness", 600.0, soundness},
        {9, "CLI contract", 600.0, cli_contract},
    };
    bool all = true;
    for (const auto &c : criteria) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        if (secs > c.limit_seconds) {
            o.fail("runtime " + std::to_string(secs) + " s exceeds " + std::to_string(c.limit_seconds) + " s");
        }
        all = all && o.pass;
        std::printf("%s criterion %d (%s) %.3f s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs);
        for (const auto &n : o.notes) {
            std::printf("    %s\n", n.c_str());
        }
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
