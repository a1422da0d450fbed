#ifndef JETCALC_CLI_HPP
#define JETCALC_CLI_HPP

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <jetcalc/bigness.hpp>
#include <jetcalc/degeneracy.hpp>
#include <jetcalc/expr.hpp>
#include <jetcalc/polyring.hpp>
#include <jetcalc/schur.hpp>
#include <jetcalc/towerchow.hpp>

namespace jetcalc::cli
{

enum ExitCode : int { ok = 0, no_certificate = 1, usage = 2, precondition = 3 };

struct Result {
    int exit_code = ok;
    std::string out;
    std::string err;
};

class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

namespace detail
{

using json = nlohmann::ordered_json;

inline std::string diagnostic(const std::string &kind, const std::string &message)
{
    json j;
    j["error"] = kind;
    j["message"] = message;
    return j.dump() + "\n";
}

inline std::string diagnostic(const ParseError &e)
{
    json j;
    j["error"] = e.kind();
    j["line"] = e.pos().line;
    j["column"] = e.pos().column;
    j["expected"] = e.expected();
    j["message"] = e.what();
    return j.dump() + "\n";
}

// Cap for the delta / D search: --max, else JETCALC_DELTA_MAX, else 200.
inline std::int64_t delta_cap(const std::optional<std::int64_t> &flag)
{
    if (flag) {
        return *flag;
    }
    const char *env = std::getenv("JETCALC_DELTA_MAX");
    if (env == nullptr || *env == '\0') {
        return default_delta_cap;
    }
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(env, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used != std::string(env).size() || v < 0) {
        throw UsageError("JETCALC_DELTA_MAX must be a non-negative integer (got '" + std::string(env) + "')");
    }
    return v;
}

inline std::string opt_text(const std::optional<std::int64_t> &v)
{
    return v ? std::to_string(*v) : std::string("none");
}

struct Options {
    int N = 0;
    int c = 0;
    std::int64_t m = 0;
    std::int64_t a = 0;
    int level = 0;
    int weight = 0;
    std::string expr;
    std::optional<std::int64_t> max;
    bool json = false;
};

inline int cmd_segre(const Options &o, std::ostream &out)
{
    const TowerGeometry g(o.N, o.c);
    const SegreList s = base_segre(g, Integer(o.m));
    if (o.json) {
        json j;
        j["N"] = g.N();
        j["c"] = g.c();
        j["m"] = o.m;
        auto list = json::array();
        for (const auto &p : s) {
            list.push_back(to_json(p));
        }
        j["segre"] = std::move(list);
        out << j.dump() << "\n";
    } else {
        for (std::size_t i = 0; i < s.size(); ++i) {
            out << "s" << i << " = " << to_string(s[i]) << "\n";
        }
    }
    return ok;
}

inline int cmd_integrate(const Options &o, std::ostream &out)
{
    const TowerGeometry g(o.N, o.c);
    const Expr e = parse(o.expr, g, o.level);
    const MultiPoly v = evaluate_integral(e, g, o.level);
    if (o.json) {
        json j;
        j["N"] = g.N();
        j["c"] = g.c();
        j["level"] = o.level;
        j["expr"] = print(e);
        j["value"] = to_json(v);
        j["text"] = to_string(v);
        out << j.dump() << "\n";
    } else {
        out << to_string(v) << "\n";
    }
    return ok;
}

inline int cmd_delta(const Options &o, std::ostream &out)
{
    const TowerGeometry g(o.N, o.c);
    const MorseReport r = morse_criterion(g, o.a, delta_cap(o.max));
    if (o.json) {
        out << to_json(r).dump() << "\n";
    } else {
        out << "N=" << g.N() << " c=" << g.c() << " n=" << g.n() << " kappa=" << g.kappa() << " b=" << g.b()
            << " a=" << r.a << " m=" << r.m << "\n";
        out << "lhs = " << to_string(r.lhs) << "\n";
        out << "rhs = " << to_string(r.rhs) << "\n";
        out << "difference = " << to_string(r.difference) << "\n";
        out << "degree_rhs = " << (r.degree_rhs == minus_infinity ? std::string("-inf") : std::to_string(r.degree_rhs))
            << "\n";
        out << "dominant_check = " << (r.dominant_check ? "true" : "false") << " (" << to_string(r.dominant_order)
            << ")\n";
        out << "delta = " << opt_text(r.delta) << " (cap " << r.cap << ")\n";
    }
    return r.delta ? ok : no_certificate;
}

inline int cmd_positivity(const Options &o, std::ostream &out)
{
    const TowerGeometry g(o.N, o.c);
    if (o.a < 0) {
        throw precondition_error("positivity: a must be >= 0");
    }
    const NumericalPositivityReport r = numerical_positivity_report(g, o.a, delta_cap(o.max));
    if (o.json) {
        out << to_json(r).dump() << "\n";
    } else {
        out << "N=" << g.N() << " c=" << g.c() << " n=" << g.n() << " a=" << r.a << "\n";
        for (const auto &p : r.partitions) {
            out << "lambda=" << to_string(p.lambda) << " conjugate=" << to_string(p.conjugate)
                << " dominant_ok=" << (p.dominant_ok ? "true" : "false") << " bound=" << opt_text(p.bound)
                << " delta = " << to_string(p.delta) << "\n";
        }
        out << "D = " << opt_text(r.D) << " (cap " << r.cap << ")\n";
    }
    return r.D ? ok : no_certificate;
}

inline int cmd_audit(const Options &o, std::ostream &out)
{
    const TowerGeometry g(o.N, o.c);
    const TechnicalLemmaAudit a = technical_lemma_audit(g);
    if (o.json) {
        out << to_json(a).dump() << "\n";
    } else {
        out << "N=" << g.N() << " c=" << g.c() << " n=" << g.n() << " kappa=" << g.kappa() << "\n";
        out << "h: " << a.h_samples - a.h_failures << "/" << a.h_samples << " ok\n";
        out << "tower segre: " << a.tower_segre_samples - a.tower_segre_failures << "/" << a.tower_segre_samples
            << " ok\n";
        out << "lower segre: " << a.lower_segre_samples - a.lower_segre_failures << "/" << a.lower_segre_samples
            << " ok\n";
        for (const auto &s : a.descent) {
            out << "level " << s.level << " -> " << s.level - 1 << ": "
                << (s.upper.is_zero() ? std::string("0") : to_string(dominant(s.upper))) << " vs "
                << (s.lower.is_zero() ? std::string("0") : to_string(dominant(s.lower)))
                << (s.dominant_equal ? " equal" : " DIFFERENT") << "\n";
        }
        out << (a.ok() ? "ok" : "FAILED") << "\n";
    }
    return a.ok() ? ok : no_certificate;
}

inline int cmd_degeneracy(const Options &o, std::ostream &out)
{
    out << to_json(degeneracy_report(DegeneracyInput{o.N, o.c})).dump() << "\n";
    return ok;
}

inline int cmd_schur_verify(const Options &o, std::ostream &out)
{
    const std::size_t nv = static_cast<std::size_t>(std::max(o.weight, 1));
    std::vector<MultiPoly> cs{MultiPoly::constant(nv, 1)};
    for (int i = 1; i <= o.weight; ++i) {
        cs.push_back(MultiPoly::variable(nv, static_cast<std::size_t>(i - 1)));
    }
    const ClassSequence<MultiPoly> c(std::move(cs));
    const ClassSequence<MultiPoly> s = series_inverse(c, o.weight);
    int checked = 0;
    int failed = 0;
    auto rows = json::array();
    for (int w = 1; w <= o.weight; ++w) {
        for (const Partition &lambda : partitions_of(w)) {
            const bool pass = schur_delta(lambda, c) == schur_delta(lambda.conjugate(), s);
            ++checked;
            failed += pass ? 0 : 1;
            if (o.json) {
                json r;
                r["lambda"] = lambda.parts();
                r["conjugate"] = lambda.conjugate().parts();
                r["ok"] = pass;
                rows.push_back(std::move(r));
            } else {
                out << to_string(lambda) << " conjugate=" << to_string(lambda.conjugate()) << (pass ? " ok" : " FAILED")
                    << "\n";
            }
        }
    }
    if (o.json) {
        json j;
        j["weight"] = o.weight;
        j["partitions"] = std::move(rows);
        j["checked"] = checked;
        j["failed"] = failed;
        out << j.dump() << "\n";
    } else {
        out << checked - failed << "/" << checked << " partitions pass\n";
    }
    return failed == 0 ? ok : no_certificate;
}

} // namespace detail

// Runs one invocation; args excludes the program name.
inline Result run(const std::vector<std::string> &args)
{
    detail::Options o;
    CLI::App app{"Exact intersection numbers on jet towers of complete intersections", "jetcalc"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand all help");

    auto geometry = [&o](CLI::App *sub) {
        sub->add_option("--N", o.N, "ambient projective dimension")->required();
        sub->add_option("--c", o.c, "codimension (number of hypersurfaces)")->required();
    };
    auto json_flag = [&o](CLI::App *sub) { sub->add_flag("--json", o.json, "JSON output"); };

    CLI::App *segre = app.add_subcommand("segre", "Segre classes of Omega_X(m)");
    geometry(segre);
    segre->add_option("--m", o.m, "twist")->required();
    json_flag(segre);

    CLI::App *integrate_cmd = app.add_subcommand("integrate", "Integrate an expression over a tower level");
    geometry(integrate_cmd);
    integrate_cmd->add_option("--level", o.level, "tower level")->required()->check(CLI::NonNegativeNumber);
    integrate_cmd->add_option("expr", o.expr, "expression")->required();
    json_flag(integrate_cmd);

    CLI::App *delta = app.add_subcommand("delta", "Morse bigness criterion with certified degree bound");
    geometry(delta);
    delta->add_option("--a", o.a, "twist a >= 0")->required();
    delta->add_option("--max", o.max, "search cap")->check(CLI::NonNegativeNumber);
    json_flag(delta);

    CLI::App *positivity = app.add_subcommand("positivity", "Numerical positivity of Omega_X(-a)");
    geometry(positivity);
    positivity->add_option("--a", o.a, "twist a >= 0")->required();
    positivity->add_option("--max", o.max, "search cap")->check(CLI::NonNegativeNumber);
    json_flag(positivity);

    CLI::App *audit = app.add_subcommand("audit", "Degree estimates on the tower");
    geometry(audit);
    json_flag(audit);

    CLI::App *degeneracy = app.add_subcommand("degeneracy", "Dimension of the entire-curve locus");
    geometry(degeneracy);

    CLI::App *schur_verify = app.add_subcommand("schur-verify", "Check Delta_lambda(c) = Delta_conj(lambda)(s)");
    schur_verify->add_option("--weight", o.weight, "maximal partition weight")->required()->check(CLI::Range(0, 12));
    json_flag(schur_verify);

    Result res;
    std::ostringstream out;
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        res.out = app.help();
        return res;
    } catch (const CLI::CallForAllHelp &) {
        res.out = app.help("", CLI::AppFormatMode::All);
        return res;
    } catch (const CLI::ParseError &e) {
        res.exit_code = usage;
        res.err = detail::diagnostic("usage", e.what());
        return res;
    }

    try {
        if (segre->parsed()) {
            res.exit_code = detail::cmd_segre(o, out);
        } else if (integrate_cmd->parsed()) {
            res.exit_code = detail::cmd_integrate(o, out);
        } else if (delta->parsed()) {
            res.exit_code = detail::cmd_delta(o, out);
        } else if (positivity->parsed()) {
            res.exit_code = detail::cmd_positivity(o, out);
        } else if (audit->parsed()) {
            res.exit_code = detail::cmd_audit(o, out);
        } else if (degeneracy->parsed()) {
            res.exit_code = detail::cmd_degeneracy(o, out);
        } else {
            res.exit_code = detail::cmd_schur_verify(o, out);
        }
    } catch (const ParseError &e) {
        res.exit_code = usage;
        res.err = detail::diagnostic(e);
        return res;
    } catch (const UsageError &e) {
        res.exit_code = usage;
        res.err = detail::diagnostic("usage", e.what());
        return res;
    } catch (const std::logic_error &e) {
        // invalid geometry, level outside the tower, c < n for positivity, ...
        res.exit_code = precondition;
        res.err = detail::diagnostic("precondition", e.what());
        return res;
    }
    res.out = out.str();
    if (res.exit_code == no_certificate) {
        res.err = detail::diagnostic("no-certificate", "no certificate found within the search cap");
    }
    return res;
}

} // namespace jetcalc::cli

#endif // JETCALC_CLI_HPP
