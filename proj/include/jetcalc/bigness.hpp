#ifndef JETCALC_BIGNESS_HPP
#define JETCALC_BIGNESS_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include <jetcalc/polyring.hpp>
#include <jetcalc/towerchow.hpp>

namespace jetcalc
{

inline constexpr std::int64_t default_delta_cap = 200;

// O_{X_k}(a_1, ..., a_k) (x) pi^* O_X(t).
struct TwistVector {
    std::vector<std::int64_t> a;
    std::int64_t t = 0;

    int level() const { return static_cast<int>(a.size()); }

    std::vector<std::int64_t> partial_sums() const
    {
        std::vector<std::int64_t> b;
        std::int64_t acc = 0;
        for (auto x : a) {
            acc += x;
            b.push_back(acc);
        }
        return b;
    }

    // sum_j a_j u_j + t h
    LinearForm form() const
    {
        LinearForm f;
        f.coeffs.push_back(t);
        f.coeffs.insert(f.coeffs.end(), a.begin(), a.end());
        return f.normalized();
    }
};

struct EffectivityResult {
    bool effective = true;
    std::vector<std::int64_t> partial_sums;
    std::optional<int> first_failure; // 1-based j with b_j < 0
};

// The twisted bundle differs from O_{X_k}(b_k) (x) pi^*O_X(t) by an effective
// combination of the divisors D_j exactly when every partial sum is >= 0.
inline EffectivityResult effectivity_check(const TwistVector &tv)
{
    EffectivityResult r;
    r.partial_sums = tv.partial_sums();
    for (std::size_t j = 0; j < r.partial_sums.size(); ++j) {
        if (r.partial_sums[j] < 0) {
            r.effective = false;
            r.first_failure = static_cast<int>(j) + 1;
            break;
        }
    }
    return r;
}

// Twists of L_k = O_{X_k}(2*3^{k-2}, ..., 6, 2, 1) (x) pi^* O_X(2*3^{k-1}).
inline TwistVector l_twists(int k)
{
    if (k < 1) {
        throw std::out_of_range("L_k is defined for k >= 1");
    }
    TwistVector tv;
    tv.a.assign(static_cast<std::size_t>(k), 0);
    tv.a[static_cast<std::size_t>(k - 1)] = 1;
    std::int64_t w = 2;
    for (int j = k - 1; j >= 1; --j) {
        tv.a[static_cast<std::size_t>(j - 1)] = w;
        w *= 3;
    }
    tv.t = w;
    return tv;
}

inline LinearForm l_form(int k) { return l_twists(k).form(); }

// Twists of F = L_kappa (x) ... (x) L_1.
inline TwistVector canonical_twists(int kappa)
{
    TwistVector f;
    f.a.assign(static_cast<std::size_t>(kappa), 0);
    for (int k = 1; k <= kappa; ++k) {
        const TwistVector lk = l_twists(k);
        for (int j = 0; j < k; ++j) {
            f.a[static_cast<std::size_t>(j)] += lk.a[static_cast<std::size_t>(j)];
        }
        f.t += lk.t;
    }
    return f;
}

inline ChowClass linear_class(const TowerGeometry &g, int level, const LinearForm &f)
{
    const std::size_t nv = static_cast<std::size_t>(g.c());
    if (f.top_level() > level) {
        throw std::out_of_range("lattice class involves u_" + std::to_string(f.top_level()) + " above level "
                                + std::to_string(level));
    }
    ChowClass r(g, level);
    if (f.coeff(0) != 0) {
        r += ChowClass::h(g, level) * MultiPoly::constant(nv, f.coeff(0));
    }
    for (int j = 1; j <= level; ++j) {
        if (f.coeff(j) != 0) {
            r += ChowClass::u(g, level, j) * MultiPoly::constant(nv, f.coeff(j));
        }
    }
    return r;
}

// c_1(L_k) = u_k + 2 u_{k-1} + 6 u_{k-2} + ... + 2*3^{k-2} u_1 + 2*3^{k-1} h on X_k.
inline ChowClass l_class(const TowerGeometry &g, int k)
{
    if (k < 1 || k > g.kappa()) {
        throw std::out_of_range("l_class: k=" + std::to_string(k) + " outside 1.." + std::to_string(g.kappa()));
    }
    return linear_class(g, k, l_form(k));
}

struct MorseReport {
    TowerGeometry geometry;
    std::int64_t a = 0;
    std::int64_t m = 0;
    int level_dim = 0; // n_kappa
    MultiPoly lhs;     // F^{n_kappa}
    MultiPoly rhs;     // n_kappa F^{n_kappa - 1} G
    MultiPoly difference;
    MultiPoly target; // integral over X of s_b s_c^{kappa-1}
    bool dominant_check = false;
    AsymOrder dominant_order = AsymOrder::incomparable; // lhs against target
    Degree degree_rhs = minus_infinity;
    std::optional<std::int64_t> delta;
    std::int64_t cap = 0;
};

// integral over X of s_b s_c^{kappa-1}
inline MultiPoly dominant_block_target(const TowerGeometry &g, Integrator &integrator)
{
    TowerProduct p;
    p.segre.push_back({0, g.b()});
    for (int i = 1; i < g.kappa(); ++i) {
        p.segre.push_back({0, g.c()});
    }
    return integrator.integrate(0, p);
}

// Holomorphic Morse test F^{n} > n F^{n-1} G on X_kappa with
// F = L_kappa (x) ... (x) L_1 and G = pi^* O_X(m + a), m = 3^kappa - 1, so
// that F - G = O_{X_kappa}(a_1..a_kappa) (x) pi^* O_X(-a).
inline MorseReport morse_criterion(const TowerGeometry &g, std::int64_t a, std::int64_t delta_max)
{
    if (a < 0) {
        throw precondition_error("morse_criterion: a must be >= 0");
    }
    const int kappa = g.kappa();
    const int nk = g.level_dim(kappa);
    const TwistVector f_twists = canonical_twists(kappa);
    const LinearForm F = f_twists.form();

    Integrator integrator(g);
    MorseReport r{g, a, f_twists.t, nk, MultiPoly(), MultiPoly(), MultiPoly(), MultiPoly(), false,
                  AsymOrder::incomparable, minus_infinity, std::nullopt, delta_max};
    r.lhs = integrator.integrate(kappa, TowerProduct{{}, {{F, nk}}});
    const MultiPoly f_pow_h = integrator.integrate(kappa, TowerProduct{{}, {{F, nk - 1}, {LinearForm::h(), 1}}});
    r.rhs = f_pow_h * Integer(Integer(nk) * (r.m + a));
    r.difference = r.lhs - r.rhs;
    r.target = dominant_block_target(g, integrator);
    r.degree_rhs = degree(r.rhs);
    r.dominant_check = !r.lhs.is_zero() && !r.target.is_zero() && dominant(r.lhs) == dominant(r.target);
    r.dominant_order = asym_compare(r.lhs, r.target);
    r.delta = min_certified_bound(r.difference, delta_max);
    return r;
}

// Same two intersection numbers computed through the monomial basis:
// F^e h^extra is expanded multinomially in u_1..u_kappa, h and each monomial is
// integrated once. Used to cross-check morse_criterion on small geometries.
inline MultiPoly power_integral_by_monomials(const TowerGeometry &g, const LinearForm &form, int e, int extra_h)
{
    const int level = std::max(0, form.top_level());
    Integrator integrator(g);
    const std::size_t nv = static_cast<std::size_t>(g.c());
    MultiPoly total(nv);
    std::vector<int> exps(static_cast<std::size_t>(level) + 1, 0);
    // exps[0] is the h exponent, exps[j] the u_j exponent
    std::function<void(int, int, Integer)> rec = [&](int j, int remaining, Integer coeff) {
        if (j == 0) {
            exps[0] = remaining;
            coeff *= boost::multiprecision::pow(Integer(form.coeff(0)), static_cast<unsigned>(remaining));
            if (coeff == 0) {
                return;
            }
            ChowClass mono(g, level);
            ChowMonomial m;
            m.u.assign(exps.begin() + 1, exps.end());
            m.h = exps[0] + extra_h;
            mono.add_term(std::move(m), MultiPoly::constant(nv, coeff));
            total += integrator.integrate(mono);
            return;
        }
        Integer c = coeff;
        Integer alpha_pow = 1;
        for (int p = 0; p <= remaining; ++p) {
            exps[static_cast<std::size_t>(j)] = p;
            if (alpha_pow != 0 || p == 0) {
                rec(j - 1, remaining - p, c * binomial(remaining, p) * alpha_pow);
            }
            alpha_pow *= form.coeff(j);
        }
        exps[static_cast<std::size_t>(j)] = 0;
    };
    rec(level, e, Integer(1));
    return total;
}

inline nlohmann::ordered_json to_json(const MorseReport &r)
{
    nlohmann::ordered_json j;
    j["N"] = r.geometry.N();
    j["c"] = r.geometry.c();
    j["a"] = r.a;
    j["m"] = r.m;
    j["kappa"] = r.geometry.kappa();
    j["b"] = r.geometry.b();
    j["lhs"] = to_json(r.lhs);
    j["rhs"] = to_json(r.rhs);
    j["difference"] = to_json(r.difference);
    j["difference_text"] = to_string(r.difference);
    j["dominant_check"] = r.dominant_check;
    j["dominant_order"] = to_string(r.dominant_order);
    j["degree_rhs"] = r.degree_rhs == minus_infinity ? nlohmann::ordered_json(nullptr)
                                                     : nlohmann::ordered_json(r.degree_rhs);
    j["delta"] = r.delta ? nlohmann::ordered_json(*r.delta) : nlohmann::ordered_json(nullptr);
    return j;
}

struct DescentStep {
    int level = 0; // compares level `level` with level `level - 1`
    MultiPoly upper;
    MultiPoly lower;
    bool dominant_equal = false;
};

struct TechnicalLemmaAudit {
    TowerGeometry geometry;
    int h_samples = 0;
    int h_failures = 0;
    int tower_segre_samples = 0; // s_{k,i} factors on X_k
    int tower_segre_failures = 0;
    int lower_segre_samples = 0; // s_{k-1,i} factors on X_k
    int lower_segre_failures = 0;
    std::vector<DescentStep> descent;

    bool ok() const
    {
        return h_failures == 0 && tower_segre_failures == 0 && lower_segre_failures == 0
               && std::all_of(descent.begin(), descent.end(), [](const auto &s) { return s.dominant_equal; });
    }
};

namespace detail
{

inline LinearForm random_lattice_form(int level, std::mt19937_64 &rng)
{
    std::uniform_int_distribution<int> dist(-3, 3);
    LinearForm f;
    for (int j = 0; j <= level; ++j) {
        f.coeffs.push_back(dist(rng));
    }
    if (f.is_zero()) {
        f.coeffs[0] = 1;
    }
    return f.normalized();
}

// `count` lattice classes drawn as powers of at most three random forms; many
// distinct forms would make the binomial descent exponential.
inline std::vector<std::pair<LinearForm, int>> random_lattice_powers(int level, int count, std::mt19937_64 &rng)
{
    std::vector<std::pair<LinearForm, int>> out;
    int remaining = count;
    for (int i = 0; i < 3 && remaining > 0; ++i) {
        std::uniform_int_distribution<int> take(1, remaining);
        const int e = i == 2 ? remaining : take(rng);
        out.emplace_back(random_lattice_form(level, rng), e);
        remaining -= e;
    }
    return out;
}

// Sorted q-tuples 0 <= i_1 <= ... <= i_q with sum <= max_sum that break the
// (b, c, ..., c) pattern: i_1 < b, or i_1 = b and some later i_j < c.
inline std::vector<std::vector<int>> pattern_violations(const TowerGeometry &g, int q, int max_sum)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int lo, int remaining) {
        if (static_cast<int>(cur.size()) == q) {
            const bool below_b = cur.front() < g.b();
            const bool b_then_small
                = cur.front() == g.b() && std::any_of(cur.begin() + 1, cur.end(), [&](int i) { return i < g.c(); });
            if (below_b || b_then_small) {
                out.push_back(cur);
            }
            return;
        }
        for (int i = lo; i <= remaining; ++i) {
            cur.push_back(i);
            rec(i, remaining - i);
            cur.pop_back();
        }
    };
    if (q > 0) {
        rec(0, max_sum);
    }
    return out;
}

} // namespace detail

// Checks the degree estimates behind the Morse argument on one concrete
// geometry. o(d^N) is read literally as total degree < N.
inline TechnicalLemmaAudit technical_lemma_audit(const TowerGeometry &g, int samples = 12, std::uint64_t seed = 7)
{
    std::mt19937_64 rng(seed);
    Integrator integrator(g);
    TechnicalLemmaAudit audit{g, 0, 0, 0, 0, 0, 0, {}};
    const int kappa = g.kappa();

    // (1) n_k - 1 lattice classes times h
    for (int k = 1; k <= kappa; ++k) {
        for (int s = 0; s < samples; ++s) {
            TowerProduct p;
            p.powers = detail::random_lattice_powers(k, g.level_dim(k) - 1, rng);
            p.powers.emplace_back(LinearForm::h(), 1);
            ++audit.h_samples;
            if (degree(integrator.integrate(k, p)) >= g.N()) {
                ++audit.h_failures;
            }
        }
    }

    // (2) Segre tuples of length kappa - k breaking the (b, c, ..., c) pattern,
    // filled up with random lattice classes
    for (int k = 1; k < kappa; ++k) {
        const int q = kappa - k;
        for (int lower = 0; lower <= 1; ++lower) {
            auto tuples = detail::pattern_violations(g, q, g.level_dim(k));
            std::shuffle(tuples.begin(), tuples.end(), rng);
            if (static_cast<int>(tuples.size()) > samples) {
                tuples.resize(static_cast<std::size_t>(samples));
            }
            for (const auto &t : tuples) {
                TowerProduct p;
                int used = 0;
                for (int i : t) {
                    p.segre.push_back({k - lower, i});
                    used += i;
                }
                p.powers = detail::random_lattice_powers(k, g.level_dim(k) - used, rng);
                const bool fails = degree(integrator.integrate(k, p)) >= g.N();
                if (lower == 0) {
                    ++audit.tower_segre_samples;
                    audit.tower_segre_failures += fails ? 1 : 0;
                } else {
                    ++audit.lower_segre_samples;
                    audit.lower_segre_failures += fails ? 1 : 0;
                }
            }
        }
    }

    // (3) level descent of the dominant block:
    //   level kappa:  l_kappa^(b^) l_{kappa-1}^(c^) ... l_1^(c^)
    //   level k < kappa:  s_{k,b} s_{k,c}^{kappa-k-1} l_k^(c^) ... l_1^(c^)
    auto block = [&](int k) {
        TowerProduct p;
        if (k == kappa) {
            p.powers.emplace_back(l_form(kappa), g.hat(g.b()));
        } else {
            p.segre.push_back({k, g.b()});
            for (int i = 0; i < kappa - k - 1; ++i) {
                p.segre.push_back({k, g.c()});
            }
        }
        for (int j = 1; j <= std::min(k, kappa - 1); ++j) {
            p.powers.emplace_back(l_form(j), g.hat(g.c()));
        }
        return integrator.integrate(k, p);
    };
    MultiPoly upper = block(kappa);
    for (int k = kappa; k >= 1; --k) {
        MultiPoly lower = block(k - 1);
        DescentStep step{k, upper, lower, false};
        step.dominant_equal = !upper.is_zero() && !lower.is_zero() && dominant(upper) == dominant(lower);
        audit.descent.push_back(std::move(step));
        upper = std::move(lower);
    }
    return audit;
}

inline nlohmann::ordered_json to_json(const TechnicalLemmaAudit &a)
{
    nlohmann::ordered_json j;
    j["geometry"] = to_json(a.geometry);
    j["h_samples"] = a.h_samples;
    j["h_failures"] = a.h_failures;
    j["tower_segre_samples"] = a.tower_segre_samples;
    j["tower_segre_failures"] = a.tower_segre_failures;
    j["lower_segre_samples"] = a.lower_segre_samples;
    j["lower_segre_failures"] = a.lower_segre_failures;
    auto steps = nlohmann::ordered_json::array();
    for (const auto &s : a.descent) {
        nlohmann::ordered_json e;
        e["level"] = s.level;
        e["upper_dominant"] = s.upper.is_zero() ? std::string("0") : to_string(dominant(s.upper));
        e["lower_dominant"] = s.lower.is_zero() ? std::string("0") : to_string(dominant(s.lower));
        e["dominant_equal"] = s.dominant_equal;
        steps.push_back(std::move(e));
    }
    j["descent"] = std::move(steps);
    j["ok"] = a.ok();
    return j;
}

} // namespace jetcalc

#endif // JETCALC_BIGNESS_HPP
