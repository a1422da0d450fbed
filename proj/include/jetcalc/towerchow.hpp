#ifndef JETCALC_TOWERCHOW_HPP
#define JETCALC_TOWERCHOW_HPP

#include <algorithm>
#include <climits>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include <jetcalc/polyring.hpp>

namespace jetcalc
{

// Binomial coefficient with C(x, 0) = 1 and C(x, k) = 0 for 0 <= x < k.
inline Integer binomial(std::int64_t x, std::int64_t k)
{
    if (k < 0) {
        return 0;
    }
    if (k == 0) {
        return 1;
    }
    if (x < 0) {
        throw std::domain_error("binomial: negative upper argument " + std::to_string(x));
    }
    if (x < k) {
        return 0;
    }
    k = std::min(k, x - k);
    Integer r = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        r = r * (x - k + i) / i;
    }
    return r;
}

// Ambient data of a complete intersection X = H_1 cap ... cap H_c in P^N
// together with its Demailly-Semple tower X_0 = X, X_1, X_2, ...
class TowerGeometry
{
public:
    TowerGeometry(int N, int c) : N_(N), c_(c), n_(N - c)
    {
        if (c < 1 || n_ < 1) {
            throw std::invalid_argument("invalid geometry N=" + std::to_string(N) + ", c=" + std::to_string(c)
                                        + ": need c >= 1 and n = N - c >= 1");
        }
        kappa_ = (n_ + c_ - 1) / c_;
        b_ = n_ - (kappa_ - 1) * c_;
    }

    int N() const { return N_; }
    int c() const { return c_; }
    int n() const { return n_; }
    // ceil(n / c)
    int kappa() const { return kappa_; }
    // n = (kappa - 1) c + b with 0 < b <= c.
    int b() const { return b_; }

    // When n = 1 the fibres of the tower are points and only X_1 is modelled.
    int max_level() const { return n_ == 1 ? 1 : INT_MAX; }

    int level_dim(int k) const
    {
        check_level(k);
        return n_ + k * (n_ - 1);
    }

    // i^ = i + n - 1, so that the pushforward of u_k^(i^) is s_{k-1,i}.
    int hat(int i) const { return i + n_ - 1; }

    void check_level(int k) const
    {
        if (k < 0 || k > max_level()) {
            throw std::out_of_range("tower level " + std::to_string(k) + " out of range for N=" + std::to_string(N_)
                                    + ", c=" + std::to_string(c_));
        }
    }

    friend bool operator==(const TowerGeometry &, const TowerGeometry &) = default;

private:
    int N_;
    int c_;
    int n_;
    int kappa_;
    int b_;
};

inline nlohmann::ordered_json to_json(const TowerGeometry &g)
{
    nlohmann::ordered_json j;
    j["N"] = g.N();
    j["c"] = g.c();
    j["n"] = g.n();
    j["kappa"] = g.kappa();
    j["b"] = g.b();
    return j;
}

// M^n_{l,j} = sum_{i=0}^{l-j} (-1)^i C(n-2+i+j, i), the coefficients of the
// tower recursion s_{k,l} = sum_j M^n_{l,j} s_{k-1,j} u_k^{l-j}.
inline Integer m_coeff(int n, int l, int j)
{
    if (n < 2) {
        throw std::domain_error("m_coeff: requires n >= 2, got n=" + std::to_string(n));
    }
    if (j < 0 || j > l) {
        throw std::domain_error("m_coeff: requires 0 <= j <= l, got l=" + std::to_string(l) + ", j="
                                + std::to_string(j));
    }
    Integer r = 0;
    for (int i = 0; i <= l - j; ++i) {
        const Integer t = binomial(n - 2 + i + j, i);
        r += (i % 2 == 0) ? t : Integer(-t);
    }
    return r;
}

// One application of the tower recursion: s_{k,i} as a list of (j, coefficient)
// pairs meaning coefficient * s_{k-1,j} * u_k^(i-j). For n = 1 the bundle F_k
// is the tautological line bundle itself, so s_{1,i} = u_1^i.
inline std::vector<std::pair<int, Integer>> segre_recursion_row(int n, int i)
{
    std::vector<std::pair<int, Integer>> row;
    if (n == 1) {
        row.emplace_back(0, Integer(1));
        return row;
    }
    for (int j = 0; j <= i; ++j) {
        Integer m = m_coeff(n, i, j);
        if (m != 0) {
            row.emplace_back(j, std::move(m));
        }
    }
    return row;
}

// Truncated power series in h with polynomial coefficients; entry l is the
// coefficient of h^l.
using SegreList = std::vector<MultiPoly>;

namespace detail
{

inline SegreList series_mul(const SegreList &a, const SegreList &b, int order)
{
    const std::size_t nv = a.front().num_vars();
    SegreList r(static_cast<std::size_t>(order) + 1, MultiPoly(nv));
    for (std::size_t i = 0; i < a.size() && i <= static_cast<std::size_t>(order); ++i) {
        if (a[i].is_zero()) {
            continue;
        }
        for (std::size_t j = 0; j < b.size() && i + j <= static_cast<std::size_t>(order); ++j) {
            r[i + j] += a[i] * b[j];
        }
    }
    return r;
}

// (1 + x h)^e truncated at h^order, for any integer e.
inline SegreList binomial_series(std::size_t nv, const Integer &x, int e, int order)
{
    SegreList r;
    Integer coeff = 1;
    Integer xp = 1;
    for (int k = 0; k <= order; ++k) {
        // generalized binomial C(e, k) built incrementally
        r.push_back(MultiPoly::constant(nv, coeff * xp));
        coeff = coeff * (e - k) / (k + 1);
        xp *= x;
    }
    return r;
}

// 1 + (d_i - m) h, or its inverse when invert is set.
inline SegreList hypersurface_factor(std::size_t nv, std::size_t i, const Integer &m, bool invert, int order)
{
    const MultiPoly root = MultiPoly::variable(nv, i) - MultiPoly::constant(nv, m);
    SegreList r{MultiPoly::constant(nv, 1)};
    if (!invert) {
        r.push_back(root);
        return r;
    }
    MultiPoly p = MultiPoly::constant(nv, 1);
    for (int k = 1; k <= order; ++k) {
        p *= -root;
        r.push_back(p);
    }
    return r;
}

} // namespace detail

// Coefficients s~_l (l = 0..n) of the Segre series of Omega_X(m),
//   (1 + (1-m)h)^-(N+1) (1 - m h) prod_i (1 + (d_i - m) h).
inline SegreList base_segre(const TowerGeometry &g, const Integer &m)
{
    const std::size_t nv = static_cast<std::size_t>(g.c());
    const int order = g.n();
    SegreList s = detail::binomial_series(nv, 1 - m, -(g.N() + 1), order);
    s = detail::series_mul(s, {MultiPoly::constant(nv, 1), MultiPoly::constant(nv, -m)}, order);
    for (std::size_t i = 0; i < nv; ++i) {
        s = detail::series_mul(s, detail::hypersurface_factor(nv, i, m, false, order), order);
    }
    return s;
}

// Chern series of TX(-m) = (1 + (1-m)h)^(N+1) / ((1 - m h) prod_i (1 + (d_i - m) h)).
inline SegreList chern_series_tx(const TowerGeometry &g, const Integer &m)
{
    const std::size_t nv = static_cast<std::size_t>(g.c());
    const int order = g.n();
    SegreList s = detail::binomial_series(nv, 1 - m, g.N() + 1, order);
    s = detail::series_mul(s, detail::binomial_series(nv, -m, -1, order), order);
    for (std::size_t i = 0; i < nv; ++i) {
        s = detail::series_mul(s, detail::hypersurface_factor(nv, i, m, true, order), order);
    }
    return s;
}

// s_i(E (x) L) = sum_j C(r-1+i, i-j) s_j(E) c_1(L)^(i-j), with c_1(L) = t h.
inline SegreList segre_twist(const SegreList &segre, int r, const Integer &t)
{
    if (r < 1) {
        throw std::invalid_argument("segre_twist: rank must be >= 1");
    }
    if (segre.empty()) {
        return {};
    }
    const std::size_t nv = segre.front().num_vars();
    SegreList out;
    for (int i = 0; i < static_cast<int>(segre.size()); ++i) {
        MultiPoly acc(nv);
        Integer tp = 1;
        for (int j = i; j >= 0; --j) {
            acc += segre[static_cast<std::size_t>(j)] * (binomial(r - 1 + i, i - j) * tp);
            tp *= t;
        }
        out.push_back(std::move(acc));
    }
    return out;
}

// One monomial u_1^{p_1} ... u_k^{p_k} h^a s_{0,i_1} ... s_{0,i_t} of a ChowClass.
struct ChowMonomial {
    std::vector<int> u;
    int h = 0;
    std::vector<int> s0; // sorted, entries >= 1

    int grading() const
    {
        return std::accumulate(u.begin(), u.end(), 0) + h + std::accumulate(s0.begin(), s0.end(), 0);
    }

    friend auto operator<=>(const ChowMonomial &, const ChowMonomial &) = default;
};

// Element of A*(X_k) spanned by monomials in u_1..u_k, h and base Segre
// classes, with polynomial coefficients in d_1..d_c. Terms of grading above
// dim X_k vanish and are never stored.
class ChowClass
{
public:
    using TermMap = std::map<ChowMonomial, MultiPoly>;

    ChowClass(const TowerGeometry &g, int level) : geom_(g), level_(level) { g.check_level(level); }

    static ChowClass scalar(const TowerGeometry &g, int level, const MultiPoly &p)
    {
        ChowClass r(g, level);
        r.add_term(r.unit_monomial(), p);
        return r;
    }

    static ChowClass one(const TowerGeometry &g, int level)
    {
        return scalar(g, level, MultiPoly::constant(static_cast<std::size_t>(g.c()), 1));
    }

    // u_j pulled back to level `level`.
    static ChowClass u(const TowerGeometry &g, int level, int j)
    {
        if (j < 1 || j > level) {
            throw std::out_of_range("u(" + std::to_string(j) + ") is not defined on level " + std::to_string(level));
        }
        ChowClass r(g, level);
        ChowMonomial mono = r.unit_monomial();
        mono.u[static_cast<std::size_t>(j - 1)] = 1;
        r.add_term(std::move(mono), MultiPoly::constant(static_cast<std::size_t>(g.c()), 1));
        return r;
    }

    static ChowClass h(const TowerGeometry &g, int level)
    {
        ChowClass r(g, level);
        ChowMonomial mono = r.unit_monomial();
        mono.h = 1;
        r.add_term(std::move(mono), MultiPoly::constant(static_cast<std::size_t>(g.c()), 1));
        return r;
    }

    // Base Segre class s_{0,i} = s_i(Omega_X) pulled back to `level`.
    static ChowClass base_segre_factor(const TowerGeometry &g, int level, int i)
    {
        if (i < 0) {
            throw std::out_of_range("negative Segre index");
        }
        if (i == 0) {
            return one(g, level);
        }
        ChowClass r(g, level);
        ChowMonomial mono = r.unit_monomial();
        mono.s0.push_back(i);
        r.add_term(std::move(mono), MultiPoly::constant(static_cast<std::size_t>(g.c()), 1));
        return r;
    }

    const TowerGeometry &geometry() const { return geom_; }
    int level() const { return level_; }
    const TermMap &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(ChowMonomial mono, const MultiPoly &coeff)
    {
        if (static_cast<int>(mono.u.size()) != level_) {
            throw std::invalid_argument("ChowClass: monomial has " + std::to_string(mono.u.size())
                                        + " u-exponents on level " + std::to_string(level_));
        }
        if (mono.h < 0 || std::any_of(mono.u.begin(), mono.u.end(), [](int p) { return p < 0; })) {
            throw std::invalid_argument("ChowClass: negative exponent");
        }
        std::sort(mono.s0.begin(), mono.s0.end());
        if (!mono.s0.empty() && mono.s0.front() < 0) {
            throw std::invalid_argument("ChowClass: negative Segre index");
        }
        mono.s0.erase(std::remove(mono.s0.begin(), mono.s0.end(), 0), mono.s0.end());
        if (coeff.is_zero() || mono.grading() > geom_.level_dim(level_)) {
            return;
        }
        auto [it, inserted] = terms_.try_emplace(std::move(mono), coeff);
        if (!inserted) {
            it->second += coeff;
            if (it->second.is_zero()) {
                terms_.erase(it);
            }
        }
    }

    // Same class viewed on a higher level of the tower.
    ChowClass pullback(int to_level) const
    {
        if (to_level < level_) {
            throw std::invalid_argument("pullback: target level below source level");
        }
        ChowClass r(geom_, to_level);
        for (const auto &[mono, coeff] : terms_) {
            ChowMonomial m = mono;
            m.u.resize(static_cast<std::size_t>(to_level), 0);
            r.add_term(std::move(m), coeff);
        }
        return r;
    }

    ChowClass &operator+=(const ChowClass &o)
    {
        check_compatible(o);
        for (const auto &[mono, coeff] : o.terms_) {
            add_term(mono, coeff);
        }
        return *this;
    }

    ChowClass &operator-=(const ChowClass &o)
    {
        check_compatible(o);
        for (const auto &[mono, coeff] : o.terms_) {
            add_term(mono, -coeff);
        }
        return *this;
    }

    ChowClass &operator*=(const MultiPoly &k)
    {
        ChowClass r(geom_, level_);
        for (const auto &[mono, coeff] : terms_) {
            r.add_term(mono, coeff * k);
        }
        return *this = std::move(r);
    }

    friend ChowClass operator+(ChowClass a, const ChowClass &b) { return a += b; }
    friend ChowClass operator-(ChowClass a, const ChowClass &b) { return a -= b; }
    friend ChowClass operator*(ChowClass a, const MultiPoly &k) { return a *= k; }
    friend ChowClass operator-(ChowClass a)
    {
        return a *= MultiPoly::constant(static_cast<std::size_t>(a.geom_.c()), -1);
    }

    friend ChowClass operator*(const ChowClass &a, const ChowClass &b)
    {
        a.check_compatible(b);
        ChowClass r(a.geom_, a.level_);
        for (const auto &[ma, ca] : a.terms_) {
            for (const auto &[mb, cb] : b.terms_) {
                if (ma.grading() + mb.grading() > a.geom_.level_dim(a.level_)) {
                    continue;
                }
                ChowMonomial m = ma;
                for (std::size_t i = 0; i < m.u.size(); ++i) {
                    m.u[i] += mb.u[i];
                }
                m.h += mb.h;
                m.s0.insert(m.s0.end(), mb.s0.begin(), mb.s0.end());
                r.add_term(std::move(m), ca * cb);
            }
        }
        return r;
    }

    ChowClass &operator*=(const ChowClass &o) { return *this = *this * o; }

    ChowClass pow(unsigned k) const
    {
        ChowClass result = one(geom_, level_);
        for (unsigned i = 0; i < k; ++i) {
            result *= *this;
        }
        return result;
    }

    // Part of pure grading g.
    ChowClass graded_part(int g) const
    {
        ChowClass r(geom_, level_);
        for (const auto &[mono, coeff] : terms_) {
            if (mono.grading() == g) {
                r.add_term(mono, coeff);
            }
        }
        return r;
    }

    friend bool operator==(const ChowClass &a, const ChowClass &b)
    {
        return a.geom_ == b.geom_ && a.level_ == b.level_ && a.terms_ == b.terms_;
    }

private:
    ChowMonomial unit_monomial() const
    {
        ChowMonomial m;
        m.u.assign(static_cast<std::size_t>(level_), 0);
        return m;
    }

    void check_compatible(const ChowClass &o) const
    {
        if (!(o.geom_ == geom_) || o.level_ != level_) {
            throw std::invalid_argument("ChowClass: operands live on different levels or geometries");
        }
    }

    TowerGeometry geom_;
    int level_;
    TermMap terms_;
};

inline nlohmann::ordered_json to_json(const ChowClass &cls)
{
    nlohmann::ordered_json j;
    j["level"] = cls.level();
    auto terms = nlohmann::ordered_json::array();
    for (const auto &[mono, coeff] : cls.terms()) {
        nlohmann::ordered_json t;
        t["u"] = mono.u;
        t["h"] = mono.h;
        t["s0"] = mono.s0;
        t["coeff"] = to_json(coeff);
        terms.push_back(std::move(t));
    }
    j["terms"] = std::move(terms);
    return j;
}

inline ChowClass chow_class_from_json(const TowerGeometry &g, const nlohmann::ordered_json &j)
{
    ChowClass cls(g, j.at("level").get<int>());
    for (const auto &t : j.at("terms")) {
        ChowMonomial mono;
        mono.u = t.at("u").get<std::vector<int>>();
        mono.h = t.at("h").get<int>();
        mono.s0 = t.at("s0").get<std::vector<int>>();
        cls.add_term(std::move(mono), multipoly_from_json(t.at("coeff"), static_cast<std::size_t>(g.c())));
    }
    return cls;
}

// s_{k,i} = s_i(F_k) written entirely in u_1..u_k and base Segre classes,
// by unrolling the tower recursion down to level 0.
inline ChowClass expand_tower_segre(const TowerGeometry &g, int k, int i)
{
    g.check_level(k);
    if (i < 0) {
        throw std::out_of_range("expand_tower_segre: negative index");
    }
    std::map<std::pair<int, int>, ChowClass> memo;
    std::function<ChowClass(int, int)> expand = [&](int level, int idx) -> ChowClass {
        if (level == 0) {
            return ChowClass::base_segre_factor(g, 0, idx);
        }
        if (auto it = memo.find({level, idx}); it != memo.end()) {
            return it->second;
        }
        ChowClass result(g, level);
        const ChowClass uk = ChowClass::u(g, level, level);
        for (const auto &[j, coeff] : segre_recursion_row(g.n(), idx)) {
            ChowClass term = expand(level - 1, j).pullback(level) * uk.pow(static_cast<unsigned>(idx - j));
            result += term * MultiPoly::constant(static_cast<std::size_t>(g.c()), coeff);
        }
        memo.emplace(std::make_pair(level, idx), result);
        return result;
    };
    return expand(k, i);
}

// Integer linear combination of h (coefficient 0) and u_1, u_2, ... (coefficient j).
struct LinearForm {
    std::vector<std::int64_t> coeffs;

    static LinearForm h() { return LinearForm{{1}}; }

    static LinearForm u(int j)
    {
        LinearForm f;
        f.coeffs.assign(static_cast<std::size_t>(j) + 1, 0);
        f.coeffs[static_cast<std::size_t>(j)] = 1;
        return f;
    }

    std::int64_t coeff(int j) const
    {
        return static_cast<std::size_t>(j) < coeffs.size() ? coeffs[static_cast<std::size_t>(j)] : 0;
    }

    // Drops trailing zero coefficients.
    LinearForm normalized() const
    {
        LinearForm f = *this;
        while (!f.coeffs.empty() && f.coeffs.back() == 0) {
            f.coeffs.pop_back();
        }
        return f;
    }

    bool is_zero() const { return normalized().coeffs.empty(); }

    int top_level() const { return static_cast<int>(normalized().coeffs.size()) - 1; }

    friend LinearForm operator+(const LinearForm &a, const LinearForm &b)
    {
        LinearForm r;
        r.coeffs.assign(std::max(a.coeffs.size(), b.coeffs.size()), 0);
        for (std::size_t i = 0; i < r.coeffs.size(); ++i) {
            r.coeffs[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
        }
        return r.normalized();
    }

    friend LinearForm operator*(std::int64_t k, const LinearForm &a)
    {
        LinearForm r = a;
        for (auto &x : r.coeffs) {
            x *= k;
        }
        return r.normalized();
    }

    friend auto operator<=>(const LinearForm &, const LinearForm &) = default;
};

struct SegreFactor {
    int level = 0;
    int index = 0;

    friend auto operator<=>(const SegreFactor &, const SegreFactor &) = default;
};

// s_{l_1,i_1} ... s_{l_q,i_q} * prod f_t^{e_t}: a product of tower Segre
// classes (of any level up to the current one) and powers of lattice classes.
struct TowerProduct {
    std::vector<SegreFactor> segre;
    std::vector<std::pair<LinearForm, int>> powers;
};

// Integrates tower products over X_k by descending one level at a time:
// each top-level Segre factor is unrolled once through the recursion, every
// lattice power is split binomially in u_k, and u_k^p is pushed forward to
// s_{k-1,p-(n-1)}. Sub-integrals are memoized on the normalized product, so
// one Integrator amortizes work over many related integrals.
class Integrator
{
public:
    explicit Integrator(const TowerGeometry &g)
        : geom_(g), base_(base_segre(g, 0)), fundamental_(static_cast<std::size_t>(g.c()))
    {
        fundamental_ = MultiPoly::constant(static_cast<std::size_t>(g.c()), 1);
        for (int i = 0; i < g.c(); ++i) {
            fundamental_ *= MultiPoly::variable(static_cast<std::size_t>(g.c()), static_cast<std::size_t>(i));
        }
    }

    const TowerGeometry &geometry() const { return geom_; }
    std::size_t memo_size() const { return memo_.size(); }

    MultiPoly integrate(int level, const TowerProduct &product)
    {
        geom_.check_level(level);
        auto key = normalize(level, product);
        if (!key) {
            return zero();
        }
        return integrate_key(*key);
    }

    MultiPoly integrate(const ChowClass &cls)
    {
        if (!(cls.geometry() == geom_)) {
            throw std::invalid_argument("Integrator: class belongs to a different geometry");
        }
        MultiPoly total = zero();
        const int k = cls.level();
        for (const auto &[mono, coeff] : cls.terms()) {
            if (mono.grading() != geom_.level_dim(k)) {
                continue;
            }
            TowerProduct p;
            for (int i : mono.s0) {
                p.segre.push_back({0, i});
            }
            for (int j = 1; j <= k; ++j) {
                if (mono.u[static_cast<std::size_t>(j - 1)] > 0) {
                    p.powers.emplace_back(LinearForm::u(j), mono.u[static_cast<std::size_t>(j - 1)]);
                }
            }
            if (mono.h > 0) {
                p.powers.emplace_back(LinearForm::h(), mono.h);
            }
            total += coeff * integrate(k, p);
        }
        return total;
    }

private:
    using Key = std::tuple<int, std::vector<SegreFactor>, std::vector<std::pair<LinearForm, int>>>;

    MultiPoly zero() const { return MultiPoly(static_cast<std::size_t>(geom_.c())); }

    // Canonical form of a product on `level`; nullopt when it is zero for
    // structural reasons (zero form, grading mismatch).
    std::optional<Key> normalize(int level, const TowerProduct &p) const
    {
        std::vector<SegreFactor> segre;
        int grading = 0;
        for (const auto &s : p.segre) {
            if (s.level < 0 || s.level > level || s.index < 0) {
                throw std::out_of_range("Segre factor s(" + std::to_string(s.level) + "," + std::to_string(s.index)
                                        + ") not defined on level " + std::to_string(level));
            }
            if (s.index > 0) {
                segre.push_back(s);
                grading += s.index;
            }
        }
        std::sort(segre.begin(), segre.end());
        std::map<LinearForm, int> merged;
        for (const auto &[form, e] : p.powers) {
            if (e < 0) {
                throw std::invalid_argument("negative exponent in tower product");
            }
            if (e == 0) {
                continue;
            }
            LinearForm f = form.normalized();
            if (f.coeffs.empty()) {
                return std::nullopt;
            }
            if (f.top_level() > level) {
                throw std::out_of_range("lattice class involves u_" + std::to_string(f.top_level()) + " on level "
                                        + std::to_string(level));
            }
            merged[f] += e;
            grading += e;
        }
        if (grading != geom_.level_dim(level)) {
            return std::nullopt;
        }
        return Key{level, std::move(segre), {merged.begin(), merged.end()}};
    }

    MultiPoly integrate_key(const Key &key)
    {
        if (auto it = memo_.find(key); it != memo_.end()) {
            return it->second;
        }
        const auto &[level, segre, powers] = key;
        MultiPoly result = level == 0 ? integrate_base(segre, powers) : descend(level, segre, powers);
        memo_.emplace(key, result);
        return result;
    }

    MultiPoly integrate_base(const std::vector<SegreFactor> &segre, const std::vector<std::pair<LinearForm, int>> &powers)
    {
        MultiPoly r = fundamental_;
        Integer scale = 1;
        for (const auto &[f, e] : powers) {
            scale *= boost::multiprecision::pow(Integer(f.coeff(0)), static_cast<unsigned>(e));
        }
        for (const auto &s : segre) {
            r *= base_[static_cast<std::size_t>(s.index)];
        }
        return r * scale;
    }

    struct Partial {
        Integer coeff;
        int u_exponent;
        std::vector<SegreFactor> segre;
        std::vector<std::pair<LinearForm, int>> powers;
    };

    MultiPoly descend(int level, const std::vector<SegreFactor> &segre,
                      const std::vector<std::pair<LinearForm, int>> &powers)
    {
        std::vector<Partial> partials{Partial{1, 0, {}, {}}};
        std::vector<SegreFactor> top;
        for (const auto &s : segre) {
            if (s.level == level) {
                top.push_back(s);
            } else {
                partials.front().segre.push_back(s);
            }
        }
        // s_{k,i} = sum_j M_{i,j} s_{k-1,j} u_k^{i-j}
        for (const auto &s : top) {
            std::vector<Partial> next;
            for (const auto &p : partials) {
                for (const auto &[j, m] : segre_recursion_row(geom_.n(), s.index)) {
                    Partial q = p;
                    q.coeff *= m;
                    q.u_exponent += s.index - j;
                    if (j > 0) {
                        q.segre.push_back({level - 1, j});
                    }
                    next.push_back(std::move(q));
                }
            }
            partials = std::move(next);
        }
        // (alpha u_k + rho)^e = sum_q C(e, q) alpha^q u_k^q rho^(e-q)
        for (const auto &[f, e] : powers) {
            const std::int64_t alpha = f.coeff(level);
            LinearForm rho = f;
            if (static_cast<int>(rho.coeffs.size()) > level) {
                rho.coeffs.resize(static_cast<std::size_t>(level));
            }
            rho = rho.normalized();
            const int q_max = alpha == 0 ? 0 : e;
            std::vector<Partial> next;
            for (const auto &p : partials) {
                Integer alpha_pow = 1;
                for (int q = 0; q <= q_max; ++q) {
                    if (q == e || !rho.coeffs.empty()) {
                        Partial r = p;
                        r.coeff *= binomial(e, q) * alpha_pow;
                        r.u_exponent += q;
                        if (q < e) {
                            r.powers.emplace_back(rho, e - q);
                        }
                        next.push_back(std::move(r));
                    }
                    alpha_pow *= alpha;
                }
            }
            partials = std::move(next);
        }
        MultiPoly total = zero();
        const int fibre = geom_.n() - 1;
        for (auto &p : partials) {
            const int r = p.u_exponent - fibre;
            if (r < 0 || p.coeff == 0) {
                continue;
            }
            if (r > 0) {
                p.segre.push_back({level - 1, r});
            }
            MultiPoly v = integrate(level - 1, TowerProduct{std::move(p.segre), std::move(p.powers)});
            if (!v.is_zero()) {
                total += v * p.coeff;
            }
        }
        return total;
    }

    TowerGeometry geom_;
    SegreList base_;
    MultiPoly fundamental_; // d_1 ... d_c = integral of h^n over X
    std::map<Key, MultiPoly> memo_;
};

// Exact degree of integral over X_k of cls, as a polynomial in d_1..d_c.
inline MultiPoly integrate(const TowerGeometry &g, int level, const ChowClass &cls)
{
    if (cls.level() != level) {
        throw std::invalid_argument("integrate: class lives on level " + std::to_string(cls.level())
                                    + ", not on level " + std::to_string(level));
    }
    Integrator integrator(g);
    return integrator.integrate(cls);
}

// Second, independent route: every pushforward u_k^p -> s_{k-1,p-n+1} is
// replaced by the fully unrolled expansion of that tower Segre class before
// the next level is processed.
inline MultiPoly integrate_by_expansion(const TowerGeometry &g, int level, const ChowClass &cls)
{
    if (cls.level() != level) {
        throw std::invalid_argument("integrate_by_expansion: level mismatch");
    }
    const std::size_t nv = static_cast<std::size_t>(g.c());
    ChowClass current = cls.graded_part(g.level_dim(level));
    for (int k = level; k >= 1; --k) {
        ChowClass lower(g, k - 1);
        std::map<int, ChowClass> pushed;
        for (const auto &[mono, coeff] : current.terms()) {
            const int r = mono.u.back() - (g.n() - 1);
            if (r < 0) {
                continue;
            }
            auto it = pushed.find(r);
            if (it == pushed.end()) {
                it = pushed.emplace(r, expand_tower_segre(g, k - 1, r)).first;
            }
            ChowMonomial rest = mono;
            rest.u.pop_back();
            ChowClass factor(g, k - 1);
            factor.add_term(std::move(rest), coeff);
            lower += factor * it->second;
        }
        current = lower.graded_part(g.level_dim(k - 1));
    }
    const SegreList base = base_segre(g, 0);
    MultiPoly fundamental = MultiPoly::constant(nv, 1);
    for (std::size_t i = 0; i < nv; ++i) {
        fundamental *= MultiPoly::variable(nv, i);
    }
    MultiPoly total(nv);
    for (const auto &[mono, coeff] : current.terms()) {
        MultiPoly t = coeff * fundamental;
        for (int i : mono.s0) {
            t *= base[static_cast<std::size_t>(i)];
        }
        total += t;
    }
    return total;
}

struct IntersectionDegreeReport {
    MultiPoly value;
    Degree degree = minus_infinity;
    bool meets_N = false;
    // Degree assertions; true when satisfied or not applicable.
    bool h_power_bound_ok = true;
    bool top_degree_criterion_ok = true;
    bool kappa_pattern_applicable = false;
    bool kappa_pattern_ok = true;

    bool all_ok() const { return h_power_bound_ok && top_degree_criterion_ok && kappa_pattern_ok; }
};

// Degree of the integral over X of s_{i_1} ... s_{i_k} h^l (base Segre classes of Omega_X).
inline IntersectionDegreeReport intersection_degree_report(const TowerGeometry &g, const std::vector<int> &indices,
                                                           int l)
{
    if (!std::is_sorted(indices.begin(), indices.end())) {
        throw std::invalid_argument("intersection_degree_report: indices must be sorted ascending");
    }
    if (l < 0 || (!indices.empty() && indices.front() < 0)) {
        throw std::invalid_argument("intersection_degree_report: negative index");
    }
    const int total = std::accumulate(indices.begin(), indices.end(), 0) + l;
    if (total != g.n()) {
        throw std::invalid_argument("intersection_degree_report: dimension mismatch, indices and h-power sum to "
                                    + std::to_string(total) + " but dim X = " + std::to_string(g.n()));
    }
    IntersectionDegreeReport rep;
    ChowClass cls = ChowClass::h(g, 0).pow(static_cast<unsigned>(l));
    for (int i : indices) {
        cls *= ChowClass::base_segre_factor(g, 0, i);
    }
    rep.value = integrate(g, 0, cls);
    rep.degree = degree(rep.value);
    rep.meets_N = rep.degree == g.N();
    if (l > 0) {
        rep.h_power_bound_ok = rep.degree < g.N();
    } else {
        const int max_index = indices.empty() ? 0 : indices.back();
        rep.top_degree_criterion_ok = rep.meets_N == (max_index <= g.c());
    }
    if (l == 0 && static_cast<int>(indices.size()) == g.kappa()) {
        const bool below_b = indices.front() < g.b();
        const bool b_then_small = indices.front() == g.b()
                                  && std::any_of(indices.begin() + 1, indices.end(), [&](int i) { return i < g.c(); });
        if (below_b || b_then_small) {
            rep.kappa_pattern_applicable = true;
            rep.kappa_pattern_ok = rep.degree < g.N();
        }
    }
    return rep;
}

inline nlohmann::ordered_json to_json(const IntersectionDegreeReport &r)
{
    nlohmann::ordered_json j;
    j["degree"] = r.degree == minus_infinity ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.degree);
    j["meets_N"] = r.meets_N;
    j["value"] = to_string(r.value);
    return j;
}

} // namespace jetcalc

#endif // JETCALC_TOWERCHOW_HPP
