#ifndef JETCALC_POLYRING_HPP
#define JETCALC_POLYRING_HPP

#include <algorithm>
#include <climits>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include <json.hpp>

namespace jetcalc
{

using Integer = boost::multiprecision::cpp_int;

// Raised when an operation is called outside the hypotheses it is stated under.
class precondition_error : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

using Exponents = std::vector<int>;

// Total degree of a polynomial. The zero polynomial has degree
// minus_infinity, so every strict bound deg(P) < N holds for it.
using Degree = int;
inline constexpr Degree minus_infinity = INT_MIN;

inline int total_degree(const Exponents &e)
{
    int s = 0;
    for (int x : e) {
        s += x;
    }
    return s;
}

// Canonical term order: graded lexicographic, largest first, d1 > d2 > ...
struct GradedLexGreater {
    bool operator()(const Exponents &a, const Exponents &b) const
    {
        const int da = total_degree(a), db = total_degree(b);
        if (da != db) {
            return da > db;
        }
        return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
    }
};

// Sparse polynomial in d1..d_c with arbitrary-precision integer coefficients.
// No stored coefficient is ever zero.
class MultiPoly
{
public:
    using TermMap = std::map<Exponents, Integer, GradedLexGreater>;

    explicit MultiPoly(std::size_t num_vars = 0) : num_vars_(num_vars) {}

    static MultiPoly constant(std::size_t num_vars, const Integer &c)
    {
        MultiPoly p(num_vars);
        p.add_term(Exponents(num_vars, 0), c);
        return p;
    }

    // Variable d_{index+1}.
    static MultiPoly variable(std::size_t num_vars, std::size_t index)
    {
        if (index >= num_vars) {
            throw std::out_of_range("MultiPoly::variable: index " + std::to_string(index + 1) + " exceeds "
                                    + std::to_string(num_vars) + " variables");
        }
        Exponents e(num_vars, 0);
        e[index] = 1;
        MultiPoly p(num_vars);
        p.add_term(std::move(e), Integer(1));
        return p;
    }

    static MultiPoly monomial(Exponents e, const Integer &c)
    {
        MultiPoly p(e.size());
        p.add_term(std::move(e), c);
        return p;
    }

    std::size_t num_vars() const { return num_vars_; }
    const TermMap &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Integer coefficient(const Exponents &e) const
    {
        auto it = terms_.find(e);
        return it == terms_.end() ? Integer(0) : it->second;
    }

    Integer constant_term() const { return coefficient(Exponents(num_vars_, 0)); }

    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0); }

    void add_term(Exponents e, const Integer &c)
    {
        if (e.size() != num_vars_) {
            throw std::invalid_argument("MultiPoly: exponent vector of length " + std::to_string(e.size())
                                        + " in a ring with " + std::to_string(num_vars_) + " variables");
        }
        if (c == 0) {
            return;
        }
        auto [it, inserted] = terms_.try_emplace(std::move(e), c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) {
                terms_.erase(it);
            }
        }
    }

    MultiPoly &operator+=(const MultiPoly &o)
    {
        check_compatible(o);
        for (const auto &[e, c] : o.terms_) {
            add_term(e, c);
        }
        return *this;
    }

    MultiPoly &operator-=(const MultiPoly &o)
    {
        check_compatible(o);
        for (const auto &[e, c] : o.terms_) {
            add_term(e, -c);
        }
        return *this;
    }

    MultiPoly &operator*=(const Integer &k)
    {
        if (k == 0) {
            terms_.clear();
            return *this;
        }
        for (auto &[e, c] : terms_) {
            c *= k;
        }
        return *this;
    }

    friend MultiPoly operator+(MultiPoly a, const MultiPoly &b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly &b) { return a -= b; }
    friend MultiPoly operator*(MultiPoly a, const Integer &k) { return a *= k; }
    friend MultiPoly operator*(const Integer &k, MultiPoly a) { return a *= k; }

    friend MultiPoly operator-(MultiPoly a)
    {
        for (auto &[e, c] : a.terms_) {
            c = -c;
        }
        return a;
    }

    friend MultiPoly operator*(const MultiPoly &a, const MultiPoly &b)
    {
        a.check_compatible(b);
        MultiPoly r(a.num_vars_);
        Exponents e(a.num_vars_);
        for (const auto &[ea, ca] : a.terms_) {
            for (const auto &[eb, cb] : b.terms_) {
                for (std::size_t i = 0; i < e.size(); ++i) {
                    e[i] = ea[i] + eb[i];
                }
                r.add_term(e, ca * cb);
            }
        }
        return r;
    }

    MultiPoly &operator*=(const MultiPoly &o) { return *this = *this * o; }

    MultiPoly pow(unsigned k) const
    {
        MultiPoly result = constant(num_vars_, 1);
        MultiPoly base = *this;
        while (k != 0) {
            if (k & 1U) {
                result *= base;
            }
            k >>= 1U;
            if (k != 0) {
                base *= base;
            }
        }
        return result;
    }

    Integer evaluate(std::span<const Integer> point) const
    {
        if (point.size() != num_vars_) {
            throw std::invalid_argument("MultiPoly::evaluate: point dimension mismatch");
        }
        Integer total = 0;
        for (const auto &[e, c] : terms_) {
            Integer t = c;
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] != 0) {
                    t *= boost::multiprecision::pow(point[i], static_cast<unsigned>(e[i]));
                }
            }
            total += t;
        }
        return total;
    }

    friend bool operator==(const MultiPoly &a, const MultiPoly &b)
    {
        return a.num_vars_ == b.num_vars_ && a.terms_ == b.terms_;
    }

private:
    void check_compatible(const MultiPoly &o) const
    {
        if (o.num_vars_ != num_vars_) {
            throw std::invalid_argument("MultiPoly: mixing rings with " + std::to_string(num_vars_) + " and "
                                        + std::to_string(o.num_vars_) + " variables");
        }
    }

    std::size_t num_vars_;
    TermMap terms_;
};

inline Degree degree(const MultiPoly &p)
{
    // The term map is graded, so the first term carries the top degree.
    return p.is_zero() ? minus_infinity : total_degree(p.terms().begin()->first);
}

inline MultiPoly dominant(const MultiPoly &p)
{
    if (p.is_zero()) {
        throw std::domain_error("dominant part of the zero polynomial is undefined");
    }
    const Degree top = degree(p);
    MultiPoly r(p.num_vars());
    for (const auto &[e, c] : p.terms()) {
        if (total_degree(e) != top) {
            break;
        }
        r.add_term(e, c);
    }
    return r;
}

// Homogeneous component of total degree k (possibly zero).
inline MultiPoly homogeneous_part(const MultiPoly &p, int k)
{
    MultiPoly r(p.num_vars());
    for (const auto &[e, c] : p.terms()) {
        if (total_degree(e) == k) {
            r.add_term(e, c);
        }
    }
    return r;
}

// e_k(d_1, ..., d_n); e_0 = 1 and e_k = 0 for k > n.
inline MultiPoly elementary_symmetric(std::size_t num_vars, int k)
{
    MultiPoly r(num_vars);
    if (k < 0 || static_cast<std::size_t>(k) > num_vars) {
        return r;
    }
    std::vector<int> mask(num_vars, 0);
    std::fill(mask.end() - k, mask.end(), 1);
    do {
        r.add_term(Exponents(mask.begin(), mask.end()), 1);
    } while (std::next_permutation(mask.begin(), mask.end()));
    return r;
}

enum class AsymOrder { sim, gtrsim_strict, incomparable };

inline const char *to_string(AsymOrder o)
{
    switch (o) {
        case AsymOrder::sim:
            return "sim";
        case AsymOrder::gtrsim_strict:
            return "gtrsim-strict";
        case AsymOrder::incomparable:
            return "incomparable";
    }
    return "?";
}

// Compares P^dom and Q^dom. Zero polynomials only compare as sim to each other.
inline AsymOrder asym_compare(const MultiPoly &p, const MultiPoly &q)
{
    if (p.is_zero() || q.is_zero()) {
        return (p.is_zero() && q.is_zero()) ? AsymOrder::sim : AsymOrder::incomparable;
    }
    const MultiPoly dp = dominant(p), dq = dominant(q);
    if (dp == dq) {
        return AsymOrder::sim;
    }
    // Coefficientwise comparison over the union of both supports.
    const MultiPoly diff = dp - dq;
    for (const auto &[e, c] : diff.terms()) {
        if (c < 0) {
            return AsymOrder::incomparable;
        }
    }
    return AsymOrder::gtrsim_strict;
}

// P(delta + x_1, ..., delta + x_c), expanded exactly.
inline MultiPoly shift(const MultiPoly &p, const Integer &delta)
{
    const std::size_t nv = p.num_vars();
    MultiPoly result(nv);
    std::vector<Integer> delta_pow{1};
    for (const auto &[e, c] : p.terms()) {
        // (delta + x)^k = sum_j C(k, j) delta^(k-j) x^j, one variable at a time.
        MultiPoly acc = MultiPoly::constant(nv, c);
        for (std::size_t i = 0; i < nv; ++i) {
            const int k = e[i];
            if (k == 0) {
                continue;
            }
            while (delta_pow.size() <= static_cast<std::size_t>(k)) {
                delta_pow.push_back(delta_pow.back() * delta);
            }
            MultiPoly factor(nv);
            Integer binom = 1;
            for (int j = 0; j <= k; ++j) {
                Exponents ej(nv, 0);
                ej[i] = j;
                factor.add_term(std::move(ej), binom * delta_pow[static_cast<std::size_t>(k - j)]);
                binom = binom * (k - j) / (j + 1);
            }
            acc *= factor;
        }
        result += acc;
    }
    return result;
}

enum class CertificateStatus { certified, not_certified };

// Evidence that P > 0 on every integer point with all d_i >= bound: after the
// substitution d_i = bound + x_i every coefficient is >= 0 and the constant
// term is > 0. The criterion is sufficient, not necessary, so a bound is
// "certified" and never claimed minimal.
struct PositivityCertificate {
    std::int64_t bound = 0;
    Integer shifted_constant = 0;
    CertificateStatus status = CertificateStatus::not_certified;

    bool certified() const { return status == CertificateStatus::certified; }
};

inline PositivityCertificate certify_positive(const MultiPoly &p, std::int64_t delta)
{
    if (delta < 0) {
        throw std::invalid_argument("certify_positive: bound must be nonnegative");
    }
    PositivityCertificate cert;
    cert.bound = delta;
    const MultiPoly shifted = shift(p, Integer(delta));
    cert.shifted_constant = shifted.constant_term();
    bool ok = cert.shifted_constant > 0;
    for (const auto &[e, c] : shifted.terms()) {
        if (c < 0) {
            ok = false;
            break;
        }
    }
    cert.status = ok ? CertificateStatus::certified : CertificateStatus::not_certified;
    return cert;
}

inline std::optional<std::int64_t> min_certified_bound(const MultiPoly &p, std::int64_t delta_max)
{
    if (delta_max < 0) {
        throw std::invalid_argument("min_certified_bound: cap must be nonnegative");
    }
    if (p.is_zero()) {
        return std::nullopt;
    }
    // A negative top coefficient survives every shift.
    const MultiPoly top = dominant(p);
    for (const auto &[e, c] : top.terms()) {
        if (c < 0) {
            return std::nullopt;
        }
    }
    for (std::int64_t delta = 0; delta <= delta_max; ++delta) {
        if (certify_positive(p, delta).certified()) {
            return delta;
        }
    }
    return std::nullopt;
}

// Canonical text form, e.g. "3*d1^2*d2 - 4*d1".
inline std::string to_string(const MultiPoly &p, std::string_view var_prefix = "d")
{
    if (p.is_zero()) {
        return "0";
    }
    std::string out;
    bool first = true;
    for (const auto &[e, c] : p.terms()) {
        const bool negative = c < 0;
        const Integer mag = negative ? Integer(-c) : c;
        if (first) {
            if (negative) {
                out += '-';
            }
        } else {
            out += negative ? " - " : " + ";
        }
        first = false;
        std::string mono;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) {
                continue;
            }
            if (!mono.empty()) {
                mono += '*';
            }
            mono += std::string(var_prefix) + std::to_string(i + 1);
            if (e[i] > 1) {
                mono += '^' + std::to_string(e[i]);
            }
        }
        if (mono.empty()) {
            out += mag.str();
        } else if (mag == 1) {
            out += mono;
        } else {
            out += mag.str() + '*' + mono;
        }
    }
    return out;
}

inline nlohmann::ordered_json to_json(const MultiPoly &p)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto &[e, c] : p.terms()) {
        nlohmann::ordered_json t;
        t["exponents"] = e;
        t["coeff"] = c.str();
        arr.push_back(std::move(t));
    }
    return arr;
}

inline MultiPoly multipoly_from_json(const nlohmann::ordered_json &j, std::size_t num_vars)
{
    MultiPoly p(num_vars);
    for (const auto &t : j) {
        p.add_term(t.at("exponents").get<Exponents>(), Integer(t.at("coeff").get<std::string>()));
    }
    return p;
}

inline nlohmann::ordered_json to_json(const PositivityCertificate &c)
{
    nlohmann::ordered_json j;
    j["bound"] = c.bound;
    j["shifted_constant"] = c.shifted_constant.str();
    j["status"] = c.certified() ? "certified" : "not-certified";
    return j;
}

} // namespace jetcalc

#endif // JETCALC_POLYRING_HPP
