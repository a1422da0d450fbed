#ifndef JETCALC_SCHUR_HPP
#define JETCALC_SCHUR_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <jetcalc/polyring.hpp>
#include <jetcalc/towerchow.hpp>

namespace jetcalc
{

// Weakly decreasing sequence of positive integers.
class Partition
{
public:
    Partition() = default;

    explicit Partition(std::vector<int> parts) : parts_(std::move(parts))
    {
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (parts_[i] <= 0) {
                throw std::invalid_argument("Partition: parts must be positive");
            }
            if (i > 0 && parts_[i] > parts_[i - 1]) {
                throw std::invalid_argument("Partition: parts must be weakly decreasing");
            }
        }
    }

    const std::vector<int> &parts() const { return parts_; }
    std::size_t length() const { return parts_.size(); }

    int weight() const
    {
        int w = 0;
        for (int p : parts_) {
            w += p;
        }
        return w;
    }

    // Transpose of the Young diagram.
    Partition conjugate() const
    {
        std::vector<int> out;
        const int rows = static_cast<int>(parts_.size());
        const int cols = parts_.empty() ? 0 : parts_.front();
        for (int j = 1; j <= cols; ++j) {
            int count = 0;
            while (count < rows && parts_[static_cast<std::size_t>(count)] >= j) {
                ++count;
            }
            out.push_back(count);
        }
        return Partition(std::move(out));
    }

    friend auto operator<=>(const Partition &, const Partition &) = default;

private:
    std::vector<int> parts_;
};

inline Partition conjugate(const Partition &p) { return p.conjugate(); }

inline std::string to_string(const Partition &p)
{
    std::string s = "(";
    for (std::size_t i = 0; i < p.parts().size(); ++i) {
        s += (i ? "," : "") + std::to_string(p.parts()[i]);
    }
    return s + ")";
}

// All partitions of w, lexicographically decreasing: (w), (w-1,1), ...
inline std::vector<Partition> partitions_of(int w)
{
    std::vector<Partition> out;
    if (w < 0) {
        return out;
    }
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int remaining, int max_part) {
        if (remaining == 0) {
            out.emplace_back(cur);
            return;
        }
        for (int p = std::min(remaining, max_part); p >= 1; --p) {
            cur.push_back(p);
            rec(remaining - p, p);
            cur.pop_back();
        }
    };
    rec(w, w);
    return out;
}

// Graded sequence 1, x_1, x_2, ... ; indices outside [0, size) read as zero.
template <typename T>
class ClassSequence
{
public:
    explicit ClassSequence(std::vector<T> entries) : entries_(std::move(entries))
    {
        if (entries_.empty()) {
            throw std::invalid_argument("ClassSequence: needs entry 0");
        }
        zero_ = entries_.front() - entries_.front();
    }

    std::size_t size() const { return entries_.size(); }
    const std::vector<T> &entries() const { return entries_; }

    const T &operator[](int i) const
    {
        if (i < 0 || static_cast<std::size_t>(i) >= entries_.size()) {
            return zero_;
        }
        return entries_[static_cast<std::size_t>(i)];
    }

private:
    std::vector<T> entries_;
    T zero_;
};

// Delta_lambda(c) = det(c_{lambda_i + j - i}), expanded exactly by Laplace
// expansion along the first row with memoized minors.
template <typename T>
T schur_delta(const Partition &lambda, const ClassSequence<T> &c)
{
    const int len = static_cast<int>(lambda.length());
    if (len == 0) {
        return c[0];
    }
    if (len > 20) {
        throw std::invalid_argument("schur_delta: partition too long");
    }
    const auto &parts = lambda.parts();
    auto entry = [&](int i, int j) -> const T & { return c[parts[static_cast<std::size_t>(i)] + j - i]; };
    // minor(row, mask): determinant of rows row..len-1 restricted to the columns in mask.
    std::map<std::uint32_t, T> memo;
    std::function<T(int, std::uint32_t)> minor = [&](int row, std::uint32_t mask) -> T {
        if (row == len) {
            return c[0];
        }
        if (auto it = memo.find(mask); it != memo.end()) {
            return it->second;
        }
        T acc = c[0] - c[0];
        int sign_pos = 0;
        for (int j = 0; j < len; ++j) {
            if (!(mask & (1U << j))) {
                continue;
            }
            const T &a = entry(row, j);
            if (!(a == c[-1])) {
                T sub = a * minor(row + 1, mask & ~(1U << j));
                if (sign_pos % 2 == 0) {
                    acc = acc + sub;
                } else {
                    acc = acc - sub;
                }
            }
            ++sign_pos;
        }
        memo.emplace(mask, acc);
        return acc;
    };
    return minor(0, (1U << len) - 1U);
}

// The s-sequence with (1 + c_1 t + c_2 t^2 + ...)(1 - s_1 t + s_2 t^2 - ...) = 1,
// determined up to max_index.
template <typename T>
ClassSequence<T> series_inverse(const ClassSequence<T> &c, int max_index)
{
    if (max_index < 0) {
        throw std::invalid_argument("series_inverse: negative max_index");
    }
    std::vector<T> s{c[0]};
    for (int k = 1; k <= max_index; ++k) {
        // s_k = sum_{i=1}^k (-1)^(i+1) c_i s_{k-i}
        T acc = c[0] - c[0];
        for (int i = 1; i <= k; ++i) {
            T t = c[i] * s[static_cast<std::size_t>(k - i)];
            acc = (i % 2 == 1) ? acc + t : acc - t;
        }
        s.push_back(std::move(acc));
    }
    return ClassSequence<T>(std::move(s));
}

struct PartitionPositivity {
    Partition lambda;
    Partition conjugate;
    MultiPoly delta;          // Delta~_{conj(lambda)}(s(Omega_X(-a)))
    MultiPoly dominant_rhs;   // Delta~_{conj(lambda)} of the elementary symmetric sequence
    bool dominant_ok = false; // dominant(delta) == dominant_rhs
    std::optional<std::int64_t> bound;
};

struct NumericalPositivityReport {
    TowerGeometry geometry;
    std::int64_t a = 0;
    std::int64_t cap = 0;
    std::vector<PartitionPositivity> partitions;
    std::optional<std::int64_t> D; // max of the per-partition bounds; absent if any is unresolved

    bool all_dominant_ok() const
    {
        return std::all_of(partitions.begin(), partitions.end(), [](const auto &p) { return p.dominant_ok; });
    }
};

// Certifies numerical positivity of Omega_X(-a) for c >= n: every
// Delta_lambda(c(Omega_X(-a))) = Delta_conj(lambda)(s(Omega_X(-a))) is a
// multiple of h^l whose coefficient polynomial must be positive for large d_i.
inline NumericalPositivityReport numerical_positivity_report(const TowerGeometry &g, std::int64_t a,
                                                             std::int64_t d_max)
{
    if (g.c() < g.n()) {
        throw precondition_error("numerical positivity requires c >= n (got c=" + std::to_string(g.c())
                                 + ", n=" + std::to_string(g.n()) + ")");
    }
    const std::size_t nv = static_cast<std::size_t>(g.c());
    const ClassSequence<MultiPoly> segre(base_segre(g, Integer(-a)));
    std::vector<MultiPoly> elem;
    for (int i = 0; i <= g.n(); ++i) {
        elem.push_back(elementary_symmetric(nv, i));
    }
    const ClassSequence<MultiPoly> split(std::move(elem));

    NumericalPositivityReport rep{g, a, d_max, {}, std::nullopt};
    bool all_found = true;
    std::int64_t worst = 0;
    for (int w = 1; w <= g.n(); ++w) {
        for (const Partition &lambda : partitions_of(w)) {
            PartitionPositivity pp{lambda, lambda.conjugate(), MultiPoly(nv), MultiPoly(nv), false, std::nullopt};
            pp.delta = schur_delta(pp.conjugate, segre);
            pp.dominant_rhs = schur_delta(pp.conjugate, split);
            pp.dominant_ok = !pp.delta.is_zero() && !pp.dominant_rhs.is_zero()
                             && dominant(pp.delta) == pp.dominant_rhs;
            pp.bound = min_certified_bound(pp.delta, d_max);
            if (pp.bound) {
                worst = std::max(worst, *pp.bound);
            } else {
                all_found = false;
            }
            rep.partitions.push_back(std::move(pp));
        }
    }
    if (all_found) {
        rep.D = worst;
    }
    return rep;
}

inline nlohmann::ordered_json to_json(const NumericalPositivityReport &r)
{
    nlohmann::ordered_json j;
    j["geometry"] = to_json(r.geometry);
    j["a"] = r.a;
    auto parts = nlohmann::ordered_json::array();
    for (const auto &p : r.partitions) {
        nlohmann::ordered_json e;
        e["lambda"] = p.lambda.parts();
        e["conjugate"] = p.conjugate.parts();
        e["dominant_ok"] = p.dominant_ok;
        e["bound"] = p.bound ? nlohmann::ordered_json(*p.bound) : nlohmann::ordered_json(nullptr);
        e["delta"] = to_string(p.delta);
        parts.push_back(std::move(e));
    }
    j["partitions"] = std::move(parts);
    j["D"] = r.D ? nlohmann::ordered_json(*r.D) : nlohmann::ordered_json(nullptr);
    return j;
}

} // namespace jetcalc

#endif // JETCALC_SCHUR_HPP
