#ifndef JETCALC_DEGENERACY_HPP
#define JETCALC_DEGENERACY_HPP

#include <algorithm>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace jetcalc
{

struct DegeneracyInput {
    int N = 1;
    int c = 1;

    void validate() const
    {
        if (N < 1 || c < 1 || c > N) {
            throw std::invalid_argument("degeneracy input needs N >= 1 and 1 <= c <= N (got N=" + std::to_string(N)
                                        + ", c=" + std::to_string(c) + ")");
        }
    }
};

// Dimension of g.V cap W for generic g when dim V = n, dim W = m in P^N.
inline int moving_dimension(int n, int m, int N)
{
    if (N < 0 || n < 0 || m < 0 || n > N || m > N) {
        throw std::out_of_range("moving_dimension: need 0 <= n, m <= N (got n=" + std::to_string(n) + ", m="
                                + std::to_string(m) + ", N=" + std::to_string(N) + ")");
    }
    return std::max(n + m - N, 0);
}

struct DegeneracyReport {
    int N = 0;
    int c = 0;
    int locus_dim = 0; // negative values are kept: the locus is empty
    bool hyperbolic = false;

    bool empty() const { return locus_dim < 0; }
};

// Intersecting c generic hypersurfaces whose entire curves lie in a
// codimension-2 subset leaves an entire-curve locus of dimension N - 3c.
inline DegeneracyReport degeneracy_report(const DegeneracyInput &in)
{
    in.validate();
    return DegeneracyReport{in.N, in.c, in.N - 3 * in.c, 3 * in.c >= in.N};
}

inline nlohmann::ordered_json to_json(const DegeneracyReport &r)
{
    nlohmann::ordered_json j;
    j["N"] = r.N;
    j["c"] = r.c;
    j["locus_dim"] = r.locus_dim;
    j["hyperbolic"] = r.hyperbolic;
    return j;
}

} // namespace jetcalc

#endif // JETCALC_DEGENERACY_HPP
