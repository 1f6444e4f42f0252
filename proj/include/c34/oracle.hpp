#pragma once

#include <stdexcept>
#include <vector>

#include "c34/divisor.hpp"

namespace c34 {

/// Everything in this header recomputes results from first principles
/// (window multiplication maps, colon ideals, explicit ranks) without regard
/// to operation counts; all field work goes to scratch counters.  It is the
/// reference the certified fast paths are checked against, and the fallback
/// when a certification gate fails.

struct OracleInvariantViolation : std::logic_error {
    explicit OracleInvariantViolation(const std::string& what)
        : std::logic_error("oracle invariant violated: " + what) {}
};

/// Window model of an effective divisor D: the echelon basis of W^N_D for
/// the generous cutoff N = deg D + 2g + 2.  At this cutoff the window both
/// determines D and generates I_D.
struct IdealWindow {
    int deg = 0;
    EchelonSubspace space;
};

namespace detail {
constexpr int kGenus = 3;

inline int window_cutoff(int deg) { return deg + 2 * kGenus + 2; }

/// Columns of a window basis with pivot degree <= cutoff: since the basis is
/// reduced echelon, this prefix is a basis of the truncated window.
inline std::vector<RingElement> truncate_window(const EchelonSubspace& s,
                                                int cutoff) {
    std::vector<RingElement> out;
    for (const auto& c : s.columns())
        if (c.degree() <= cutoff) out.push_back(c);
    return out;
}

inline IdealWindow make_window(const Curve34& curve,
                               const std::vector<RingElement>& spanning,
                               int deg, int ambient, OpCounter& scratch) {
    EchelonSubspace big = column_echelon(spanning, ambient, curve.modulus(),
                                         scratch);
    if (big.dim() != dim_W(ambient) - deg)
        throw OracleInvariantViolation(
            "spanning set has the wrong codimension");
    int N = window_cutoff(deg);
    EchelonSubspace s(N, curve.modulus());
    for (const auto& c : truncate_window(big, N)) s.insert(c, scratch);
    if (s.dim() != dim_W(N) - deg)
        throw OracleInvariantViolation("window truncation lost dimensions");
    return IdealWindow{deg, std::move(s)};
}
}  // namespace detail

inline IdealWindow oracle_from_typical(const Curve34& curve,
                                       const TypicalDivisor& D) {
    OpCounter scratch;
    return IdealWindow{3, wnd_basis(curve, D, detail::window_cutoff(3),
                                    scratch)};
}

namespace detail {
/// Extends a window W^N_D to W^M_D via the surjective multiplication map
/// W^N_D x W^k -> W^{N+k}_D, valid since N >= deg D + 2g + 1 and k >= 2g.
inline EchelonSubspace extend_window(const Curve34& curve,
                                     const IdealWindow& a, int M,
                                     OpCounter& scratch) {
    int N = a.space.ambient();
    if (M <= N) {
        EchelonSubspace s(M, curve.modulus());
        for (const auto& c : truncate_window(a.space, M)) s.insert(c, scratch);
        return s;
    }
    int k = M - N;
    if (k < 2 * kGenus) k = 2 * kGenus;  // spanning needs excess >= 2g
    EchelonSubspace big(N + k, curve.modulus());
    for (const auto& c : a.space.columns())
        for (const Monomial& m : monomial_basis(k))
            big.insert(ring_mul(curve,
                                RingElement::monomial(curve.modulus(),
                                                      m.degree()),
                                c, scratch),
                       scratch);
    if (big.dim() != dim_W(N + k) - a.deg)
        throw OracleInvariantViolation("window extension lost dimensions");
    EchelonSubspace s(M, curve.modulus());
    for (const auto& c : truncate_window(big, M)) s.insert(c, scratch);
    return s;
}

/// Ideal product I_D * I_{D'} (exact: the coordinate ring of a smooth
/// affine curve is a Dedekind domain), via the surjective multiplication
/// map W^a_D x W^b_{D'} -> W^{a+b}_{D+D'} with a >= deg D + 2g + 1,
/// b >= deg D' + 2g.
inline IdealWindow product_window(const Curve34& curve, const IdealWindow& a,
                                  const IdealWindow& b) {
    OpCounter scratch;
    int ca = a.deg + 2 * kGenus + 1;
    int cb = b.deg + 2 * kGenus;
    std::vector<RingElement> ua = truncate_window(a.space, ca);
    std::vector<RingElement> vb = truncate_window(b.space, cb);
    std::vector<RingElement> products;
    products.reserve(ua.size() * vb.size());
    for (const auto& u : ua)
        for (const auto& v : vb)
            products.push_back(ring_mul(curve, u, v, scratch));
    return make_window(curve, products, a.deg + b.deg, ca + cb, scratch);
}
}  // namespace detail

/// Gate-free window intersection: W^M_D intersect W^M_{D'} = W^M_{lcm(D,D')}.
/// For disjoint divisors this is the window of D + D'; overlap shows up as a
/// larger-than-expected intersection, and the returned degree is the actual
/// lcm degree read off the dimension.
inline IdealWindow oracle_add(const Curve34& curve, const IdealWindow& a,
                              const IdealWindow& b) {
    OpCounter scratch;
    std::uint64_t p = curve.modulus();
    // Work high enough that both extended windows are exact, then truncate.
    int M = std::max(a.space.ambient(), b.space.ambient()) + 2 * detail::kGenus;
    EchelonSubspace wa = detail::extend_window(curve, a, M, scratch);
    EchelonSubspace wb = detail::extend_window(curve, b, M, scratch);
    // Intersection = kernel of (basis of wb) -> W^M / wa.
    std::vector<RingElement> reduced;
    for (const auto& v : wb.columns()) reduced.push_back(wa.reduce(v));
    std::vector<int> coord_degs;
    for (int n = 0; n <= M; ++n)
        if (degree_attained(n)) coord_degs.push_back(n);
    Matrix m(static_cast<int>(coord_degs.size()), wb.dim(), p);
    for (std::size_t r = 0; r < coord_degs.size(); ++r)
        for (int c = 0; c < wb.dim(); ++c)
            m.at(static_cast<int>(r), c) = reduced[c].coeff(coord_degs[r]);
    KernelResult ker = kernel_with_gate(m, 0, scratch);
    std::vector<RingElement> elems;
    for (const auto& v : ker.kernel) {
        RingElement h(p);
        for (int k = 0; k < wb.dim(); ++k)
            if (!v[k].is_zero()) h += scale(wb.column(k), v[k], scratch);
        if (!h.is_zero()) elems.push_back(std::move(h));
    }
    EchelonSubspace inter = column_echelon(elems, M, p, scratch);
    int lcm_deg = dim_W(M) - inter.dim();
    int N = detail::window_cutoff(lcm_deg);
    EchelonSubspace out(N, p);
    for (const auto& c : detail::truncate_window(inter, N))
        out.insert(c, scratch);
    if (out.dim() != dim_W(N) - lcm_deg)
        throw OracleInvariantViolation("intersection truncation lost dimensions");
    return IdealWindow{lcm_deg, std::move(out)};
}

/// 2D via the ideal product I_D * I_D, spanned and re-echeloned in a large
/// window (doubling must honor multiplicity, so intersection is not usable).
inline IdealWindow oracle_double(const Curve34& curve, const IdealWindow& a) {
    return detail::product_window(curve, a, a);
}

/// The flip A = div(f) - D of D with respect to f, via the colon ideal
/// I_A = (f) : I_D.  Solved as an untruncated linear system over the
/// monomial basis of W^N; N must be at least deg A + 2g + 2.
inline IdealWindow oracle_flip(const Curve34& curve, const RingElement& f,
                               const IdealWindow& a, int N) {
    OpCounter scratch;
    std::uint64_t p = curve.modulus();
    int deg_flip = f.degree() - a.deg;
    if (deg_flip < 0)
        throw OracleInvariantViolation("flip element shorter than degree");
    if (N < detail::window_cutoff(deg_flip))
        throw OracleInvariantViolation("flip ambient too small");
    std::vector<Monomial> unknowns = monomial_basis(N);

    // Constraints: for every window element g of W^{N_D}_D (these generate
    // I_D) and every basis monomial m of W^N, the product h * g must fall in
    // (f), i.e. reduce to zero against f * W^{...} (exact for a principal
    // ideal: degrees add).
    std::vector<std::vector<Fp>> rows;
    for (const auto& g : a.space.columns()) {
        int prod_deg = N + g.degree();
        EchelonSubspace fmults =
            span_of_multiples(curve, {f}, prod_deg, scratch);
        std::vector<RingElement> reduced;
        reduced.reserve(unknowns.size());
        for (const Monomial& m : unknowns) {
            RingElement me = RingElement::monomial(p, m.degree());
            reduced.push_back(fmults.reduce(ring_mul(curve, me, g, scratch)));
        }
        for (int d = 0; d <= prod_deg; ++d) {
            if (!degree_attained(d)) continue;
            std::vector<Fp> row;
            row.reserve(unknowns.size());
            bool nonzero = false;
            for (const auto& r : reduced) {
                row.push_back(r.coeff(d));
                nonzero = nonzero || !row.back().is_zero();
            }
            if (nonzero) rows.push_back(std::move(row));
        }
    }
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(unknowns.size()),
             p);
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) m.at(r, c) = rows[r][c];
    KernelResult ker = kernel_with_gate(m, 0, scratch);
    std::vector<RingElement> elems;
    for (const auto& v : ker.kernel) {
        RingElement h(p);
        for (std::size_t k = 0; k < unknowns.size(); ++k)
            h.set_coeff(unknowns[k].degree(), v[k]);
        if (!h.is_zero()) elems.push_back(std::move(h));
    }
    return detail::make_window(curve, elems, deg_flip, N, scratch);
}

/// Flip with respect to the minimal nonzero element of the window.
inline IdealWindow oracle_flip(const Curve34& curve, const IdealWindow& a) {
    if (a.space.dim() == 0)
        throw OracleInvariantViolation("window has no nonzero element");
    const RingElement& f = a.space.column(0);
    int deg_flip = f.degree() - a.deg;
    return oracle_flip(curve, f, a,
                       detail::window_cutoff(std::max(deg_flip, 0)));
}

/// [D - (deg D) P_inf] = 0 iff some nonzero function has all its zeros on D
/// and pole order deg D, i.e. iff the window has a pivot degree <= deg D.
inline bool oracle_class_zero(const IdealWindow& a) {
    auto piv = a.space.pivot_degrees();
    return !piv.empty() && piv.front() <= a.deg;
}

/// Class equality via [x] - [y] = [x + flip(y)] (flips negate classes):
/// equal iff the combined divisor's class is zero.  Typical divisors never
/// represent the zero class (their windows vanish in degree <= 5).
inline bool oracle_class_equal(const Curve34& curve, const JacobianElement& x,
                               const JacobianElement& y) {
    if (x.is_zero() || y.is_zero()) return x.is_zero() == y.is_zero();
    IdealWindow wx = oracle_from_typical(curve, x.divisor());
    IdealWindow wy = oracle_from_typical(curve, y.divisor());
    IdealWindow s = oracle_add(curve, wx, oracle_flip(curve, wy));
    return oracle_class_zero(s);
}

/// Recovers the normalized (F, G) pair from a window of a typical degree-3
/// divisor; throws if the window is not typical.
inline TypicalDivisor oracle_to_typical(const IdealWindow& a) {
    OpCounter scratch;
    if (a.deg != 3 || a.space.dim() < 2 ||
        a.space.pivot_degrees().front() != 6)
        throw NotTypical{};
    return TypicalDivisor::from_elements(a.space.column(0), a.space.column(1),
                                         scratch);
}

}  // namespace c34
