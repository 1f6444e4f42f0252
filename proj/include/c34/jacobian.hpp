#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "c34/divisor.hpp"
#include "c34/fast34.hpp"
#include "c34/linalg.hpp"
#include "c34/oracle.hpp"
#include "c34/ring.hpp"

namespace c34 {

// ---------------------------------------------------------------------------
// Certified primitives.  Each one either fails its gate (an honest "cannot
// certify" outcome, surfaced as success=false) or returns a result that is
// guaranteed correct.
// ---------------------------------------------------------------------------

/// Result of certified addition (and of certified doubling, which produces
/// the same shape of data): on success, s and t are the two minimal monic
/// elements of the echelon basis of W^N for the sum divisor.
struct AddResult {
    bool success = false;
    RingElement s, t;
    EchelonSubspace basis;

    AddResult(std::uint64_t p, int N) : s(p), t(p), basis(N, p) {}
};

/// Result of certified flipping: the echelon basis of W^N_A.  Success also
/// certifies that the input divisor was typical and A is semi-typical.
struct FlipResult {
    bool success = false;
    EchelonSubspace basis;

    FlipResult(std::uint64_t p, int N) : basis(N, p) {}
};

/// Addition via intersection: from echelon bases of W^N_D and W^N_{D'},
/// computes W^N_{D+D'}.  The gate (leftmost d x d block of the reduction
/// matrix) fails exactly when W^{d+d'+g-1}_D meets W^{d+d'+g-1}_{D'}
/// nontrivially; success certifies D, D' disjoint and D+D' semi-typical.
inline AddResult add_divisors(const Curve34& curve, const EchelonSubspace& wd,
                              const EchelonSubspace& wdp, OpCounter& ctx) {
    std::uint64_t p = curve.modulus();
    int N = wd.ambient();
    AddResult res(p, N);
    if (wdp.ambient() != N)
        throw std::invalid_argument("windows live in different ambients");
    if (wd.dim() == 0 || wdp.dim() == 0) return res;
    int g = curve.genus();
    int d = wd.pivot_degrees().front() - g;
    if (d <= 0) return res;
    std::vector<int> rows;  // attained degrees <= d+g-1, increasing
    for (int n = 0; n <= d + g - 1; ++n)
        if (degree_attained(n)) rows.push_back(n);
    if (static_cast<int>(rows.size()) != d) return res;

    Matrix m(d, wdp.dim(), p);
    for (int c = 0; c < wdp.dim(); ++c) {
        RingElement r = wd.reduce(wdp.column(c));
        if (r.degree() > d + g - 1) return res;  // window not in normal shape
        for (int ri = 0; ri < d; ++ri) m.at(ri, c) = r.coeff(rows[ri]);
    }
    KernelResult ker = kernel_with_gate(m, d, ctx);
    if (!ker.success) return res;
    for (const auto& v : ker.kernel) {
        RingElement e(p);
        for (int k = 0; k < wdp.dim(); ++k)
            if (!v[k].is_zero()) e += scale(wdp.column(k), v[k], ctx);
        res.basis.insert(e, ctx);
    }
    if (res.basis.dim() < 2) return res;
    res.s = res.basis.column(0);
    res.t = res.basis.column(1);
    res.success = true;
    return res;
}

/// Flipping: given s, t in I_D with pole orders d+g, d+g+1 for a
/// semi-typical degree-d divisor D, computes W^N_A for the flip
/// A = div(s) - D (deg A = g).  The gate is the invertibility of the
/// leftmost g x g block of the matrix of t-multiples modulo s-multiples.
inline FlipResult flip(const Curve34& curve, const RingElement& s,
                       const RingElement& t, int d, int N, OpCounter& ctx) {
    std::uint64_t p = curve.modulus();
    int g = curve.genus();
    FlipResult res(p, N);
    if (s.degree() != d + g || t.degree() != d + g + 1) return res;
    int cutoff = d + g - 1;
    int hi = N + d + g + 1;

    // M': echelon image of s W^{N+1} in W^hi / W^cutoff.
    EchelonSubspace mprime(hi, p);
    for (const Monomial& m : monomial_basis(N + 1)) {
        RingElement me = RingElement::monomial(p, m.degree());
        mprime.insert(reduce_mod_W(ring_mul(curve, s, me, ctx), cutoff), ctx);
    }
    // Complement coordinates: attained degrees in (cutoff, hi] that are not
    // pivots of M'; there are exactly g of them when s behaves.
    std::vector<int> piv = mprime.pivot_degrees();
    std::vector<int> comp;
    for (int n = cutoff + 1; n <= hi; ++n)
        if (degree_attained(n) &&
            !std::binary_search(piv.begin(), piv.end(), n))
            comp.push_back(n);
    if (static_cast<int>(comp.size()) != g) return res;

    std::vector<Monomial> mons = monomial_basis(N);
    Matrix m2(g, static_cast<int>(mons.size()), p);
    for (std::size_t c = 0; c < mons.size(); ++c) {
        RingElement me = RingElement::monomial(p, mons[c].degree());
        RingElement r = mprime.reduce(
            reduce_mod_W(ring_mul(curve, t, me, ctx), cutoff));
        for (int ri = 0; ri < g; ++ri)
            m2.at(ri, static_cast<int>(c)) = r.coeff(comp[ri]);
    }
    KernelResult ker = kernel_with_gate(m2, g, ctx);
    if (!ker.success) return res;
    for (const auto& v : ker.kernel) {
        RingElement e(p);
        for (std::size_t k = 0; k < mons.size(); ++k)
            if (!v[k].is_zero()) e.set_coeff(mons[k].degree(), v[k]);
        res.basis.insert(e, ctx);
    }
    if (res.basis.dim() != dim_W(N) - g) return res;
    res.success = true;
    return res;
}

namespace detail {
/// Exact quotient -G*G1/F, via the tracked span of F-multiples.  Returns
/// success=false if GG1 is not divisible by F (malformed triple).
inline bool make_H1(const Curve34& curve, const DivisorTriple& T,
                    RingElement& h1, OpCounter& ctx) {
    std::uint64_t p = curve.modulus();
    RingElement GG1 =
        ring_mul(curve, T.base.G_element(), T.G1_element(), ctx);
    std::vector<Monomial> qm = monomial_basis(8);
    std::vector<RingElement> gens;
    gens.reserve(qm.size());
    for (const Monomial& m : qm)
        gens.push_back(ring_mul(curve, RingElement::monomial(p, m.degree()),
                                T.base.F_element(), ctx));
    SpanSolver solver(gens, p, ctx);
    SpanSolver::Reduction red = solver.reduce(GG1, ctx);
    if (!red.residual.is_zero()) return false;
    h1 = RingElement(p);
    for (std::size_t k = 0; k < qm.size(); ++k)
        if (!red.coeffs[k].is_zero())
            h1.set_coeff(qm[k].degree(), -red.coeffs[k]);
    return true;  // h1 = -GG1/F, so GG1 + F h1 = 0
}
}  // namespace detail

/// Doubling for a typical divisor with known triple (F, G, G1): computes
/// s, t spanning W^10_{2D}.  The candidate pairs are
///   ell  in {F, G, yF - xG, xF, xG}          (a basis of W^10_D),
///   ell' in {G1, -H1, yG1 + xH1, xG1, -xH1}  (ell' = a G1 - b H1),
/// and the kernel condition is ell' in W^11_D.
inline AddResult double_typical(const Curve34& curve, const DivisorTriple& T,
                                OpCounter& ctx) {
    constexpr int N = 10;
    std::uint64_t p = curve.modulus();
    int g = curve.genus();
    AddResult res(p, N);

    RingElement H1(p);
    if (!detail::make_H1(curve, T, H1, ctx)) return res;
    RingElement F = T.base.F_element(), G = T.base.G_element();
    RingElement G1 = T.G1_element();
    RingElement x = RingElement::monomial(p, 3);
    RingElement y = RingElement::monomial(p, 4);
    RingElement yF = ring_mul(curve, y, F, ctx);
    RingElement xG = ring_mul(curve, x, G, ctx);
    RingElement xF = ring_mul(curve, x, F, ctx);
    RingElement yG1 = ring_mul(curve, y, G1, ctx);
    RingElement xH1 = ring_mul(curve, x, H1, ctx);
    RingElement xG1 = ring_mul(curve, x, G1, ctx);
    std::vector<RingElement> L = {F, G, yF - xG, xF, xG};
    std::vector<RingElement> Lp = {G1, -H1, yG1 + xH1, xG1, -xH1};

    EchelonSubspace w11 = wnd_basis(curve, T.base, N + 1, ctx);
    std::vector<int> pivs = w11.pivot_degrees();
    std::vector<int> rows;
    for (int n = 0; n <= N + 1; ++n)
        if (degree_attained(n) &&
            !std::binary_search(pivs.begin(), pivs.end(), n))
            rows.push_back(n);
    if (static_cast<int>(rows.size()) != g) return res;

    Matrix m(g, static_cast<int>(Lp.size()), p);
    for (std::size_t c = 0; c < Lp.size(); ++c) {
        RingElement r = w11.reduce(Lp[c]);
        for (int ri = 0; ri < g; ++ri)
            m.at(ri, static_cast<int>(c)) = r.coeff(rows[ri]);
    }
    KernelResult ker = kernel_with_gate(m, g, ctx);
    if (!ker.success) return res;
    for (const auto& v : ker.kernel) {
        RingElement e(p);
        for (std::size_t k = 0; k < L.size(); ++k)
            if (!v[k].is_zero()) e += scale(L[k], v[k], ctx);
        res.basis.insert(e, ctx);
    }
    if (res.basis.dim() < 2) return res;
    res.s = res.basis.column(0);
    res.t = res.basis.column(1);
    res.success = true;
    return res;
}

/// Result of the simultaneous flip-and-double: the flip D of the input
/// divisor (as W^{N+1}_D) together with s, t spanning W^N_{2D}.
struct FlipDoubleResult {
    bool success = false;
    EchelonSubspace wD;   // W^{N+1}_D
    RingElement s, t;     // minimal elements of W^N_{2D}
    EchelonSubspace w2d;  // W^N_{2D}

    FlipDoubleResult(std::uint64_t p, int N)
        : wD(N + 1, p), s(p), t(p), w2d(N, p) {}
};

/// From (s~, t~) for a semi-typical divisor D~ (pole orders d~+g, d~+g+1),
/// simultaneously computes W^{N+1}_D for the flip D of D~ and W^N_{2D}.
/// Gate 1 ((2g+1) x (2g+1) block) certifies D~ typical; gate 2 (g x g block
/// of M''') certifies W^{3g}_D and W^{3g}_E disjoint.
inline FlipDoubleResult flip_and_double(const Curve34& curve,
                                        const RingElement& st,
                                        const RingElement& tt, int N,
                                        OpCounter& ctx) {
    std::uint64_t p = curve.modulus();
    int g = curve.genus();
    FlipDoubleResult res(p, N);
    int dt = st.degree() - g;
    if (dt <= 0 || tt.degree() != st.degree() + 1) return res;
    int cutoff = dt + g - 1;
    int hi = N + dt + g + 2;

    std::vector<int> rows;  // attained degrees in (cutoff, hi], increasing
    for (int n = cutoff + 1; n <= hi; ++n)
        if (degree_attained(n)) rows.push_back(n);
    if (static_cast<int>(rows.size()) != N + 3) return res;

    // Column monomial degrees, in the four prescribed groups:
    //   (1) t~ * W^{2g-1}, (2) s~ * W^{2g} (negated),
    //   (3) rest of t~ * W^{N+1}, (4) rest of s~ * W^{N+2} (negated).
    std::vector<int> g1, g2, g3, g4;
    for (const Monomial& m : monomial_basis(2 * g - 1)) g1.push_back(m.degree());
    for (const Monomial& m : monomial_basis(2 * g)) g2.push_back(m.degree());
    for (const Monomial& m : monomial_basis(N + 1))
        if (m.degree() > 2 * g - 1) g3.push_back(m.degree());
    for (const Monomial& m : monomial_basis(N + 2))
        if (m.degree() > 2 * g) g4.push_back(m.degree());
    int ncols = static_cast<int>(g1.size() + g2.size() + g3.size() + g4.size());
    int head = static_cast<int>(g1.size() + g2.size() + g3.size());

    Matrix m(N + 3, ncols, p);
    int col = 0;
    auto put = [&](const RingElement& f, int mdeg, bool negate) {
        RingElement prod = reduce_mod_W(
            ring_mul(curve, f, RingElement::monomial(p, mdeg), ctx), cutoff);
        for (int ri = 0; ri < N + 3; ++ri) {
            Fp v = prod.coeff(rows[ri]);
            m.at(ri, col) = negate ? -v : v;
        }
        ++col;
    };
    for (int dg : g1) put(tt, dg, false);
    for (int dg : g2) put(st, dg, true);
    for (int dg : g3) put(tt, dg, false);
    for (int dg : g4) put(st, dg, true);

    KernelResult ker = kernel_with_gate(m, 2 * g + 1, ctx);
    if (!ker.success) return res;
    // Gate success forces rank N+3 on the first three groups, so the kernel
    // has one echelon vector per fourth-group column.
    if (static_cast<int>(ker.kernel.size()) != static_cast<int>(g4.size()))
        return res;

    // Unpack each kernel vector into the pair (ell, ell'); the matrix signs
    // make the s~-group coefficients read off ell' directly.
    std::vector<RingElement> ells, ellps;
    for (const auto& v : ker.kernel) {
        RingElement l(p), lp(p);
        int idx = 0;
        for (int dg : g1) {
            if (!v[idx].is_zero()) l.set_coeff(dg, v[idx]);
            ++idx;
        }
        for (int dg : g2) {
            if (!v[idx].is_zero()) lp.set_coeff(dg, v[idx]);
            ++idx;
        }
        for (int dg : g3) {
            if (!v[idx].is_zero()) l.set_coeff(dg, v[idx]);
            ++idx;
        }
        for (int dg : g4) {
            if (!v[idx].is_zero()) lp.set_coeff(dg, v[idx]);
            ++idx;
        }
        ells.push_back(std::move(l));
        ellps.push_back(std::move(lp));
    }
    for (const auto& l : ells) res.wD.insert(l, ctx);
    if (res.wD.dim() != dim_W(N + 1) - g) return res;

    // M''': images of G1, ..., Y1 (all ell' except the last) in the
    // g-dimensional complement W^{N+1}/W^{N+1}_D.
    std::vector<int> pivs = res.wD.pivot_degrees();
    std::vector<int> comp;
    for (int n = 0; n <= N + 1; ++n)
        if (degree_attained(n) &&
            !std::binary_search(pivs.begin(), pivs.end(), n))
            comp.push_back(n);
    if (static_cast<int>(comp.size()) != g) return res;
    int npairs = static_cast<int>(ells.size()) - 1;  // discard Z1
    Matrix m3(g, npairs, p);
    for (int c = 0; c < npairs; ++c) {
        RingElement r = res.wD.reduce(ellps[c]);
        for (int ri = 0; ri < g; ++ri) m3.at(ri, c) = r.coeff(comp[ri]);
    }
    KernelResult ker3 = kernel_with_gate(m3, g, ctx);
    if (!ker3.success) return res;
    for (const auto& v : ker3.kernel) {
        RingElement e(p);
        for (int k = 0; k < npairs; ++k)
            if (!v[k].is_zero()) e += scale(ells[k], v[k], ctx);
        res.w2d.insert(e, ctx);
    }
    if (res.w2d.dim() < 2) return res;
    res.s = res.w2d.column(0);
    res.t = res.w2d.column(1);
    res.success = true;
    return res;
}

// ---------------------------------------------------------------------------
// Group APIs.
// ---------------------------------------------------------------------------

enum class PipelineMode { generic, fused };

/// Group-operation outcome: the value plus a flag recording whether a
/// certification gate failed and the oracle resolved the operation.
struct GroupResult {
    JacobianElement value;
    bool fallback = false;
};

/// Completes the triple representation of an element, computing G1 by a
/// certified flip when it is not already cached.  A gate failure here means
/// the stored (F, G) pair does not cut out a genuine typical divisor.
inline DivisorTriple ensure_triple(const Curve34& curve,
                                   const JacobianElement& x, OpCounter& ctx) {
    if (x.has_triple()) return x.triple();
    const TypicalDivisor& D = x.divisor();
    FlipResult fr = flip(curve, D.F_element(), D.G_element(), 3, 7, ctx);
    if (!fr.success) throw NotTypical{};
    RingElement G1 = fr.basis.column(1);
    Fp lam = G1.coeff(6);
    if (!lam.is_zero()) G1 -= scale(fr.basis.column(0), lam, ctx);
    return DivisorTriple{D, G1.coeff(4), G1.coeff(3), G1.coeff(0)};
}

namespace detail {
/// Normalizes an oracle window to a group element: zero class, or the
/// typical degree-3 representative obtained by flipping twice.
inline JacobianElement oracle_reduce(const Curve34& curve,
                                     const IdealWindow& w) {
    if (oracle_class_zero(w)) return JacobianElement::zero();
    IdealWindow f1 = oracle_flip(curve, w);
    if (f1.deg == 0) return JacobianElement::zero();
    IdealWindow f2 = oracle_flip(curve, f1);
    if (f2.deg == 0) return JacobianElement::zero();
    return JacobianElement::typical(oracle_to_typical(f2));
}

inline GroupResult fallback_add(const Curve34& curve, const JacobianElement& x,
                                const JacobianElement& y) {
    IdealWindow wx = oracle_from_typical(curve, x.divisor());
    IdealWindow wy = oracle_from_typical(curve, y.divisor());
    return {oracle_reduce(curve, product_window(curve, wx, wy)), true};
}

inline GroupResult fallback_double(const Curve34& curve,
                                   const JacobianElement& x) {
    IdealWindow wx = oracle_from_typical(curve, x.divisor());
    return {oracle_reduce(curve, oracle_double(curve, wx)), true};
}

/// Back end shared by addition and doubling: from certified (s, t) of the
/// degree-6 sum divisor, produce the reduced element.  Generic mode runs
/// two certified flips and returns a full triple; fused mode runs the
/// exact 19M + 1I formulas and returns a plain divisor (G1 stays lazy).
/// Returns false when a gate fails and the caller must fall back.
inline bool finish_reduction(const Curve34& curve, const CurveConstants& cc,
                             const RingElement& s, const RingElement& t,
                             PipelineMode mode, JacobianElement& out,
                             OpCounter& ctx) {
    if (mode == PipelineMode::fused) {
        FusedResult fr = fused_flipflip(STPair::from_elements(s, t), cc, ctx);
        if (!fr.success) return false;
        out = JacobianElement::typical(*fr.divisor);
        return true;
    }
    FlipResult first = flip(curve, s, t, 6, 7, ctx);
    if (!first.success) return false;
    const RingElement& F2 = first.basis.column(0);
    const RingElement& G2 = first.basis.column(1);
    FlipResult second = flip(curve, F2, G2, 3, 7, ctx);
    if (!second.success) return false;
    try {
        TypicalDivisor base = TypicalDivisor::from_elements(
            second.basis.column(0), second.basis.column(1), ctx);
        RingElement G1 = G2;
        Fp lam = G1.coeff(6);
        if (!lam.is_zero())
            G1 -= scale(second.basis.column(0), lam, ctx);
        out = JacobianElement::typical(
            DivisorTriple{base, G1.coeff(4), G1.coeff(3), G1.coeff(0)});
        return true;
    } catch (const NotTypical&) {
        return false;  // reduced class has a = 0; resolve via oracle
    }
}
}  // namespace detail

/// [D] + [D'] in the triple model.  Gate failures (shared
/// points, atypical intermediates) fall back to the oracle, flagged.
inline GroupResult group_add(const Curve34& curve, const CurveConstants& cc,
                             const JacobianElement& x,
                             const JacobianElement& y, PipelineMode mode,
                             OpCounter& ctx) {
    if (x.is_zero()) return {y, false};
    if (y.is_zero()) return {x, false};
    EchelonSubspace wx = wnd_basis(curve, x.divisor(), 10, ctx);
    EchelonSubspace wy = wnd_basis(curve, y.divisor(), 10, ctx);
    AddResult ar = add_divisors(curve, wx, wy, ctx);
    if (!ar.success) return detail::fallback_add(curve, x, y);
    JacobianElement out = JacobianElement::zero();
    if (!detail::finish_reduction(curve, cc, ar.s, ar.t, mode, out, ctx))
        return detail::fallback_add(curve, x, y);
    return {out, false};
}

/// 2[D]: H1 = -G G1 / F, then the certified doubling front end and the same
/// reduction back end as addition.
inline GroupResult group_double(const Curve34& curve, const CurveConstants& cc,
                                const JacobianElement& x, PipelineMode mode,
                                OpCounter& ctx) {
    if (x.is_zero()) return {x, false};
    DivisorTriple T = ensure_triple(curve, x, ctx);
    AddResult ar = double_typical(curve, T, ctx);
    if (!ar.success) return detail::fallback_double(curve, x);
    JacobianElement out = JacobianElement::zero();
    if (!detail::finish_reduction(curve, cc, ar.s, ar.t, mode, out, ctx))
        return detail::fallback_double(curve, x);
    return {out, false};
}

/// -[D]: exchange G and G1.  Free of field operations once the triple is
/// known; computing a missing G1 is the only possible cost.
inline GroupResult group_neg(const Curve34& curve, const JacobianElement& x,
                             OpCounter& ctx) {
    if (x.is_zero()) return {x, false};
    DivisorTriple T = ensure_triple(curve, x, ctx);
    return {JacobianElement::typical(T.negated()), false};
}

/// k[D] by left-to-right double-and-add; negative k negates at the end.
inline GroupResult group_smul(const Curve34& curve, const CurveConstants& cc,
                              std::int64_t k, const JacobianElement& x,
                              PipelineMode mode, OpCounter& ctx) {
    bool negate = k < 0;
    std::uint64_t n = negate ? static_cast<std::uint64_t>(-(k + 1)) + 1
                             : static_cast<std::uint64_t>(k);
    GroupResult acc{JacobianElement::zero(), false};
    if (n != 0 && !x.is_zero()) {
        int top = 63;
        while (!((n >> top) & 1)) --top;
        acc.value = x;
        for (int bit = top - 1; bit >= 0; --bit) {
            GroupResult d = group_double(curve, cc, acc.value, mode, ctx);
            acc.value = d.value;
            acc.fallback = acc.fallback || d.fallback;
            if ((n >> bit) & 1) {
                GroupResult a = group_add(curve, cc, acc.value, x, mode, ctx);
                acc.value = a.value;
                acc.fallback = acc.fallback || a.fallback;
            }
        }
    }
    if (negate && !acc.value.is_zero()) {
        GroupResult ng = group_neg(curve, acc.value, ctx);
        ng.fallback = ng.fallback || acc.fallback;
        return ng;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Small model: elements carry W^{3g}_D plus the (s~, t~) data
// of the operation that produced them; every operation ends in a flip.
// ---------------------------------------------------------------------------

struct SmallResult {
    SmallModelElement value;
    bool fallback = false;
};

/// Entry into the small model from the triple representation.  The seed
/// pair is (xF, xG1): div(xF) = (X + A) + D and div(xG1) = (X + A) + E for
/// X the fiber above x = 0, so D is presented as the flip of D~ = X + A.
inline SmallModelElement small_from_triple(const Curve34& curve,
                                           const DivisorTriple& T,
                                           OpCounter& ctx) {
    std::uint64_t p = curve.modulus();
    RingElement x = RingElement::monomial(p, 3);
    return SmallModelElement{
        wnd_basis(curve, T.base, 9, ctx),
        ring_mul(curve, x, T.base.F_element(), ctx),
        ring_mul(curve, x, T.G1_element(), ctx)};
}

namespace detail {
inline IdealWindow window_of_small(const Curve34& curve,
                                   const SmallModelElement& e) {
    OpCounter scratch;
    std::uint64_t p = curve.modulus();
    std::vector<RingElement> mults;
    for (const auto& c : e.w3g.columns())
        for (const Monomial& m : monomial_basis(11 - c.degree()))
            mults.push_back(ring_mul(
                curve, RingElement::monomial(p, m.degree()), c, scratch));
    return make_window(curve, mults, 3, 11, scratch);
}

/// Oracle fallback for the small model: reduce the window to a typical
/// divisor of the required class and rebuild the representation.
inline SmallResult small_fallback(const Curve34& curve, const IdealWindow& w,
                                  OpCounter& ctx) {
    JacobianElement e = oracle_reduce(curve, w);
    if (e.is_zero())
        throw OracleInvariantViolation(
            "small model cannot represent the zero class");
    DivisorTriple T = ensure_triple(curve, e, ctx);
    return {small_from_triple(curve, T, ctx), true};
}
}  // namespace detail

/// addflip: W^9 windows are extended to W^10 by one ideal multiple, then
/// certified addition and one flip.  Result class is -([x] + [y]).
inline SmallResult small_addflip(const Curve34& curve,
                                 const SmallModelElement& x,
                                 const SmallModelElement& y, OpCounter& ctx) {
    std::uint64_t p = curve.modulus();
    RingElement xm = RingElement::monomial(p, 3);
    auto extend = [&](const SmallModelElement& e) {
        EchelonSubspace w(10, p);
        for (const auto& c : e.w3g.columns()) w.insert(c, ctx);
        w.insert(ring_mul(curve, xm, e.w3g.column(1), ctx), ctx);
        return w;
    };
    // -([x]+[y]) is one oracle flip of the product window.
    auto fb = [&]() {
        IdealWindow wx = detail::window_of_small(curve, x);
        IdealWindow wy = detail::window_of_small(curve, y);
        IdealWindow sum = detail::product_window(curve, wx, wy);
        return detail::small_fallback(curve, oracle_flip(curve, sum), ctx);
    };
    AddResult ar = add_divisors(curve, extend(x), extend(y), ctx);
    if (!ar.success) return fb();
    FlipResult fr = flip(curve, ar.s, ar.t, 6, 9, ctx);
    if (!fr.success) return fb();
    return {SmallModelElement{fr.basis, ar.s, ar.t}, false};
}

/// doubleflip from a raw (s~, t~) pair: the lookahead entry point, usable
/// as soon as the pair is available, before the trailing flip of the
/// previous operation.  Result class is -2[D] for the flip D of D~.
inline SmallResult small_doubleflip_pair(const Curve34& curve,
                                         const RingElement& st,
                                         const RingElement& tt,
                                         OpCounter& ctx) {
    FlipDoubleResult fd = flip_and_double(curve, st, tt, 10, ctx);
    if (fd.success) {
        FlipResult fr = flip(curve, fd.s, fd.t, 6, 9, ctx);
        if (fr.success) return {SmallModelElement{fr.basis, fd.s, fd.t}, false};
    }
    // Oracle route: recover D as the flip of div(s~) - D~ via the colon
    // ideal of the pair, then double and flip.
    OpCounter scratch;
    std::uint64_t p = curve.modulus();
    int dt = st.degree() - curve.genus();
    EchelonSubspace span = column_echelon({st, tt}, tt.degree(), p, scratch);
    std::vector<RingElement> mults;
    for (const auto& c : span.columns())
        for (const Monomial& m : monomial_basis(dt + 8 - c.degree()))
            mults.push_back(ring_mul(
                curve, RingElement::monomial(p, m.degree()), c, scratch));
    IdealWindow wdt = detail::make_window(curve, mults, dt, dt + 8, scratch);
    IdealWindow wD = oracle_flip(curve, st, wdt, 11);
    return detail::small_fallback(
        curve, oracle_flip(curve, oracle_double(curve, wD)), ctx);
}

inline SmallResult small_doubleflip(const Curve34& curve,
                                    const SmallModelElement& x,
                                    OpCounter& ctx) {
    return small_doubleflip_pair(curve, x.s_tilde, x.t_tilde, ctx);
}

/// Small-model negation: flip D using the two minimal window columns as
/// the (s, t) pair; div(col0) = D + A makes the output carry d~ = g data.
inline SmallResult small_neg(const Curve34& curve, const SmallModelElement& x,
                             OpCounter& ctx) {
    const RingElement& s = x.w3g.column(0);
    const RingElement& t = x.w3g.column(1);
    FlipResult fr = flip(curve, s, t, 3, 9, ctx);
    if (fr.success) return {SmallModelElement{fr.basis, s, t}, false};
    return detail::small_fallback(
        curve, oracle_flip(curve, detail::window_of_small(curve, x)), ctx);
}

/// Class of a small-model element, for oracle comparisons and interop.
inline JacobianElement small_to_element(const Curve34& curve,
                                        const SmallModelElement& x,
                                        OpCounter& ctx) {
    TypicalDivisor D = TypicalDivisor::from_elements(x.w3g.column(0),
                                                     x.w3g.column(1), ctx);
    return JacobianElement::typical(D);
}

}  // namespace c34
