#pragma once

#include <optional>

#include "c34/divisor.hpp"
#include "c34/linalg.hpp"
#include "c34/ring.hpp"

namespace c34 {

/// Coefficient form of the (s, t) pair cutting out a semi-typical degree-6
/// divisor:
///   s = x^3  + s1 y^2 + s2 xy + s3 x^2 + s4 y + s5 x + s6,
///   t = x^2y + t1 y^2 + t2 xy + t3 x^2 + t4 y + t5 x + t6.
struct STPair {
    Fp s1, s2, s3, s4, s5, s6;
    Fp t1, t2, t3, t4, t5, t6;

    std::uint64_t modulus() const { return s1.modulus(); }

    /// Reads the coefficients off monic ring elements of degrees 9 and 10.
    /// A stray x^3 term in t is folded away as t - lambda s (free); anything
    /// else out of shape is rejected.
    static STPair from_elements(const RingElement& s, RingElement t) {
        std::uint64_t p = s.modulus();
        if (s.degree() != 9 || !(s.leading_coeff() == Fp::one(p)))
            throw std::invalid_argument("s must be monic of degree 9");
        if (t.degree() != 10 || !(t.leading_coeff() == Fp::one(p)))
            throw std::invalid_argument("t must be monic of degree 10");
        Fp lam = t.coeff(9);
        if (!lam.is_zero()) {
            OpCounter scratch;  // echelon cleanup, not on the budget path
            t -= scale(s, lam, scratch);
        }
        return STPair{s.coeff(8), s.coeff(7), s.coeff(6),
                      s.coeff(4), s.coeff(3), s.coeff(0),
                      t.coeff(8), t.coeff(7), t.coeff(6),
                      t.coeff(4), t.coeff(3), t.coeff(0)};
    }

    RingElement s_element() const {
        std::uint64_t p = modulus();
        RingElement r(p);
        r.set_coeff(9, Fp::one(p));
        r.set_coeff(8, s1);
        r.set_coeff(7, s2);
        r.set_coeff(6, s3);
        r.set_coeff(4, s4);
        r.set_coeff(3, s5);
        r.set_coeff(0, s6);
        return r;
    }
    RingElement t_element() const {
        std::uint64_t p = modulus();
        RingElement r(p);
        r.set_coeff(10, Fp::one(p));
        r.set_coeff(8, t1);
        r.set_coeff(7, t2);
        r.set_coeff(6, t3);
        r.set_coeff(4, t4);
        r.set_coeff(3, t5);
        r.set_coeff(0, t6);
        return r;
    }
};

/// The seven derived quantities of the fused flip-flip.  l1 != 0 is the
/// typicality certificate; the fast path stops if it is zero.
struct EllM {
    Fp l1, l2, l3;
    Fp m0, m1, m2, m3;
};

/// First stage: exactly 3M, 0I.
///   l1 = t1 - s2 + s1^2, l2 = t2 - s3 + s1(s2 + p2), l3 = t3 + s1 s3.
inline void compute_ell(const STPair& q, const CurveConstants& consts,
                        EllM& out, OpCounter& ctx) {
    out.l1 = q.t1 - q.s2 + mul(q.s1, q.s1, ctx);
    out.l2 = q.t2 - q.s3 + mul(q.s1, q.s2 + consts.p2, ctx);
    out.l3 = q.t3 + mul(q.s1, q.s3, ctx);
}

/// Second stage: exactly 10M, 0I.  The bilinear quantities
///   alpha = l1 t1, beta = l1 t2 + l2 t1, gamma = l1 t3 + l2 t2,
///   delta = l2 t3
/// cost 4M by interpolation at 0, 1, -1, infinity (halving is free).
inline void compute_m(const STPair& q, const CurveConstants& consts,
                      EllM& lm, OpCounter& ctx) {
    Fp alpha = mul(q.t1, lm.l1, ctx);
    Fp delta = mul(lm.l2, q.t3, ctx);
    Fp at1 = mul(q.t1 + q.t2 + q.t3, lm.l1 + lm.l2, ctx);   // a+b+g+d
    Fp atm1 = mul(q.t1 - q.t2 + q.t3, lm.l1 - lm.l2, ctx);  // a-b+g-d
    Fp gamma = scale_small(at1 + atm1, SmallScalar::half) - alpha;
    Fp beta = scale_small(at1 - atm1, SmallScalar::half) - delta;
    lm.m0 = lm.l3 - alpha;
    lm.m1 = -q.s4 - beta - mul(lm.m0, q.s1, ctx);
    lm.m2 = q.t4 - q.s5 + mul(q.s1, q.s4 + consts.p1, ctx) +
            mul(consts.p2, lm.l3, ctx) - gamma -
            mul(lm.m0, q.s2 + consts.p2, ctx);
    lm.m3 = q.t5 + mul(q.s1, q.s5 + consts.q2, ctx) - delta -
            mul(lm.m0, q.s3, ctx);
}

struct FusedResult {
    bool success = false;
    std::optional<TypicalDivisor> divisor;
};

/// Fused flip-flip: from (s, t) for a semi-typical degree-6 divisor, the
/// normalized (F, G) pair of the flip-of-flip A, in exactly 19M + 1I.
/// Failure (l1 = 0) certifies the input divisor is not typical.
///
/// Final stage is 6M + 1I with q = m1/l1:
///   F = x^2 - l1 y - (q + l2) x + (q l2 - m2),
///   G = xy - (q + s1 l1) y + (m0 - s1 l2) x + (m3 - q l3 + s1 c_F),
/// and a^{-1} = -l1^{-1} falls out at no added cost.
inline FusedResult fused_flipflip(const STPair& pair,
                                  const CurveConstants& consts,
                                  OpCounter& ctx) {
    EllM lm;
    compute_ell(pair, consts, lm, ctx);
    compute_m(pair, consts, lm, ctx);
    if (lm.l1.is_zero()) return {};
    Fp l1inv = inv(lm.l1, ctx);
    Fp q = mul(lm.m1, l1inv, ctx);
    Fp a = -lm.l1;
    Fp b = -(q + lm.l2);
    Fp c = mul(q, lm.l2, ctx) - lm.m2;
    Fp d = -(q + mul(pair.s1, lm.l1, ctx));
    Fp e = lm.m0 - mul(pair.s1, lm.l2, ctx);
    Fp f = lm.m3 - mul(q, lm.l3, ctx) + mul(pair.s1, c, ctx);
    FusedResult res;
    res.success = true;
    res.divisor.emplace(a, b, c, d, e, f, -l1inv);
    return res;
}

/// G0 = s1 F - G, the element with div G0 = A + E satisfying F t + G0 s = 0
/// exactly in the ring (the identity that certifies the fused formulas).
inline RingElement g0_element(const STPair& pair, const TypicalDivisor& A,
                              OpCounter& ctx) {
    RingElement g0 = scale(A.F_element(), pair.s1, ctx);
    g0 -= A.G_element();
    return g0;
}

/// The 8x9 matrix whose columns are the images of t, xt, yt, x^2 t, s, xs,
/// ys, x^2 s, xys in W^16/W^8, rows the y-heavy basis
/// {x^3, x^2y, xy^2, y^3, x^3y, x^2y^2, xy^3, y^4} (degrees 9..16).
/// Derivation/testing aid only; the fast path never materializes it.
inline Matrix build_A2_columns(const STPair& pair, const Curve34& curve) {
    OpCounter scratch;
    std::uint64_t p = curve.modulus();
    RingElement s = pair.s_element(), t = pair.t_element();
    RingElement x = RingElement::monomial(p, 3);
    RingElement y = RingElement::monomial(p, 4);
    std::vector<RingElement> cols;
    cols.push_back(t);
    cols.push_back(ring_mul(curve, x, t, scratch));
    cols.push_back(ring_mul(curve, y, t, scratch));
    cols.push_back(ring_mul(curve, x, cols[1], scratch));
    cols.push_back(s);
    cols.push_back(ring_mul(curve, x, s, scratch));
    cols.push_back(ring_mul(curve, y, s, scratch));
    cols.push_back(ring_mul(curve, x, cols[5], scratch));
    cols.push_back(ring_mul(curve, y, cols[5], scratch));
    Matrix m(8, 9, p);
    for (int c = 0; c < 9; ++c) {
        auto coords = yheavy_coords(curve, cols[c], 8, 16, scratch);
        for (int r = 0; r < 8; ++r) {
            auto it = coords.find(9 + r);
            m.at(r, c) = (it == coords.end()) ? Fp::zero(p) : it->second;
        }
    }
    return m;
}

}  // namespace c34
