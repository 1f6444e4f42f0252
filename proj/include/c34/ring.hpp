#pragma once

#include <array>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "c34/field.hpp"

namespace c34 {

/// Monomial x^i y^j of the coordinate ring, canonical form has j <= 2
/// (y^3 is always reduced away).  deg x = 3, deg y = 4.
struct Monomial {
    int i = 0;
    int j = 0;

    int degree() const { return 3 * i + 4 * j; }
    bool operator==(const Monomial&) const = default;
};

/// Canonical monomial of a given degree, if one exists.  With j <= 2 the
/// degree 3i+4j determines (i, j) uniquely; degrees 1, 2, 5 are gaps.
inline std::optional<Monomial> monomial_of_degree(int n) {
    if (n < 0) return std::nullopt;
    int j = n % 3;  // 4j = j (mod 3)
    if (n < 4 * j) return std::nullopt;
    return Monomial{(n - 4 * j) / 3, j};
}

inline bool degree_attained(int n) { return monomial_of_degree(n).has_value(); }

/// All canonical monomials of degree <= N, in strictly increasing degree.
inline std::vector<Monomial> monomial_basis(int N) {
    std::vector<Monomial> out;
    for (int n = 0; n <= N; ++n)
        if (auto m = monomial_of_degree(n)) out.push_back(*m);
    return out;
}

/// dim W^N = number of attained degrees <= N.
inline int dim_W(int N) {
    int d = 0;
    for (int n = 0; n <= N; ++n)
        if (degree_attained(n)) ++d;
    return d;
}

/// A C_{3,4} curve y^3 - x^4 + sum_{3i+4j<12} c_ij x^i y^j = 0 over F_p.
/// Coefficients are stored by increasing monomial degree:
/// [c00, c10, c01, c20, c11, c02, c30, c21, c12].
class Curve34 {
  public:
    static constexpr int kNumCoeffs = 9;
    // (i, j) exponent pairs in coefficient-storage order.
    static constexpr std::array<std::pair<int, int>, kNumCoeffs> kExponents{{
        {0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}}};

    Curve34(std::uint64_t p, const std::array<Fp, kNumCoeffs>& c)
        : p_(p), c_(c) {
        if (p < 5) throw std::invalid_argument("modulus must be a prime > 3");
        for (const Fp& x : c_)
            if (x.modulus() != p) throw ModulusMismatch{};
    }

    static Curve34 from_int_coeffs(std::uint64_t p,
                                   const std::array<std::int64_t, kNumCoeffs>& c) {
        std::array<Fp, kNumCoeffs> cc;
        for (int k = 0; k < kNumCoeffs; ++k) cc[k] = Fp::from_int(c[k], p);
        return Curve34(p, cc);
    }

    std::uint64_t modulus() const { return p_; }
    int genus() const { return 3; }
    const std::array<Fp, kNumCoeffs>& coeffs() const { return c_; }

    Fp coeff(int i, int j) const {
        for (int k = 0; k < kNumCoeffs; ++k)
            if (kExponents[k] == std::pair<int, int>{i, j}) return c_[k];
        return Fp::zero(p_);
    }

    bool operator==(const Curve34&) const = default;

  private:
    std::uint64_t p_;
    std::array<Fp, kNumCoeffs> c_;
};

/// Element of R = K[C - {P_inf}] over the canonical degree-ordered monomial
/// basis (x^i y^j, j <= 2), stored sparsely keyed by degree.
class RingElement {
  public:
    explicit RingElement(std::uint64_t p) : p_(p) {}

    static RingElement zero(std::uint64_t p) { return RingElement(p); }
    static RingElement monomial(std::uint64_t p, int degree,
                                Fp coeff = Fp()) {
        if (!degree_attained(degree))
            throw std::invalid_argument("no canonical monomial of degree " +
                                        std::to_string(degree));
        RingElement r(p);
        r.set_coeff(degree, coeff.modulus() == 0 ? Fp::one(p) : coeff);
        return r;
    }

    std::uint64_t modulus() const { return p_; }
    bool is_zero() const { return terms_.empty(); }

    /// Pole order at P_inf; -1 encodes deg 0 = -infinity.
    int degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first; }

    Fp coeff(int degree) const {
        auto it = terms_.find(degree);
        return it == terms_.end() ? Fp::zero(p_) : it->second;
    }
    Fp leading_coeff() const {
        return terms_.empty() ? Fp::zero(p_) : terms_.rbegin()->second;
    }

    void set_coeff(int degree, const Fp& c) {
        if (!degree_attained(degree))
            throw std::invalid_argument("degree not attained by the basis");
        if (c.is_zero())
            terms_.erase(degree);
        else
            terms_[degree] = c;
    }

    const std::map<int, Fp>& terms() const { return terms_; }

    RingElement& operator+=(const RingElement& rhs) {
        if (p_ != rhs.p_) throw ModulusMismatch{};
        for (const auto& [d, c] : rhs.terms_) set_coeff(d, coeff(d) + c);
        return *this;
    }
    RingElement& operator-=(const RingElement& rhs) {
        if (p_ != rhs.p_) throw ModulusMismatch{};
        for (const auto& [d, c] : rhs.terms_) set_coeff(d, coeff(d) - c);
        return *this;
    }
    friend RingElement operator+(RingElement a, const RingElement& b) {
        a += b;
        return a;
    }
    friend RingElement operator-(RingElement a, const RingElement& b) {
        a -= b;
        return a;
    }
    friend RingElement operator-(const RingElement& a) {
        RingElement r(a.p_);
        for (const auto& [d, c] : a.terms_) r.terms_[d] = -c;
        return r;
    }

    bool operator==(const RingElement&) const = default;

  private:
    std::uint64_t p_;
    std::map<int, Fp> terms_;
};

/// Counted scalar multiple (one M per nonzero term of f).
inline RingElement scale(const RingElement& f, const Fp& c, OpCounter& ctx) {
    RingElement r(f.modulus());
    if (c.is_zero()) return r;
    for (const auto& [d, a] : f.terms()) r.set_coeff(d, mul(a, c, ctx));
    return r;
}

namespace detail {
using ExpPoly = std::map<std::pair<int, int>, Fp>;  // (i, j) -> coeff, j unbounded

inline void exp_add(ExpPoly& poly, int i, int j, const Fp& c,
                    std::uint64_t p) {
    auto key = std::pair{i, j};
    auto it = poly.find(key);
    Fp s = (it == poly.end() ? Fp::zero(p) : it->second) + c;
    if (s.is_zero())
        poly.erase(key);
    else
        poly[key] = s;
}

/// Eagerly rewrites y^3 -> x^4 - sum c_ij x^i y^j until all j <= 2.
inline void exp_reduce(ExpPoly& poly, const Curve34& curve, OpCounter& ctx) {
    std::uint64_t p = curve.modulus();
    for (;;) {
        auto it = poly.begin();
        while (it != poly.end() && it->first.second < 3) ++it;
        if (it == poly.end()) return;
        auto [i, j] = it->first;
        Fp a = it->second;
        poly.erase(it);
        exp_add(poly, i + 4, j - 3, a, p);
        for (int k = 0; k < Curve34::kNumCoeffs; ++k) {
            const Fp& c = curve.coeffs()[k];
            if (c.is_zero()) continue;
            auto [ci, cj] = Curve34::kExponents[k];
            exp_add(poly, i + ci, j - 3 + cj, -mul(a, c, ctx), p);
        }
    }
}

inline RingElement exp_to_ring(const ExpPoly& poly, std::uint64_t p) {
    RingElement r(p);
    for (const auto& [e, c] : poly) r.set_coeff(3 * e.first + 4 * e.second, c);
    return r;
}
}  // namespace detail

/// Product in R, reduced eagerly to the canonical basis.  Satisfies
/// deg(fg) = deg f + deg g for nonzero operands.
inline RingElement ring_mul(const Curve34& curve, const RingElement& f,
                            const RingElement& g, OpCounter& ctx) {
    if (f.modulus() != curve.modulus() || g.modulus() != curve.modulus())
        throw ModulusMismatch{};
    std::uint64_t p = curve.modulus();
    detail::ExpPoly acc;
    for (const auto& [df, cf] : f.terms()) {
        Monomial mf = *monomial_of_degree(df);
        for (const auto& [dg, cg] : g.terms()) {
            Monomial mg = *monomial_of_degree(dg);
            detail::exp_add(acc, mf.i + mg.i, mf.j + mg.j, mul(cf, cg, ctx), p);
        }
    }
    detail::exp_reduce(acc, curve, ctx);
    return detail::exp_to_ring(acc, p);
}

/// Image of f in W^N / W^cutoff: drops every term of degree <= cutoff.
inline RingElement reduce_mod_W(const RingElement& f, int cutoff) {
    RingElement r(f.modulus());
    for (const auto& [d, c] : f.terms())
        if (d > cutoff) r.set_coeff(d, c);
    return r;
}

/// The y-heavy monomial of degree n: the x^i y^j with 3i+4j = n maximizing j.
/// For degrees 12, 15, 16 this picks y^3, xy^3, y^4 instead of the canonical
/// x^4, x^5, x^4 y.
inline Monomial yheavy_monomial_of_degree(int n) {
    int j = n % 3;
    while (4 * (j + 3) <= n) j += 3;
    return Monomial{(n - 4 * j) / 3, j};
}

namespace detail {
/// Canonical form of an arbitrary x^i y^j (j possibly >= 3).
inline RingElement canonical_of(const Curve34& curve, Monomial m,
                                OpCounter& ctx) {
    detail::ExpPoly poly;
    detail::exp_add(poly, m.i, m.j, Fp::one(curve.modulus()), curve.modulus());
    detail::exp_reduce(poly, curve, ctx);
    return detail::exp_to_ring(poly, curve.modulus());
}
}  // namespace detail

/// Coordinates of f over the y-heavy monomial basis, for degrees in
/// (cutoff, hi].  This is the row basis used by the 8x9 column matrix of the
/// fused flip-flip derivation (x^3, x^2y, xy^2, y^3, x^3y, ... for
/// cutoff = 8, hi = 16); entries keyed by degree.
inline std::map<int, Fp> yheavy_coords(const Curve34& curve,
                                       const RingElement& f, int cutoff,
                                       int hi, OpCounter& ctx) {
    if (f.degree() > hi)
        throw std::invalid_argument("element does not lie in the window");
    RingElement rest = f;
    std::map<int, Fp> coords;
    for (int n = hi; n > cutoff; --n) {
        if (!degree_attained(n)) continue;
        Fp c = rest.coeff(n);
        coords[n] = c;
        if (!c.is_zero()) {
            Monomial m = yheavy_monomial_of_degree(n);
            rest -= scale(detail::canonical_of(curve, m, ctx), c, ctx);
        }
    }
    return coords;
}

/// Constants p1, p2, q2 of the curve, as they appear in the fused-formula
/// column matrix.  Extracted by reduction rather than read off the curve
/// coefficients, so the extraction is independent of sign conventions.
struct CurveConstants {
    Fp p1, p2, q2;
    bool operator==(const CurveConstants&) const = default;
};

struct InconsistentExtraction : std::runtime_error {
    InconsistentExtraction()
        : std::runtime_error(
              "curve constant extraction disagrees between evaluations; "
              "the curve is outside the normalized model the fused formulas "
              "assume") {}
};

namespace detail {
struct ExtractedConstants {
    CurveConstants k;
};

/// One extraction pass at a concrete (s, t) coefficient tuple.
inline CurveConstants extract_constants_at(const Curve34& curve,
                                           const std::array<Fp, 6>& s,
                                           const std::array<Fp, 6>& t,
                                           OpCounter& ctx) {
    std::uint64_t p = curve.modulus();
    auto make = [&](int lead, const std::array<Fp, 6>& c) {
        // lead + c1 y^2 + c2 xy + c3 x^2 + c4 y + c5 x + c6
        RingElement r(p);
        r.set_coeff(lead, Fp::one(p));
        const int degs[6] = {8, 7, 6, 4, 3, 0};
        for (int k = 0; k < 6; ++k) r.set_coeff(degs[k], r.coeff(degs[k]) + c[k]);
        return r;
    };
    RingElement se = make(9, s), te = make(10, t);
    RingElement x = RingElement::monomial(p, 3);
    RingElement y = RingElement::monomial(p, 4);
    RingElement xs = ring_mul(curve, x, se, ctx);
    RingElement xt = ring_mul(curve, x, te, ctx);
    RingElement xxs = ring_mul(curve, x, xs, ctx);
    RingElement xxt = ring_mul(curve, x, xt, ctx);
    RingElement ys = ring_mul(curve, y, se, ctx);
    RingElement yt = ring_mul(curve, y, te, ctx);
    RingElement xys = ring_mul(curve, x, ys, ctx);
    // Rows of the columns for xs, x^2 s, x^2 t over the y-heavy basis:
    //   (xs)[x^2 y]  = s2 + p2
    //   (x^2 s)[x^3] = s5 + q2
    //   (x^2 t)[xy^2] = p1
    auto c_xs = yheavy_coords(curve, xs, 8, 12, ctx);
    auto c_xxs = yheavy_coords(curve, xxs, 8, 15, ctx);
    auto c_xxt = yheavy_coords(curve, xxt, 8, 16, ctx);
    CurveConstants k{c_xxt[11], c_xs[10] - s[1], c_xxs[9] - s[4]};

    // Validate the extraction against the full three-constant column
    // template; any entry off the template means the curve's reduction
    // cannot be expressed with just (p1, p2, q2).
    Fp z = Fp::zero(p), o = Fp::one(p);
    Fp s1 = s[0], s2 = s[1], s3 = s[2], s4 = s[3], s5 = s[4];
    Fp t1 = t[0], t2 = t[1], t3 = t[2], t4 = t[3], t5 = t[4];
    Fp t3p2 = mul(t3, k.p2, ctx), s3p2 = mul(s3, k.p2, ctx);
    struct ColCheck {
        const RingElement* elem;
        std::array<Fp, 8> expect;  // rows x^3, x^2y, xy^2, y^3, ..., y^4
    };
    const ColCheck cols[9] = {
        {&te, {z, o, z, z, z, z, z, z}},
        {&xt, {t3, t2, t1, z, o, z, z, z}},
        {&yt, {z, t3, t2, t1, z, o, z, z}},
        {&xxt, {t5, t4 + k.q2 + t3p2, k.p1, t3, t2, t1 + k.p2, z, o}},
        {&se, {o, z, z, z, z, z, z, z}},
        {&xs, {s3, s2 + k.p2, s1, o, z, z, z, z}},
        {&ys, {z, s3, s2, s1, o, z, z, z}},
        {&xxs, {s5 + k.q2, s4 + k.p1 + s3p2, z, s3, s2 + k.p2, s1, o, z}},
        {&xys, {z, s5 + k.q2, s4 + k.p1, z, s3, s2 + k.p2, s1, o}},
    };
    for (const ColCheck& cc : cols) {
        auto coords = yheavy_coords(curve, *cc.elem, 8, 16, ctx);
        for (int r = 0; r < 8; ++r) {
            auto it = coords.find(9 + r);
            Fp got = (it == coords.end()) ? z : it->second;
            if (!(got == cc.expect[r])) throw InconsistentExtraction{};
        }
    }
    return k;
}
}  // namespace detail

/// Derives (p1, p2, q2) by two independent evaluations at distinct (s, t)
/// placeholder tuples; a disagreement means the curve's reduction produces
/// columns the three-constant matrix cannot represent.
inline CurveConstants derive_constants(const Curve34& curve) {
    OpCounter scratch;  // derivation is a one-time setup, uncounted
    std::uint64_t p = curve.modulus();
    std::array<Fp, 6> s1{}, t1{}, s2{}, t2{};
    for (int k = 0; k < 6; ++k) {
        s1[k] = Fp((k * 37 + 11) % p, p);
        t1[k] = Fp((k * 53 + 29) % p, p);
        s2[k] = Fp((k * 71 + 43) % p, p);
        t2[k] = Fp((k * 13 + 61) % p, p);
    }
    CurveConstants a = detail::extract_constants_at(curve, s1, t1, scratch);
    CurveConstants b = detail::extract_constants_at(curve, s2, t2, scratch);
    if (!(a == b)) throw InconsistentExtraction{};
    return a;
}

/// Advisory rational-point smoothness scan (desk scale only).
struct SmoothnessReport {
    bool scanned = false;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> singular_points;
};

inline SmoothnessReport smoothness_probe(const Curve34& curve) {
    SmoothnessReport rep;
    std::uint64_t p = curve.modulus();
    if (p > (1u << 13)) return rep;  // too large to enumerate F_p x F_p
    rep.scanned = true;
    auto at = [&](std::uint64_t xv, std::uint64_t yv) {
        // f, f_x, f_y at (x, y); f = y^3 - x^4 + sum c x^i y^j
        auto pw = [&](std::uint64_t b, int e) {
            std::uint64_t r = 1;
            for (int k = 0; k < e; ++k) r = detail::mulmod(r, b, p);
            return r;
        };
        std::uint64_t f = (pw(yv, 3) + p - pw(xv, 4) % p) % p;
        std::uint64_t fx = (p - detail::mulmod(4 % p, pw(xv, 3), p)) % p;
        std::uint64_t fy = detail::mulmod(3 % p, pw(yv, 2), p);
        for (int k = 0; k < Curve34::kNumCoeffs; ++k) {
            auto [i, j] = Curve34::kExponents[k];
            std::uint64_t c = curve.coeffs()[k].value();
            if (c == 0) continue;
            std::uint64_t mon = detail::mulmod(pw(xv, i), pw(yv, j), p);
            f = (f + detail::mulmod(c, mon, p)) % p;
            if (i > 0)
                fx = (fx + detail::mulmod(
                               detail::mulmod(c, i % p, p),
                               detail::mulmod(pw(xv, i - 1), pw(yv, j), p), p)) %
                     p;
            if (j > 0)
                fy = (fy + detail::mulmod(
                               detail::mulmod(c, j % p, p),
                               detail::mulmod(pw(xv, i), pw(yv, j - 1), p), p)) %
                     p;
        }
        return std::array<std::uint64_t, 3>{f, fx, fy};
    };
    for (std::uint64_t xv = 0; xv < p; ++xv)
        for (std::uint64_t yv = 0; yv < p; ++yv) {
            auto [f, fx, fy] = at(xv, yv);
            if (f == 0 && fx == 0 && fy == 0) rep.singular_points.push_back({xv, yv});
        }
    return rep;
}

/// Curve text format: `curve p=<dec> c=<9 comma-separated decimals>`.
inline std::string serialize_curve(const Curve34& curve) {
    std::ostringstream os;
    os << "curve p=" << curve.modulus() << " c=";
    for (int k = 0; k < Curve34::kNumCoeffs; ++k) {
        if (k) os << ',';
        os << curve.coeffs()[k].value();
    }
    return os.str();
}

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t pos)
        : std::runtime_error(what + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
    std::size_t position;
};

inline Curve34 parse_curve(const std::string& text) {
    std::istringstream is(text);
    std::string word;
    if (!(is >> word) || word != "curve") throw ParseError("expected 'curve'", 0);
    auto expect_kv = [&](const std::string& key) {
        std::string tok;
        if (!(is >> tok) || tok.rfind(key + "=", 0) != 0)
            throw ParseError("expected '" + key + "='",
                             static_cast<std::size_t>(is.tellg()));
        return tok.substr(key.size() + 1);
    };
    std::uint64_t p = 0;
    try {
        p = std::stoull(expect_kv("p"));
    } catch (const std::invalid_argument&) {
        throw ParseError("bad modulus", static_cast<std::size_t>(is.tellg()));
    }
    std::string cs = expect_kv("c");
    std::array<Fp, Curve34::kNumCoeffs> c;
    std::size_t pos = 0;
    for (int k = 0; k < Curve34::kNumCoeffs; ++k) {
        std::size_t next = cs.find(',', pos);
        std::string piece = cs.substr(pos, next == std::string::npos
                                               ? std::string::npos
                                               : next - pos);
        try {
            c[k] = Fp(std::stoull(piece), p);
        } catch (const std::exception&) {
            throw ParseError("bad curve coefficient", pos);
        }
        if (k + 1 < Curve34::kNumCoeffs) {
            if (next == std::string::npos)
                throw ParseError("expected 9 curve coefficients", pos);
            pos = next + 1;
        }
    }
    return Curve34(p, c);
}

}  // namespace c34
