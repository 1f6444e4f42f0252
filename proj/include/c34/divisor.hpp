#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "c34/linalg.hpp"
#include "c34/ring.hpp"

namespace c34 {

struct NotTypical : std::runtime_error {
    NotTypical() : std::runtime_error("divisor is not typical (a = 0)") {}
};

struct SamplingExhausted : std::runtime_error {
    SamplingExhausted()
        : std::runtime_error("could not sample a typical divisor; curve or "
                             "field too small or pathological") {}
};

/// Typical degree-3 divisor D, cut out by the ideal generating set
///   F = x^2 + a y + b x + c   in W^6_D,
///   G = xy  + d y + e x + f   in W^7_D,
/// normalized monic with zero x^2-coefficient in G.  Typicality is a != 0;
/// a^{-1} is cached at construction (billed once, to the given counter).
class TypicalDivisor {
  public:
    TypicalDivisor(Fp a, Fp b, Fp c, Fp d, Fp e, Fp f, OpCounter& ctx)
        : a_(a), b_(b), c_(c), d_(d), e_(e), f_(f), a_inv_(inv_or_throw(a, ctx)) {}

    /// Variant for callers that already hold a^{-1} (e.g. the fused fast
    /// path, where it falls out of the flip at no added cost).
    TypicalDivisor(Fp a, Fp b, Fp c, Fp d, Fp e, Fp f, Fp a_inv)
        : a_(a), b_(b), c_(c), d_(d), e_(e), f_(f), a_inv_(a_inv) {
        if (a.is_zero()) throw NotTypical{};
    }

    std::uint64_t modulus() const { return a_.modulus(); }
    Fp a() const { return a_; }
    Fp b() const { return b_; }
    Fp c() const { return c_; }
    Fp d() const { return d_; }
    Fp e() const { return e_; }
    Fp f() const { return f_; }
    Fp a_inv() const { return a_inv_; }

    RingElement F_element() const {
        RingElement r(modulus());
        r.set_coeff(6, Fp::one(modulus()));
        r.set_coeff(4, a_);
        r.set_coeff(3, b_);
        r.set_coeff(0, c_);
        return r;
    }
    RingElement G_element() const {
        RingElement r(modulus());
        r.set_coeff(7, Fp::one(modulus()));
        r.set_coeff(4, d_);
        r.set_coeff(3, e_);
        r.set_coeff(0, f_);
        return r;
    }

    /// Reads (a..f) off monic elements F in W^6, G in W^7.  G may carry an
    /// x^2 coefficient; it is folded away as G - lambda F.
    static TypicalDivisor from_elements(const RingElement& F, RingElement G,
                                        OpCounter& ctx) {
        if (F.degree() != 6 || !(F.leading_coeff() == Fp::one(F.modulus())))
            throw std::invalid_argument("F must be monic of degree 6");
        if (G.degree() != 7 || !(G.leading_coeff() == Fp::one(G.modulus())))
            throw std::invalid_argument("G must be monic of degree 7");
        Fp lam = G.coeff(6);
        if (!lam.is_zero()) G -= scale(F, lam, ctx);
        return TypicalDivisor(F.coeff(4), F.coeff(3), F.coeff(0), G.coeff(4),
                              G.coeff(3), G.coeff(0), ctx);
    }

    bool operator==(const TypicalDivisor& rhs) const {
        return a_ == rhs.a_ && b_ == rhs.b_ && c_ == rhs.c_ && d_ == rhs.d_ &&
               e_ == rhs.e_ && f_ == rhs.f_;
    }

  private:
    static Fp inv_or_throw(const Fp& a, OpCounter& ctx) {
        if (a.is_zero()) throw NotTypical{};
        return inv(a, ctx);
    }

    Fp a_, b_, c_, d_, e_, f_, a_inv_;
};

/// Triple (F, G, G1): the pair (F, G) cuts out D, and (F, G1) cuts out the
/// flip A of D, sharing the same F (and hence the same a != 0).
struct DivisorTriple {
    TypicalDivisor base;
    Fp d1, e1, f1;  // G1 = xy + d1 y + e1 x + f1

    RingElement G1_element() const {
        RingElement r(base.modulus());
        r.set_coeff(7, Fp::one(base.modulus()));
        r.set_coeff(4, d1);
        r.set_coeff(3, e1);
        r.set_coeff(0, f1);
        return r;
    }
    TypicalDivisor flip_divisor() const {
        return TypicalDivisor(base.a(), base.b(), base.c(), d1, e1, f1,
                              base.a_inv());
    }
    /// Negation swaps the roles of D and its flip; no field operations.
    DivisorTriple negated() const {
        TypicalDivisor neg(base.a(), base.b(), base.c(), d1, e1, f1,
                           base.a_inv());
        return DivisorTriple{neg, base.d(), base.e(), base.f()};
    }

    bool operator==(const DivisorTriple& rhs) const {
        return base == rhs.base && d1 == rhs.d1 && e1 == rhs.e1 && f1 == rhs.f1;
    }
};

/// Group-element type: the zero class (D ~ gP_inf, never typical) or a
/// typical divisor, optionally carrying the flip data of the triple model.
class JacobianElement {
  public:
    static JacobianElement zero() { return JacobianElement(); }
    static JacobianElement typical(const TypicalDivisor& d) {
        JacobianElement e;
        e.base_ = d;
        return e;
    }
    static JacobianElement typical(const DivisorTriple& t) {
        JacobianElement e;
        e.base_ = t.base;
        e.g1_ = std::array<Fp, 3>{t.d1, t.e1, t.f1};
        return e;
    }

    bool is_zero() const { return !base_.has_value(); }
    const TypicalDivisor& divisor() const { return *base_; }
    bool has_triple() const { return g1_.has_value(); }
    DivisorTriple triple() const {
        return DivisorTriple{*base_, (*g1_)[0], (*g1_)[1], (*g1_)[2]};
    }

    bool operator==(const JacobianElement& rhs) const {
        if (is_zero() || rhs.is_zero()) return is_zero() == rhs.is_zero();
        return *base_ == *rhs.base_;  // the triple's G1 is derived data
    }

  private:
    JacobianElement() = default;
    std::optional<TypicalDivisor> base_;
    std::optional<std::array<Fp, 3>> g1_;
};

/// Small-model representation of a class: the window W^{3g}_D of the
/// degree-g divisor D, plus the pair (s~, t~) left over from the operation
/// that produced D, with div s~ = D~ + D (so D is the flip of D~).  Fresh
/// elements carry d~ = 2g data (degrees 9, 10); negation outputs carry
/// d~ = g data (degrees 6, 7).
struct SmallModelElement {
    EchelonSubspace w3g;  // W^9_D, pivot degrees 6..9
    RingElement s_tilde;
    RingElement t_tilde;

    bool operator==(const SmallModelElement& rhs) const {
        return w3g == rhs.w3g;  // (s~, t~) are provenance, not identity
    }
};

/// H = a^{-1}(yF - xG), the degree-8 element of I_D with leading term y^2.
inline RingElement make_H(const Curve34& curve, const TypicalDivisor& D,
                          OpCounter& ctx) {
    std::uint64_t p = curve.modulus();
    RingElement x = RingElement::monomial(p, 3);
    RingElement y = RingElement::monomial(p, 4);
    RingElement yF = ring_mul(curve, y, D.F_element(), ctx);
    RingElement xG = ring_mul(curve, x, D.G_element(), ctx);
    return scale(yF - xG, D.a_inv(), ctx);
}

/// Echelon basis of W^N_D for typical D, built from the degree-ordered
/// generator list F, G, H, xF, xG, xH, x^2 F, ... (pivot degrees 6..N).
inline EchelonSubspace wnd_basis(const Curve34& curve, const TypicalDivisor& D,
                                 int N, OpCounter& ctx) {
    if (N < 5) throw std::invalid_argument("wnd_basis needs N >= 5");
    EchelonSubspace s(N, curve.modulus());
    if (N == 5) return s;  // W^5_D = 0 by semi-typicality
    std::vector<RingElement> seq{D.F_element(), D.G_element(),
                                 make_H(curve, D, ctx)};
    RingElement x = RingElement::monomial(curve.modulus(), 3);
    for (int k = 3; k < N - 5; ++k)
        seq.push_back(ring_mul(curve, x, seq[k - 3], ctx));
    while (static_cast<int>(seq.size()) > N - 5) seq.pop_back();
    for (const auto& v : seq) s.insert(v, ctx);
    return s;
}

/// Echelon span of all monomial multiples m*g (deg <= N) of the given
/// generators: the degree-N window of the ideal they generate, up to
/// saturation effects.
inline EchelonSubspace span_of_multiples(const Curve34& curve,
                                         const std::vector<RingElement>& gens,
                                         int N, OpCounter& ctx) {
    EchelonSubspace s(N, curve.modulus());
    for (const auto& g : gens) {
        if (g.is_zero()) continue;
        for (const Monomial& m : monomial_basis(N - g.degree())) {
            RingElement me =
                RingElement::monomial(curve.modulus(), m.degree());
            s.insert(ring_mul(curve, me, g, ctx), ctx);
        }
    }
    return s;
}

struct TypicalityCheck {
    bool semi_typical = false;
    bool typical = false;
};

/// Typicality/semi-typicality test on a normalized (F, G) pair: the
/// a != 0 condition; for a = 0 semi-typicality is decided by the rank of a
/// generous ideal window (pivot degrees must be exactly 6..N).
inline TypicalityCheck check_typical(const Curve34& curve,
                                     const RingElement& F,
                                     const RingElement& G) {
    TypicalityCheck res;
    if (F.degree() != 6 || G.degree() != 7) return res;
    res.typical = !F.coeff(4).is_zero();
    if (res.typical) {
        res.semi_typical = true;
        return res;
    }
    OpCounter scratch;
    const int N = 16;
    EchelonSubspace w = span_of_multiples(curve, {F, G}, N, scratch);
    std::vector<int> expect;
    for (int n = 6; n <= N; ++n)
        if (degree_attained(n)) expect.push_back(n);
    res.semi_typical = (w.pivot_degrees() == expect);
    return res;
}

/// Evaluates a ring element at an affine point.
inline Fp evaluate_at(const RingElement& f, const Fp& x0, const Fp& y0) {
    std::uint64_t p = f.modulus();
    OpCounter scratch;
    Fp acc = Fp::zero(p);
    for (const auto& [deg, c] : f.terms()) {
        Monomial m = *monomial_of_degree(deg);
        Fp v = c;
        for (int k = 0; k < m.i; ++k) v = mul(v, x0, scratch);
        for (int k = 0; k < m.j; ++k) v = mul(v, y0, scratch);
        acc = acc + v;
    }
    return acc;
}

namespace detail {
// --- small dense polynomial arithmetic over F_p, for root finding ---
using Poly = std::vector<Fp>;  // coefficients, low degree first, trimmed

inline void poly_trim(Poly& f) {
    while (!f.empty() && f.back().is_zero()) f.pop_back();
}
inline Poly poly_mul(const Poly& f, const Poly& g, std::uint64_t p) {
    if (f.empty() || g.empty()) return {};
    OpCounter scratch;
    Poly r(f.size() + g.size() - 1, Fp::zero(p));
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            r[i + j] = r[i + j] + mul(f[i], g[j], scratch);
    poly_trim(r);
    return r;
}
inline Poly poly_rem(Poly f, const Poly& g, std::uint64_t p) {
    OpCounter scratch;
    Fp lead_inv = inv(g.back(), scratch);
    while (f.size() >= g.size()) {
        Fp q = mul(f.back(), lead_inv, scratch);
        std::size_t shift = f.size() - g.size();
        for (std::size_t k = 0; k < g.size(); ++k)
            f[shift + k] = f[shift + k] - mul(q, g[k], scratch);
        f.resize(f.size() - 1);  // leading term cancels exactly
        poly_trim(f);
    }
    return f;
}
inline Poly poly_gcd(Poly a, Poly b, std::uint64_t p) {
    poly_trim(a);
    poly_trim(b);
    while (!b.empty()) {
        Poly r = poly_rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        OpCounter scratch;
        Fp li = inv(a.back(), scratch);
        for (auto& c : a) c = mul(c, li, scratch);
    }
    return a;
}
inline Poly poly_powmod(Poly base, std::uint64_t e, const Poly& mod,
                        std::uint64_t p) {
    Poly result{Fp::one(p)};
    base = poly_rem(std::move(base), mod, p);
    while (e) {
        if (e & 1) result = poly_rem(poly_mul(result, base, p), mod, p);
        base = poly_rem(poly_mul(base, base, p), mod, p);
        e >>= 1;
    }
    return result;
}

/// Distinct roots in F_p of a polynomial of small degree (Cantor-Zassenhaus
/// equal-degree splitting on the product of linear factors).
template <typename Rng>
inline std::vector<Fp> poly_roots(Poly f, std::uint64_t p, Rng& rng) {
    poly_trim(f);
    std::vector<Fp> roots;
    if (f.size() <= 1) return roots;
    // product of distinct linear factors: gcd(f, y^p - y)
    Poly yp = poly_powmod(Poly{Fp::zero(p), Fp::one(p)}, p, f, p);
    if (yp.size() < 2) yp.resize(2, Fp::zero(p));
    yp[1] = yp[1] - Fp::one(p);
    Poly g = poly_gcd(std::move(f), std::move(yp), p);
    std::vector<Poly> stack{std::move(g)};
    std::uniform_int_distribution<std::uint64_t> dist(0, p - 1);
    while (!stack.empty()) {
        Poly h = std::move(stack.back());
        stack.pop_back();
        poly_trim(h);
        if (h.size() <= 1) continue;
        if (h.size() == 2) {
            OpCounter scratch;
            roots.push_back(-mul(h[0], inv(h[1], scratch), scratch));
            continue;
        }
        // random split by gcd((y + delta)^((p-1)/2) - 1, h)
        for (int tries = 0; tries < 64; ++tries) {
            Poly shift{Fp(dist(rng), p), Fp::one(p)};
            Poly w = poly_powmod(shift, (p - 1) / 2, h, p);
            if (w.empty())
                w = Poly{-Fp::one(p)};
            else
                w[0] = w[0] - Fp::one(p);
            poly_trim(w);
            Poly d = poly_gcd(h, w, p);
            if (d.size() > 1 && d.size() < h.size()) {
                // h / d
                Poly q;  // long division quotient
                {
                    OpCounter scratch;
                    Poly rem = h;
                    Fp li = inv(d.back(), scratch);
                    q.assign(h.size() - d.size() + 1, Fp::zero(p));
                    while (rem.size() >= d.size()) {
                        Fp qq = mul(rem.back(), li, scratch);
                        std::size_t sh = rem.size() - d.size();
                        q[sh] = qq;
                        for (std::size_t k = 0; k < d.size(); ++k)
                            rem[sh + k] = rem[sh + k] - mul(qq, d[k], scratch);
                        poly_trim(rem);
                        if (rem.size() < d.size()) break;
                    }
                    poly_trim(q);
                }
                stack.push_back(std::move(d));
                stack.push_back(std::move(q));
                break;
            }
        }
    }
    return roots;
}
}  // namespace detail

/// Affine F_p-points (x, y) on the curve with the given x-coordinate.
template <typename Rng>
inline std::vector<Fp> curve_points_above(const Curve34& curve, const Fp& x0,
                                          Rng& rng) {
    std::uint64_t p = curve.modulus();
    OpCounter scratch;
    // f(x0, y) = y^3 + A2 y^2 + A1 y + A0
    Fp xi[4] = {Fp::one(p), x0, mul(x0, x0, scratch),
                mul(mul(x0, x0, scratch), x0, scratch)};
    Fp x4 = mul(xi[3], x0, scratch);
    Fp A[3] = {-x4, Fp::zero(p), Fp::zero(p)};  // A[j] multiplies y^j
    for (int k = 0; k < Curve34::kNumCoeffs; ++k) {
        auto [i, j] = Curve34::kExponents[k];
        A[j] = A[j] + mul(curve.coeffs()[k], xi[i], scratch);
    }
    detail::Poly f{A[0], A[1], A[2], Fp::one(p)};
    return detail::poly_roots(std::move(f), p, rng);
}

/// Samples a typical degree-3 divisor by interpolating the ideal of three
/// distinct affine points; retries (bounded) until the result certifies
/// typical and the pair (F, G) cuts out exactly the sampled points.
template <typename Rng>
inline TypicalDivisor random_typical(const Curve34& curve, Rng& rng) {
    std::uint64_t p = curve.modulus();
    if (p < 64) throw SamplingExhausted{};
    std::uniform_int_distribution<std::uint64_t> dist(0, p - 1);
    for (int attempt = 0; attempt < 64; ++attempt) {
        // three distinct points
        std::vector<std::pair<Fp, Fp>> pts;
        for (int guard = 0; guard < 256 && pts.size() < 3; ++guard) {
            Fp x0(dist(rng), p);
            auto ys = curve_points_above(curve, x0, rng);
            if (ys.empty()) continue;
            Fp y0 = ys[std::uniform_int_distribution<std::size_t>(
                0, ys.size() - 1)(rng)];
            bool dup = false;
            for (auto& q : pts)
                if (q.first == x0 && q.second == y0) dup = true;
            if (!dup) pts.push_back({x0, y0});
        }
        if (pts.size() < 3) continue;

        // Solve [y_i, x_i, 1] * (a,b,c)^T = -x_i^2 and = -x_i y_i for (d,e,f).
        OpCounter scratch;
        Matrix m(3, 5, p);
        for (int r = 0; r < 3; ++r) {
            auto [xv, yv] = pts[r];
            m.at(r, 0) = yv;
            m.at(r, 1) = xv;
            m.at(r, 2) = Fp::one(p);
            m.at(r, 3) = -mul(xv, xv, scratch);
            m.at(r, 4) = -mul(xv, yv, scratch);
        }
        // Gaussian solve for both right-hand sides at once.
        bool singular = false;
        for (int cpos = 0; cpos < 3 && !singular; ++cpos) {
            int pr = -1;
            for (int r = cpos; r < 3; ++r)
                if (!m.at(r, cpos).is_zero()) { pr = r; break; }
            if (pr < 0) { singular = true; break; }
            if (pr != cpos)
                for (int k = 0; k < 5; ++k) std::swap(m.at(pr, k), m.at(cpos, k));
            Fp pi = inv(m.at(cpos, cpos), scratch);
            for (int k = 0; k < 5; ++k) m.at(cpos, k) = mul(m.at(cpos, k), pi, scratch);
            for (int r = 0; r < 3; ++r) {
                if (r == cpos) continue;
                Fp fct = m.at(r, cpos);
                if (fct.is_zero()) continue;
                for (int k = 0; k < 5; ++k)
                    m.at(r, k) = m.at(r, k) - mul(fct, m.at(cpos, k), scratch);
            }
        }
        if (singular) continue;
        Fp a = m.at(0, 3), b = m.at(1, 3), c = m.at(2, 3);
        Fp d = m.at(0, 4), e = m.at(1, 4), f = m.at(2, 4);
        if (a.is_zero()) continue;
        TypicalDivisor D(a, b, c, d, e, f, scratch);
        // IGS check: the W^12 window cut out by (F, G) must have codim 3.
        EchelonSubspace w = wnd_basis(curve, D, 12, scratch);
        if (w.pivot_degrees() != std::vector<int>{6, 7, 8, 9, 10, 11, 12})
            continue;
        return D;
    }
    throw SamplingExhausted{};
}

/// Divisor text format:
///   `div a=<dec> b=<dec> c=<dec> d=<dec> e=<dec> f=<dec>`
///   optionally `+ d1=<dec> e1=<dec> f1=<dec>` for triples; `zero` for the
///   identity class.
inline std::string serialize_divisor(const JacobianElement& x) {
    if (x.is_zero()) return "zero";
    const TypicalDivisor& d = x.divisor();
    std::ostringstream os;
    os << "div a=" << d.a().value() << " b=" << d.b().value()
       << " c=" << d.c().value() << " d=" << d.d().value()
       << " e=" << d.e().value() << " f=" << d.f().value();
    if (x.has_triple()) {
        DivisorTriple t = x.triple();
        os << " d1=" << t.d1.value() << " e1=" << t.e1.value()
           << " f1=" << t.f1.value();
    }
    return os.str();
}

inline JacobianElement parse_divisor(const std::string& text, std::uint64_t p) {
    std::istringstream is(text);
    std::string word;
    if (!(is >> word)) throw ParseError("empty divisor", 0);
    if (word == "zero") return JacobianElement::zero();
    if (word != "div") throw ParseError("expected 'div' or 'zero'", 0);
    const char* names[9] = {"a", "b", "c", "d", "e", "f", "d1", "e1", "f1"};
    std::vector<Fp> vals;
    for (int k = 0; k < 9; ++k) {
        std::string tok;
        std::size_t pos = static_cast<std::size_t>(is.tellg());
        if (!(is >> tok)) {
            if (k == 6) break;  // plain divisor, no triple part
            throw ParseError("expected field '" + std::string(names[k]) + "='",
                             pos);
        }
        std::string prefix = std::string(names[k]) + "=";
        if (tok.rfind(prefix, 0) != 0)
            throw ParseError("expected field '" + std::string(names[k]) + "='",
                             pos);
        try {
            vals.push_back(Fp(std::stoull(tok.substr(prefix.size())), p));
        } catch (const std::exception&) {
            throw ParseError("bad residue for '" + std::string(names[k]) + "'",
                             pos);
        }
    }
    if (vals[0].is_zero())
        throw ParseError("a = 0 violates the typicality invariant", 4);
    OpCounter scratch;
    TypicalDivisor base(vals[0], vals[1], vals[2], vals[3], vals[4], vals[5],
                        scratch);
    if (vals.size() == 9)
        return JacobianElement::typical(
            DivisorTriple{base, vals[6], vals[7], vals[8]});
    return JacobianElement::typical(base);
}

}  // namespace c34
