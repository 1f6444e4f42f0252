#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace c34 {

/// Tally of counted field operations.  Multiplications and inversions are
/// billed explicitly; additions, subtractions and scaling by the literals
/// 2, 3 and 1/2 are free.  A counter is confined to one logical thread of
/// control; independent computations use independent counters.
struct OpCounter {
    std::uint64_t mul = 0;
    std::uint64_t inv = 0;

    OpCounter operator-(const OpCounter& rhs) const {
        return OpCounter{mul - rhs.mul, inv - rhs.inv};
    }
    bool operator==(const OpCounter& rhs) const = default;
};

struct ZeroInversion : std::runtime_error {
    ZeroInversion() : std::runtime_error("inversion of zero field element") {}
};

struct ModulusMismatch : std::invalid_argument {
    ModulusMismatch() : std::invalid_argument("operands have different moduli") {}
};

/// Residue mod p, p a word-size prime > 3.  Immutable plain data.
class Fp {
  public:
    Fp() : v_(0), p_(0) {}
    Fp(std::uint64_t value, std::uint64_t p) : v_(value % p), p_(p) {}

    static Fp zero(std::uint64_t p) { return Fp(0, p); }
    static Fp one(std::uint64_t p) { return Fp(1, p); }
    /// Builds a residue from a signed integer (negatives wrap mod p).
    static Fp from_int(std::int64_t value, std::uint64_t p) {
        std::int64_t r = value % static_cast<std::int64_t>(p);
        if (r < 0) r += static_cast<std::int64_t>(p);
        return Fp(static_cast<std::uint64_t>(r), p);
    }

    std::uint64_t value() const { return v_; }
    std::uint64_t modulus() const { return p_; }
    bool is_zero() const { return v_ == 0; }

    bool operator==(const Fp& rhs) const = default;

  private:
    friend Fp operator+(const Fp&, const Fp&);
    friend Fp operator-(const Fp&, const Fp&);
    friend Fp operator-(const Fp&);
    friend Fp mul(const Fp&, const Fp&, OpCounter&);
    friend Fp inv(const Fp&, OpCounter&);

    std::uint64_t v_;
    std::uint64_t p_;
};

namespace detail {
inline void check_same(const Fp& a, const Fp& b) {
    if (a.modulus() != b.modulus()) throw ModulusMismatch{};
}
inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % p);
}
inline std::uint64_t invmod(std::uint64_t a, std::uint64_t p) {
    // extended Euclid
    std::int64_t t = 0, nt = 1;
    std::int64_t r = static_cast<std::int64_t>(p),
                 nr = static_cast<std::int64_t>(a);
    while (nr != 0) {
        std::int64_t q = r / nr;
        std::int64_t tmp = t - q * nt;
        t = nt; nt = tmp;
        tmp = r - q * nr;
        r = nr; nr = tmp;
    }
    if (t < 0) t += static_cast<std::int64_t>(p);
    return static_cast<std::uint64_t>(t);
}
}  // namespace detail

// Uncounted operations.
inline Fp operator+(const Fp& a, const Fp& b) {
    detail::check_same(a, b);
    std::uint64_t s = a.v_ + b.v_;
    if (s >= a.p_) s -= a.p_;
    return Fp(s, a.p_);
}
inline Fp operator-(const Fp& a) {
    return Fp(a.v_ == 0 ? 0 : a.p_ - a.v_, a.p_);
}
inline Fp operator-(const Fp& a, const Fp& b) { return a + (-b); }

/// Counted multiplication: bills exactly 1M regardless of operand values.
inline Fp mul(const Fp& a, const Fp& b, OpCounter& ctx) {
    detail::check_same(a, b);
    ++ctx.mul;
    return Fp(detail::mulmod(a.v_, b.v_, a.p_), a.p_);
}

/// Counted inversion: bills exactly 1I.  Throws on zero; a zero here means
/// a certification gate failed upstream.
inline Fp inv(const Fp& a, OpCounter& ctx) {
    if (a.is_zero()) throw ZeroInversion{};
    ++ctx.inv;
    return Fp(detail::invmod(a.v_, a.p_), a.p_);
}

enum class SmallScalar { two, three, half };

/// Free scaling by 2, 3 or 1/2 (char != 2, 3, so all are invertible and
/// uncounted in the cost model).
inline Fp scale_small(const Fp& a, SmallScalar k) {
    std::uint64_t p = a.modulus();
    switch (k) {
        case SmallScalar::two: {
            Fp r = a + a;
            return r;
        }
        case SmallScalar::three:
            return a + a + a;
        case SmallScalar::half: {
            std::uint64_t h = (p + 1) / 2;  // inverse of 2 mod odd p
            return Fp(detail::mulmod(a.value(), h, p), p);
        }
    }
    throw std::invalid_argument("bad small scalar");
}

}  // namespace c34
