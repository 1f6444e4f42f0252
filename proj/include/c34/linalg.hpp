#pragma once

#include <algorithm>
#include <vector>

#include "c34/ring.hpp"

namespace c34 {

/// Dense matrix over F_p.  Everything here is desk scale (<= ~25 x 25).
class Matrix {
  public:
    Matrix(int rows, int cols, std::uint64_t p)
        : rows_(rows), cols_(cols), p_(p),
          a_(static_cast<std::size_t>(rows) * cols, Fp::zero(p)) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::uint64_t modulus() const { return p_; }

    Fp& at(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    const Fp& at(int r, int c) const {
        return a_[static_cast<std::size_t>(r) * cols_ + c];
    }

  private:
    int rows_, cols_;
    std::uint64_t p_;
    std::vector<Fp> a_;
};

/// Column-echelon basis of a subspace of W^N: monic columns in strictly
/// increasing leading degree, fully reduced (each column has coefficient 0
/// at every other column's pivot degree).  This normal form is canonical,
/// so subspace equality is structural equality.
class EchelonSubspace {
  public:
    EchelonSubspace(int ambient, std::uint64_t p) : n_(ambient), p_(p) {}

    int ambient() const { return n_; }
    std::uint64_t modulus() const { return p_; }
    int dim() const { return static_cast<int>(cols_.size()); }
    const std::vector<RingElement>& columns() const { return cols_; }
    const RingElement& column(int k) const { return cols_[k]; }

    std::vector<int> pivot_degrees() const {
        std::vector<int> d;
        d.reserve(cols_.size());
        for (const auto& c : cols_) d.push_back(c.degree());
        return d;
    }

    bool operator==(const EchelonSubspace&) const = default;

    /// Inserts v into the basis, maintaining the reduced echelon normal
    /// form.  Dependent vectors are absorbed.  The monic normalization's
    /// inversion is billed to ctx; columns that arrive monic (the common
    /// case for the generator sequences F, G, H, xF, ...) cost nothing.
    void insert(RingElement v, OpCounter& ctx) {
        v = reduce(v);
        if (v.is_zero()) return;
        if (v.degree() > n_)
            throw std::invalid_argument("element outside the ambient space");
        if (!(v.leading_coeff() == Fp::one(p_))) {
            Fp lead_inv = inv(v.leading_coeff(), ctx);
            v = scale(v, lead_inv, ctx);
        }
        int pivot = v.degree();
        for (auto& c : cols_) {
            Fp coef = c.coeff(pivot);
            if (!coef.is_zero()) c -= scale(v, coef, ctx);
        }
        auto it = std::lower_bound(
            cols_.begin(), cols_.end(), pivot,
            [](const RingElement& c, int d) { return c.degree() < d; });
        cols_.insert(it, std::move(v));
    }

    /// Canonical representative of v + span(S), supported on non-pivot
    /// degrees.  Zero iff v is in the span.  Linear and idempotent; free of
    /// counted operations beyond the coefficient multiplications.
    RingElement reduce(RingElement v) const {
        OpCounter scratch;  // reductions use no inversions
        for (const auto& c : cols_) {
            Fp coef = v.coeff(c.degree());
            if (!coef.is_zero()) v -= scale(c, coef, scratch);
        }
        return v;
    }

  private:
    int n_;
    std::uint64_t p_;
    std::vector<RingElement> cols_;
};

/// Echelon basis of the span of the given columns inside W^N.
inline EchelonSubspace column_echelon(const std::vector<RingElement>& cols,
                                      int ambient, std::uint64_t p,
                                      OpCounter& ctx) {
    EchelonSubspace s(ambient, p);
    for (const auto& c : cols) s.insert(c, ctx);
    return s;
}

inline RingElement reduce_against(const RingElement& v,
                                  const EchelonSubspace& s) {
    return s.reduce(v);
}

/// Result of a gated kernel computation.  `fail` is a value, not an error:
/// it reports that the leading gate x gate block was singular, i.e. that
/// the certification hypothesis does not hold.
struct KernelResult {
    bool success = false;
    /// Echelon kernel basis; each vector has its final nonzero entry 1.
    std::vector<std::vector<Fp>> kernel;
};

/// Simultaneous inversion of nonzero values: 1I + 3(n-1)M total, instead of
/// one inversion each.
inline std::vector<Fp> batch_invert(const std::vector<Fp>& v, OpCounter& ctx) {
    std::vector<Fp> out(v.size());
    if (v.empty()) return out;
    std::vector<Fp> prefix(v.size());
    prefix[0] = v[0];
    for (std::size_t i = 1; i < v.size(); ++i)
        prefix[i] = mul(prefix[i - 1], v[i], ctx);
    Fp t = inv(prefix.back(), ctx);
    for (std::size_t i = v.size(); i-- > 1;) {
        out[i] = mul(t, prefix[i - 1], ctx);
        t = mul(t, v[i], ctx);
    }
    out[0] = t;
    return out;
}

/// Kernel of M with a certification gate: fail iff the leftmost
/// gate x gate submatrix is singular.  On success the kernel basis vectors
/// have shape (*, ..., *, 1, 0, ..., 0)^T.
///
/// Pivots for the first `gate` columns are restricted to the top `gate`
/// rows, which decides invertibility of the leading gate x gate block
/// exactly (all callers either have rows == gate, or a block-triangular
/// shape with zeros below that block).  Forward elimination is
/// division-free and the pivots are inverted in one batch, so the whole
/// computation costs exactly 1I (0I if the matrix has no pivots at all).
inline KernelResult kernel_with_gate(const Matrix& m, int gate,
                                     OpCounter& ctx) {
    if (gate > std::min(m.rows(), m.cols()))
        throw std::invalid_argument("gate exceeds matrix dimensions");
    KernelResult res;
    Matrix a = m;
    std::uint64_t p = m.modulus();
    std::vector<int> pivot_col_of_row;

    // Division-free forward elimination (row_i <- piv*row_i - f*row_r).
    int r = 0;
    for (int c = 0; c < a.cols() && r < a.rows(); ++c) {
        int limit = (c < gate) ? gate : a.rows();
        int pr = -1;
        for (int rr = r; rr < limit; ++rr)
            if (!a.at(rr, c).is_zero()) { pr = rr; break; }
        if (pr < 0) {
            if (c < gate) return res;  // gate block singular: fail
            continue;                  // free column
        }
        if (pr != r)
            for (int k = 0; k < a.cols(); ++k) std::swap(a.at(pr, k), a.at(r, k));
        Fp piv = a.at(r, c);
        for (int rr = r + 1; rr < a.rows(); ++rr) {
            Fp f = a.at(rr, c);
            if (f.is_zero()) continue;
            for (int k = c; k < a.cols(); ++k)
                a.at(rr, k) =
                    mul(piv, a.at(rr, k), ctx) - mul(f, a.at(r, k), ctx);
        }
        pivot_col_of_row.push_back(c);
        ++r;
    }
    res.success = true;

    // One batched inversion of the pivot entries, then back-substitution
    // to reduced row-echelon form.
    int npiv = static_cast<int>(pivot_col_of_row.size());
    std::vector<Fp> diag(npiv);
    for (int i = 0; i < npiv; ++i) diag[i] = a.at(i, pivot_col_of_row[i]);
    std::vector<Fp> dinv = batch_invert(diag, ctx);
    for (int i = npiv - 1; i >= 0; --i) {
        int pc = pivot_col_of_row[i];
        for (int k = pc; k < a.cols(); ++k)
            a.at(i, k) = mul(a.at(i, k), dinv[i], ctx);
        for (int j = 0; j < i; ++j) {
            Fp f = a.at(j, pc);
            if (f.is_zero()) continue;
            for (int k = pc; k < a.cols(); ++k)
                a.at(j, k) = a.at(j, k) - mul(f, a.at(i, k), ctx);
        }
    }

    std::vector<bool> is_pivot(a.cols(), false);
    for (int pc : pivot_col_of_row) is_pivot[pc] = true;
    for (int c = 0; c < a.cols(); ++c) {
        if (is_pivot[c]) continue;
        std::vector<Fp> v(a.cols(), Fp::zero(p));
        v[c] = Fp::one(p);
        for (std::size_t row = 0; row < pivot_col_of_row.size(); ++row)
            v[pivot_col_of_row[row]] = -a.at(static_cast<int>(row), c);
        res.kernel.push_back(std::move(v));
    }
    return res;
}

/// Expresses targets in the span of a fixed generator list, returning the
/// combination coefficients alongside the residual.
class SpanSolver {
  public:
    SpanSolver(const std::vector<RingElement>& gens, std::uint64_t p,
               OpCounter& ctx)
        : p_(p), ngens_(gens.size()) {
        for (std::size_t g = 0; g < gens.size(); ++g) {
            std::vector<Fp> coeffs(ngens_, Fp::zero(p_));
            coeffs[g] = Fp::one(p_);
            insert(gens[g], std::move(coeffs), ctx);
        }
    }

    struct Reduction {
        RingElement residual;
        std::vector<Fp> coeffs;  // target = sum coeffs[g] * gens[g] + residual
    };

    Reduction reduce(RingElement v, OpCounter& ctx) const {
        std::vector<Fp> acc(ngens_, Fp::zero(p_));
        // columns are in increasing pivot degree; eliminate from the top
        for (auto it = cols_.rbegin(); it != cols_.rend(); ++it) {
            Fp coef = v.coeff(it->elem.degree());
            if (coef.is_zero()) continue;
            v -= scale(it->elem, coef, ctx);
            for (std::size_t g = 0; g < ngens_; ++g)
                acc[g] = acc[g] + mul(coef, it->coeffs[g], ctx);
        }
        return {std::move(v), std::move(acc)};
    }

  private:
    struct Col {
        RingElement elem;
        std::vector<Fp> coeffs;
        Col(RingElement e, std::vector<Fp> c)
            : elem(std::move(e)), coeffs(std::move(c)) {}
    };

    void insert(RingElement v, std::vector<Fp> coeffs, OpCounter& ctx) {
        for (auto it = cols_.rbegin(); it != cols_.rend(); ++it) {
            Fp coef = v.coeff(it->elem.degree());
            if (coef.is_zero()) continue;
            v -= scale(it->elem, coef, ctx);
            for (std::size_t g = 0; g < ngens_; ++g)
                coeffs[g] = coeffs[g] - mul(coef, it->coeffs[g], ctx);
        }
        if (v.is_zero()) return;
        if (!(v.leading_coeff() == Fp::one(p_))) {
            Fp lead_inv = inv(v.leading_coeff(), ctx);
            v = scale(v, lead_inv, ctx);
            for (auto& c : coeffs) c = mul(c, lead_inv, ctx);
        }
        int pivot = v.degree();
        auto it = std::lower_bound(
            cols_.begin(), cols_.end(), pivot,
            [](const Col& c, int d) { return c.elem.degree() < d; });
        cols_.insert(it, Col(std::move(v), std::move(coeffs)));
    }

    std::uint64_t p_;
    std::size_t ngens_;
    std::vector<Col> cols_;
};

}  // namespace c34
