#pragma once

#include "qtriple/rational.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace qtriple {

struct SeriesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Mixing series built on different truncation contracts.
struct ContextMismatchError : SeriesError {
    using SeriesError::SeriesError;
};
// Query or comparison outside the region where coefficients are guaranteed.
struct OutOfContractError : SeriesError {
    using SeriesError::SeriesError;
};
struct NonInvertibleError : SeriesError {
    using SeriesError::SeriesError;
};

/// A single term c * z^{z_exp} * q^{q_exp} with exact rational c.
struct Monomial {
    Rational coeff;
    int z_exp = 0;
    int q_exp = 0;
};

inline Monomial mono(Rational c, int z_exp = 0, int q_exp = 0) {
    return Monomial{std::move(c), z_exp, q_exp};
}
inline Monomial mono(long c, int z_exp = 0, int q_exp = 0) {
    return Monomial{Rational(c), z_exp, q_exp};
}

/// Truncation contract: coefficients are tracked for q-exponents up to
/// q_order (the series is taken modulo q^{q_order+1}) and for z-exponents
/// inside [z_min, z_max]. q-exponents may be negative; there is no lower
/// q bound.
struct SeriesContext {
    int q_order;
    int z_min;
    int z_max;

    SeriesContext(int q_order_, int z_min_, int z_max_)
        : q_order(q_order_), z_min(z_min_), z_max(z_max_) {
        if (q_order < 0 || z_min > 0 || z_max < 0)
            throw SeriesError("invalid series context: need q_order >= 0 and z_min <= 0 <= z_max");
    }

    bool operator==(const SeriesContext&) const = default;

    bool in_window(int z_exp) const { return z_exp >= z_min && z_exp <= z_max; }
    bool in_region(int z_exp, int q_exp) const { return in_window(z_exp) && q_exp <= q_order; }

    /// Same window/order enlarged; used by constructors that need working room.
    SeriesContext widened(int extra_order, int extend_lo, int extend_hi) const {
        return SeriesContext(q_order + extra_order, z_min - extend_lo, z_max + extend_hi);
    }
};

/// Term keys ordered by q-exponent first, then z-exponent. This graded
/// order is the one every comparator and report uses.
struct TermKey {
    int q_exp;
    int z_exp;
    auto operator<=>(const TermKey&) const = default;
};

using TermMap = std::map<TermKey, Rational>;

struct Discrepancy {
    int z_exp;
    int q_exp;
    Rational lhs_coeff;
    Rational rhs_coeff;
};

struct EqualityVerdict {
    bool equal = false;
    std::optional<Discrepancy> first_discrepancy;
};

/// Sparse exact bivariate Laurent series in z and q, valid modulo
/// q^{q_order+1} inside the z-window. Immutable after construction.
///
/// z_truncated distinguishes "coefficients outside the window are known to
/// be zero" (false) from "they were discarded as unknown" (true); it
/// propagates through every operation via OR.
class ZQSeries {
public:
    static ZQSeries zero(const SeriesContext& ctx) { return ZQSeries(ctx); }
    static ZQSeries unit(const SeriesContext& ctx);

    /// Builds a series from raw terms, dropping out-of-region terms.
    /// Out-of-window drops mark the result z_truncated.
    static ZQSeries from_terms(const SeriesContext& ctx, const TermMap& raw,
                               bool z_truncated = false);

    const SeriesContext& context() const { return ctx_; }
    const TermMap& terms() const { return terms_; }
    bool z_truncated() const { return z_truncated_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    /// Term-level equality (context and coefficients). The z_truncated flag
    /// is informational and not part of value identity.
    bool operator==(const ZQSeries& other) const {
        return ctx_ == other.ctx_ && terms_ == other.terms_;
    }

private:
    explicit ZQSeries(const SeriesContext& ctx) : ctx_(ctx) {}

    SeriesContext ctx_;
    TermMap terms_;
    bool z_truncated_ = false;

    friend ZQSeries make_monomial(const Monomial&, const SeriesContext&);
    friend ZQSeries add(const ZQSeries&, const ZQSeries&);
    friend ZQSeries mul(const ZQSeries&, const ZQSeries&);
    friend ZQSeries mul_monomial(const ZQSeries&, const Monomial&);
    friend ZQSeries negate(const ZQSeries&);
    friend ZQSeries invert(const ZQSeries&);
    friend ZQSeries restrict_to(const ZQSeries&, const SeriesContext&);
    friend ZQSeries with_z_truncated(ZQSeries, bool);
};

/// Embeds one monomial; out-of-window terms yield the zero series with
/// z_truncated set, out-of-order terms yield the plain zero series.
ZQSeries make_monomial(const Monomial& m, const SeriesContext& ctx);

/// Termwise sum. Requires identical contexts.
ZQSeries add(const ZQSeries& a, const ZQSeries& b);

ZQSeries negate(const ZQSeries& a);
ZQSeries sub(const ZQSeries& a, const ZQSeries& b);

/// Convolution truncated to the context. The result keeps every term with
/// q_exp <= q_order; it is guaranteed correct only modulo
/// q^{q_order - max(0,-min_q(a)) - max(0,-min_q(b)) + 1} — callers that need
/// full target order compensate by building at a higher working order.
ZQSeries mul(const ZQSeries& a, const ZQSeries& b);

/// Multiplication by a single monomial (shift + scale).
ZQSeries mul_monomial(const ZQSeries& a, const Monomial& m);

/// Multiplicative inverse within the validity region. Requires a nonzero
/// leading monomial at the graded-minimal corner; the Neumann tail
/// terminates because every remaining term eventually leaves the region.
/// Marks the result z_truncated when the inverse has unbounded z-support.
ZQSeries invert(const ZQSeries& a);

/// Stored coefficient (or exact zero) at a point inside the validity region.
Rational coeff(const ZQSeries& a, int z_exp, int q_exp);

/// Graded comparison through q_order. Requires identical windows and
/// q_order within both validity contracts.
EqualityVerdict equal_up_to(const ZQSeries& a, const ZQSeries& b, int q_order);

/// Least stored q-exponent; 0 for the zero series.
int min_q_order(const ZQSeries& a);

/// Restriction to a sub-context (window subset, order <=). Dropped nonzero
/// z-terms mark the result z_truncated.
ZQSeries restrict_to(const ZQSeries& a, const SeriesContext& ctx);

/// Returns a copy with the flag forced; constructors use this to record
/// knowledge about the untruncated object (e.g. theta's support is all of Z).
ZQSeries with_z_truncated(ZQSeries a, bool flag);

/// Graded text rendering, one line per q-exponent ("q^2: z^-1 + 3/2*z").
std::string to_string(const ZQSeries& a);

} // namespace qtriple
