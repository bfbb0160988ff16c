#include "qtriple/qfunctions.hpp"

#include <limits>
#include <stdexcept>

namespace qtriple {

int largest_n_tri_up(int bound) {
    int n = 0;
    while (tri(n + 1) <= bound) ++n;
    return n;
}

int largest_n_tri_down(int bound) {
    int n = 0;
    while (static_cast<long>(n + 1) * (n + 2) / 2 <= bound) ++n;
    return n;
}

namespace {

void require_nonneg_m(int m) {
    if (m < 0) throw SeriesError("m must be nonnegative");
}

// How many factors of the product can pick up a z-shift of e before leaving
// the window.
int pick_cap(int z_exp, const SeriesContext& ctx) {
    if (z_exp > 0) return ctx.z_max / z_exp;
    if (z_exp < 0) return ctx.z_min / z_exp; // both negative: nonneg quotient
    return std::numeric_limits<int>::max();
}

// Upper bound on how far partial products of prod (1 - base*q^{e_i}) can dip
// below 0 in q-order: the sum of the most negative exponents reachable
// within the window.
int negative_backfill(int base_z_exp, int most_negative, int negative_count,
                      const SeriesContext& ctx) {
    if (negative_count <= 0 || most_negative >= 0) return 0;
    long cap = pick_cap(base_z_exp, ctx);
    long b = 0;
    for (long t = 0; t < cap && t < negative_count; ++t) {
        long v = -most_negative - t;
        if (v <= 0) break;
        b += v;
    }
    return static_cast<int>(b);
}

// p * (1 - c z^e q^x) as a two-term update.
ZQSeries mul_factor(const ZQSeries& p, const Rational& c, int e, int x) {
    return sub(p, mul_monomial(p, mono(c, e, x)));
}

// 1/(1 - g) for a monomial g. Direct geometric sum when the Neumann tail is
// safe (positive q-grading, or pure z-shift); otherwise the generic inverse.
ZQSeries inverse_one_minus(const Monomial& g, const SeriesContext& ctx) {
    if (g.coeff == 0) return ZQSeries::unit(ctx);
    if (g.q_exp == 0 && g.z_exp == 0) {
        if (g.coeff == 1) throw NonInvertibleError("pole: 1/(1 - 1)");
        return make_monomial(mono(Rational(1) / (Rational(1) - g.coeff)), ctx);
    }
    if (g.q_exp > 0 || (g.q_exp == 0 && g.z_exp != 0)) {
        TermMap terms;
        Rational c(1);
        long t = 0;
        while (true) {
            const long q = t * g.q_exp;
            const long z = t * g.z_exp;
            if (q > ctx.q_order) break;
            if (z < ctx.z_min || z > ctx.z_max) break;
            terms[TermKey{static_cast<int>(q), static_cast<int>(z)}] = c;
            c *= g.coeff;
            ++t;
        }
        return ZQSeries::from_terms(ctx, terms, g.z_exp != 0);
    }
    return invert(sub(ZQSeries::unit(ctx), make_monomial(g, ctx)));
}

} // namespace

ZQSeries pochhammer_inf(const Monomial& a, const SeriesContext& ctx) {
    if (a.coeff == 0) return ZQSeries::unit(ctx);

    const int neg_count = a.q_exp < 0 ? -a.q_exp : 0;
    const int backfill = negative_backfill(a.z_exp, a.q_exp, neg_count, ctx);
    const SeriesContext work = ctx.widened(backfill, 0, 0);

    ZQSeries p = ZQSeries::unit(work);
    for (int n = 0;; ++n) {
        if (p.is_zero()) break;
        if (min_q_order(p) + a.q_exp + n > work.q_order) break; // factor cannot reach the region
        p = mul_factor(p, a.coeff, a.z_exp, a.q_exp + n);
    }
    ZQSeries out = restrict_to(p, ctx);
    if (a.z_exp != 0 && !out.is_zero())
        out = with_z_truncated(std::move(out), true); // true support is z-unbounded
    return out;
}

ZQSeries pochhammer_finite(const Monomial& a, int index, const SeriesContext& ctx) {
    if (index == 0) return ZQSeries::unit(ctx);
    if (a.coeff == 0) return ZQSeries::unit(ctx);

    if (index > 0) {
        // Negative exponents appear for a.q_exp < 0; count them among i = 0..index-1.
        const int neg_count = a.q_exp < 0 ? std::min(index, -a.q_exp) : 0;
        const int backfill = negative_backfill(a.z_exp, a.q_exp, neg_count, ctx);
        const SeriesContext work = ctx.widened(backfill, 0, 0);
        ZQSeries p = ZQSeries::unit(work);
        for (int i = 0; i < index && !p.is_zero(); ++i)
            p = mul_factor(p, a.coeff, a.z_exp, a.q_exp + i);
        return restrict_to(p, ctx);
    }

    // index < 0: invert prod_{i=1}^{-index} (1 - a q^{-i}).
    const int count = -index;
    for (int i = 1; i <= count; ++i) {
        if (a.coeff == 1 && a.z_exp == 0 && a.q_exp == i)
            throw PoleError("pochhammer_finite: factor 1 - a*q^-" + std::to_string(i) +
                            " vanishes exactly");
    }
    // Factor exponents a.q_exp - i, i = 1..count; the most negative is
    // a.q_exp - count.
    int neg_count = 0;
    for (int i = 1; i <= count; ++i)
        if (a.q_exp - i < 0) ++neg_count;
    const int backfill = negative_backfill(a.z_exp, a.q_exp - count, neg_count, ctx);
    const SeriesContext work = ctx.widened(backfill, 0, 0);
    ZQSeries p = ZQSeries::unit(work);
    for (int i = 1; i <= count && !p.is_zero(); ++i)
        p = mul_factor(p, a.coeff, a.z_exp, a.q_exp - i);
    if (p.is_zero())
        throw PoleError("pochhammer_finite: zero denominator in negative-index symbol");
    return restrict_to(invert(p), ctx);
}

ZQSeries pochhammer(const PochhammerSpec& spec, const SeriesContext& ctx) {
    return spec.index ? pochhammer_finite(spec.base, *spec.index, ctx)
                      : pochhammer_inf(spec.base, ctx);
}

namespace {

// sum_{n>=0} q^{n(n-1)/2} z^n / (base;q)_n with incremental denominator
// inverses 1/(base;q)_n = 1/(base;q)_{n-1} * 1/(1 - base q^{n-1}).
// base is a pure q-monomial q^{k}, k >= 1.
ZQSeries qexp_like_sum(int base_q_exp, const SeriesContext& ctx) {
    ZQSeries acc = ZQSeries::zero(ctx);
    ZQSeries inv = ZQSeries::unit(ctx);
    const int n_max = std::min(ctx.z_max, largest_n_tri_up(ctx.q_order));
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0)
            inv = mul(inv, inverse_one_minus(mono(1, 0, base_q_exp + n - 1), ctx));
        acc = add(acc, mul_monomial(inv, mono(1, n, static_cast<int>(tri(n)))));
    }
    return with_z_truncated(std::move(acc), true);
}

} // namespace

ZQSeries euler_qexp_series(const SeriesContext& ctx) {
    return qexp_like_sum(1, ctx);
}

ZQSeries euler_inverse_series(const SeriesContext& ctx) {
    ZQSeries acc = ZQSeries::zero(ctx);
    ZQSeries inv = ZQSeries::unit(ctx);
    for (int n = 0; n <= ctx.z_max; ++n) {
        if (n > 0) inv = mul(inv, inverse_one_minus(mono(1, 0, n), ctx));
        acc = add(acc, mul_monomial(inv, mono(n % 2 == 0 ? 1 : -1, n, 0)));
    }
    return with_z_truncated(std::move(acc), true);
}

ZQSeries theta_bilateral(const SeriesContext& ctx) {
    TermMap terms;
    for (int n = ctx.z_min; n <= ctx.z_max; ++n) {
        const long q = tri(n);
        if (q <= ctx.q_order)
            terms[TermKey{static_cast<int>(q), n}] = Rational(1);
    }
    return with_z_truncated(ZQSeries::from_terms(ctx, terms), true);
}

ZQSeries triple_product_lhs(const SeriesContext& ctx) {
    // Cross terms pair z^j against z^{-k} with q-orders >= j(j-1)/2 and
    // k(k+1)/2, so only exponents within the theta support caps matter.
    const int ext = std::max(largest_n_tri_up(ctx.q_order), largest_n_tri_down(ctx.q_order));
    const SeriesContext work = ctx.widened(0, ext, ext);
    ZQSeries p = pochhammer_inf(mono(1, 0, 1), work);        // (q;q)_inf
    p = mul(p, pochhammer_inf(mono(-1, -1, 1), work));       // (-q/z;q)_inf
    p = mul(p, pochhammer_inf(mono(-1, 1, 0), work));        // (-z;q)_inf
    return restrict_to(p, ctx);
}

ZQSeries semifinite_sum(int m, const SeriesContext& ctx) {
    require_nonneg_m(m);
    ZQSeries acc = qexp_like_sum(m + 1, ctx);

    // n = -k side via the reciprocal rule: term = q^{k(k+1)/2} z^{-k} (q^{m+1-k};q)_k.
    ZQSeries pk = ZQSeries::unit(ctx);
    const int k_max = std::min(m, -ctx.z_min);
    for (int k = 1; k <= k_max; ++k) {
        pk = mul_factor(pk, Rational(1), 0, m + 1 - k);
        const long q = static_cast<long>(k) * (k + 1) / 2;
        if (q > ctx.q_order) break;
        acc = add(acc, mul_monomial(pk, mono(1, -k, static_cast<int>(q))));
    }
    return with_z_truncated(std::move(acc), true);
}

ZQSeries semifinite_split(int m, const SeriesContext& ctx) {
    require_nonneg_m(m);
    ZQSeries acc = qexp_like_sum(m + 1, ctx);

    // Second sum, built per term from the general constructor. Terms with
    // n > m must come out identically zero (factor 1 - q^0).
    for (int n = 1; n <= -ctx.z_min; ++n) {
        ZQSeries p = pochhammer_finite(mono(1, 0, m + 1 - n), n, ctx);
        if (n > m) {
            if (!p.is_zero())
                throw SeriesError("vanishing lemma violated: (q^{m+1-n};q)_n != 0 for n > m");
            continue;
        }
        const long q = static_cast<long>(n) * (n + 1) / 2;
        if (q > ctx.q_order) continue;
        acc = add(acc, mul_monomial(p, mono(1, -n, static_cast<int>(q))));
    }
    return with_z_truncated(std::move(acc), true);
}

ZQSeries finite_m_product(int m, const SeriesContext& ctx) {
    require_nonneg_m(m);
    const int lo = std::max(0, m + ctx.z_min);  // window must reach z^{-m}
    const SeriesContext work = ctx.widened(0, lo, m);
    ZQSeries p = pochhammer_finite(mono(1, 0, 1), m, work);   // (q;q)_m
    p = mul(p, pochhammer_finite(mono(-1, -1, 1), m, work));  // (-q/z;q)_m
    p = mul(p, pochhammer_inf(mono(-1, 1, 0), work));         // (-z;q)_inf
    return restrict_to(p, ctx);
}

namespace {

ZQSeries chain_s1(int m, const SeriesContext& ctx) {
    ZQSeries acc = ZQSeries::zero(ctx);
    const int n_hi = m + std::min(ctx.z_max, largest_n_tri_up(ctx.q_order));
    for (int n = 0; n <= n_hi; ++n) {
        const int j = n - m;
        if (j < ctx.z_min) continue;
        const long q = tri(j);
        if (q > ctx.q_order) continue;
        // 1/(q^{m+1};q)_j through the any-integer definition, inverted.
        ZQSeries denom = pochhammer_finite(mono(1, 0, m + 1), j, ctx);
        acc = add(acc, mul_monomial(invert(denom), mono(1, j, static_cast<int>(q))));
    }
    return with_z_truncated(std::move(acc), true);
}

ZQSeries chain_s2(int m, const SeriesContext& ctx) {
    const int lift = m * (m + 1) / 2;
    const SeriesContext work = ctx.widened(lift, 0, m);

    // Inner sum: q^{n(n-1)/2} (z q^{-m})^n / (q;q)_n.
    ZQSeries sum = ZQSeries::zero(work);
    ZQSeries inv = ZQSeries::unit(work);
    for (int n = 0; n <= work.z_max; ++n) {
        if (n > 0) inv = mul(inv, inverse_one_minus(mono(1, 0, n), work));
        const long q = tri(n) - static_cast<long>(m) * n;
        if (q > work.q_order) continue;
        sum = add(sum, mul_monomial(inv, mono(1, n, static_cast<int>(q))));
    }

    ZQSeries prefactor = invert(pochhammer_finite(mono(1, 0, m + 1), -m, work));
    ZQSeries p = mul(prefactor, sum);
    p = mul_monomial(p, mono(1, -m, lift));
    return with_z_truncated(restrict_to(p, ctx), true);
}

ZQSeries chain_s3(int m, const SeriesContext& ctx) {
    const int lift = m * (m + 1) / 2;
    const SeriesContext work = ctx.widened(lift, 0, m);
    ZQSeries p = pochhammer_finite(mono(1, 0, 1), m, work);   // (q;q)_m
    p = mul(p, pochhammer_inf(mono(-1, 1, -m), work));        // (-z q^{-m};q)_inf
    p = mul_monomial(p, mono(1, -m, lift));
    return with_z_truncated(restrict_to(p, ctx), true);
}

ZQSeries chain_s4(int m, const SeriesContext& ctx) {
    const int lift = m * (m + 1) / 2;
    const SeriesContext work = ctx.widened(lift, 0, m);
    ZQSeries p = pochhammer_finite(mono(1, 0, 1), m, work);       // (q;q)_m
    p = mul(p, pochhammer_finite(mono(-1, 1, -m), m, work));      // (-z q^{-m};q)_m
    p = mul(p, pochhammer_inf(mono(-1, 1, 0), work));             // (-z;q)_inf
    p = mul_monomial(p, mono(1, -m, lift));
    return with_z_truncated(restrict_to(p, ctx), true);
}

} // namespace

ZQSeries chain_step(ChainStep step, int m, const SeriesContext& ctx) {
    require_nonneg_m(m);
    switch (step) {
        case ChainStep::S0: return semifinite_sum(m, ctx);
        case ChainStep::S1: return chain_s1(m, ctx);
        case ChainStep::S2: return chain_s2(m, ctx);
        case ChainStep::S3: return chain_s3(m, ctx);
        case ChainStep::S4: return chain_s4(m, ctx);
        case ChainStep::S5: return finite_m_product(m, ctx);
    }
    throw SeriesError("unknown chain step");
}

const char* chain_step_name(ChainStep step) {
    switch (step) {
        case ChainStep::S0: return "S0";
        case ChainStep::S1: return "S1";
        case ChainStep::S2: return "S2";
        case ChainStep::S3: return "S3";
        case ChainStep::S4: return "S4";
        case ChainStep::S5: return "S5";
    }
    return "?";
}

} // namespace qtriple
