#include "qtriple/series.hpp"

#include <sstream>

namespace qtriple {

ZQSeries ZQSeries::unit(const SeriesContext& ctx) {
    return make_monomial(mono(1), ctx);
}

ZQSeries ZQSeries::from_terms(const SeriesContext& ctx, const TermMap& raw, bool z_truncated) {
    ZQSeries out(ctx);
    out.z_truncated_ = z_truncated;
    for (const auto& [key, c] : raw) {
        if (c == 0) continue;
        if (key.q_exp > ctx.q_order) continue;
        if (!ctx.in_window(key.z_exp)) {
            out.z_truncated_ = true;
            continue;
        }
        out.terms_.emplace(key, c);
    }
    return out;
}

ZQSeries make_monomial(const Monomial& m, const SeriesContext& ctx) {
    ZQSeries out(ctx);
    if (m.coeff == 0) return out;
    if (!ctx.in_window(m.z_exp)) {
        out.z_truncated_ = true;
        return out;
    }
    if (m.q_exp > ctx.q_order) return out;
    out.terms_.emplace(TermKey{m.q_exp, m.z_exp}, m.coeff);
    return out;
}

static void require_same_context(const ZQSeries& a, const ZQSeries& b) {
    if (!(a.context() == b.context()))
        throw ContextMismatchError("series contexts differ");
}

ZQSeries add(const ZQSeries& a, const ZQSeries& b) {
    require_same_context(a, b);
    ZQSeries out(a.context());
    out.z_truncated_ = a.z_truncated() || b.z_truncated();
    out.terms_ = a.terms();
    for (const auto& [key, c] : b.terms()) {
        auto it = out.terms_.find(key);
        if (it == out.terms_.end()) {
            out.terms_.emplace(key, c);
        } else {
            it->second += c;
            if (it->second == 0) out.terms_.erase(it);
        }
    }
    return out;
}

ZQSeries negate(const ZQSeries& a) {
    ZQSeries out = a;
    for (auto& [key, c] : out.terms_) c = -c;
    return out;
}

ZQSeries sub(const ZQSeries& a, const ZQSeries& b) {
    return add(a, negate(b));
}

ZQSeries mul(const ZQSeries& a, const ZQSeries& b) {
    require_same_context(a, b);
    const SeriesContext& ctx = a.context();
    ZQSeries out(ctx);
    bool clipped = false;
    // Iterate the smaller operand on the outside; accumulation dominates.
    const ZQSeries& small = a.term_count() <= b.term_count() ? a : b;
    const ZQSeries& large = a.term_count() <= b.term_count() ? b : a;
    for (const auto& [ka, ca] : small.terms()) {
        for (const auto& [kb, cb] : large.terms()) {
            const int q = ka.q_exp + kb.q_exp;
            if (q > ctx.q_order) continue;
            const int z = ka.z_exp + kb.z_exp;
            if (!ctx.in_window(z)) {
                clipped = true;
                continue;
            }
            auto [it, inserted] = out.terms_.try_emplace(TermKey{q, z}, 0);
            it->second += ca * cb;
        }
    }
    for (auto it = out.terms_.begin(); it != out.terms_.end();) {
        if (it->second == 0) it = out.terms_.erase(it);
        else ++it;
    }
    out.z_truncated_ = a.z_truncated() || b.z_truncated() || clipped;
    return out;
}

ZQSeries mul_monomial(const ZQSeries& a, const Monomial& m) {
    const SeriesContext& ctx = a.context();
    ZQSeries out(ctx);
    out.z_truncated_ = a.z_truncated();
    if (m.coeff == 0) return out;
    for (const auto& [key, c] : a.terms()) {
        const int q = key.q_exp + m.q_exp;
        if (q > ctx.q_order) continue;
        const int z = key.z_exp + m.z_exp;
        if (!ctx.in_window(z)) {
            out.z_truncated_ = true;
            continue;
        }
        out.terms_.emplace(TermKey{q, z}, c * m.coeff);
    }
    return out;
}

ZQSeries invert(const ZQSeries& a) {
    if (a.is_zero())
        throw NonInvertibleError("cannot invert the zero series");
    const SeriesContext& ctx = a.context();

    // Leading term: graded-minimal corner (least q, then least z).
    const auto& [lead_key, lead_coeff] = *a.terms().begin();
    const Monomial inv_lead = mono(Rational(1) / lead_coeff, -lead_key.z_exp, -lead_key.q_exp);

    // a = lead * (1 + h); every term of h has q_exp > 0, or q_exp == 0 and
    // z_exp > 0, by minimality of the corner.
    ZQSeries h = mul_monomial(a, inv_lead);
    {
        TermMap t = h.terms();
        t.erase(TermKey{0, 0});
        bool has_z = false;
        for (const auto& [key, c] : t) has_z = has_z || key.z_exp != 0;
        h = ZQSeries::from_terms(ctx, t, h.z_truncated() || has_z);
    }

    // Neumann series: (1 + h)^{-1} = sum (-h)^t. Each power strictly
    // increases the q-grading or marches z toward the window edge, so the
    // loop terminates; the cap is a safety net for contract violations.
    ZQSeries acc = ZQSeries::unit(ctx);
    ZQSeries power = negate(h);
    const long cap = static_cast<long>(ctx.q_order + 1) *
                     (static_cast<long>(ctx.z_max) - ctx.z_min + 2) + 64;
    long iterations = 0;
    while (!power.is_zero()) {
        if (++iterations > cap)
            throw NonInvertibleError("inverse does not terminate within the validity region");
        acc = add(acc, power);
        power = mul(power, negate(h));
    }

    ZQSeries out = mul_monomial(acc, inv_lead);
    out.z_truncated_ = out.z_truncated_ || h.z_truncated();
    return out;
}

Rational coeff(const ZQSeries& a, int z_exp, int q_exp) {
    if (!a.context().in_region(z_exp, q_exp))
        throw OutOfContractError("coefficient query outside the validity region");
    auto it = a.terms().find(TermKey{q_exp, z_exp});
    return it == a.terms().end() ? Rational(0) : it->second;
}

EqualityVerdict equal_up_to(const ZQSeries& a, const ZQSeries& b, int q_order) {
    if (a.context().z_min != b.context().z_min || a.context().z_max != b.context().z_max)
        throw ContextMismatchError("window mismatch in comparison");
    if (q_order > a.context().q_order || q_order > b.context().q_order)
        throw OutOfContractError("requested comparison order exceeds validity");

    auto ia = a.terms().begin(), ea = a.terms().end();
    auto ib = b.terms().begin(), eb = b.terms().end();
    while (ia != ea || ib != eb) {
        const bool a_live = ia != ea && ia->first.q_exp <= q_order;
        const bool b_live = ib != eb && ib->first.q_exp <= q_order;
        if (!a_live && !b_live) break;
        if (a_live && (!b_live || ia->first < ib->first)) {
            return {false, Discrepancy{ia->first.z_exp, ia->first.q_exp, ia->second, Rational(0)}};
        }
        if (b_live && (!a_live || ib->first < ia->first)) {
            return {false, Discrepancy{ib->first.z_exp, ib->first.q_exp, Rational(0), ib->second}};
        }
        if (ia->second != ib->second) {
            return {false, Discrepancy{ia->first.z_exp, ia->first.q_exp, ia->second, ib->second}};
        }
        ++ia;
        ++ib;
    }
    return {true, std::nullopt};
}

int min_q_order(const ZQSeries& a) {
    if (a.is_zero()) return 0;
    return a.terms().begin()->first.q_exp;
}

ZQSeries restrict_to(const ZQSeries& a, const SeriesContext& ctx) {
    if (ctx.q_order > a.context().q_order || ctx.z_min < a.context().z_min ||
        ctx.z_max > a.context().z_max)
        throw ContextMismatchError("restriction target is not a sub-context");
    return ZQSeries::from_terms(ctx, a.terms(), a.z_truncated());
}

ZQSeries with_z_truncated(ZQSeries a, bool flag) {
    a.z_truncated_ = flag;
    return a;
}

std::string to_string(const ZQSeries& a) {
    if (a.is_zero()) return "0";
    std::ostringstream os;
    auto it = a.terms().begin();
    while (it != a.terms().end()) {
        const int q = it->first.q_exp;
        os << "q^" << q << ":";
        bool first = true;
        for (; it != a.terms().end() && it->first.q_exp == q; ++it) {
            const Rational& c = it->second;
            const int z = it->first.z_exp;
            if (first) os << " ";
            else os << (c >= 0 ? " + " : " - ");
            const Rational mag = first ? c : Rational(abs(c));
            first = false;
            if (z == 0) {
                os << to_string(mag);
            } else {
                if (mag != 1) os << to_string(mag) << "*";
                os << "z^" << z;
            }
        }
        os << "\n";
    }
    return os.str();
}

} // namespace qtriple
