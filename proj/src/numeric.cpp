#include "qtriple/numeric.hpp"

#include "qtriple/qfunctions.hpp"

#include <cmath>
#include <stdexcept>

namespace qtriple::numeric {

namespace {

constexpr int kFactorCap = 100000;
constexpr int kTermCap = 100000;

using cd = std::complex<double>;

// Integer powers by squaring; std::pow on complex goes through log and
// turns 0^0 into NaN.
cd cpow_int(cd base, long e) {
    if (e == 0) return {1.0, 0.0};
    const bool negative = e < 0;
    unsigned long k = negative ? -static_cast<unsigned long>(e) : static_cast<unsigned long>(e);
    cd acc(1.0, 0.0);
    cd b = base;
    while (k) {
        if (k & 1) acc *= b;
        b *= b;
        k >>= 1;
    }
    return negative ? cd(1.0, 0.0) / acc : acc;
}

} // namespace

void validate(const NumericPoint& p) {
    if (!(std::abs(p.q) < 1.0)) throw std::invalid_argument("numeric point requires |q| < 1");
    if (p.z == cd(0.0, 0.0)) throw std::invalid_argument("numeric point requires z != 0");
    if (!(p.tol > 0.0)) throw std::invalid_argument("numeric point requires tol > 0");
}

ProductEval eval_product_numeric(const NumericPoint& p) {
    validate(p);
    const double aq = std::abs(p.q);
    const double az = std::abs(p.z);

    cd value(1.0, 0.0);
    cd qn(1.0, 0.0); // q^n
    double mag_qn = 1.0;
    for (int n = 0; n < kFactorCap; ++n) {
        const cd qn1 = qn * p.q;
        value *= (1.0 - qn1) * (1.0 + qn1 / p.z) * (1.0 + p.z * qn);
        qn = qn1;
        mag_qn *= aq;

        // Remaining factors (1 + a q^k), k > n: S = sum of |a| |q|^k, and
        // |prod - 1| <= exp(S) - 1.
        const double spill = (mag_qn * aq * (1.0 + 1.0 / az) + mag_qn * az) / (1.0 - aq);
        if (std::expm1(spill) * std::abs(value) < p.tol * std::max(1.0, std::abs(value)))
            return {value, true, n + 1};
    }
    return {value, false, kFactorCap};
}

SumEval eval_theta_numeric(const NumericPoint& p) {
    validate(p);
    const double aq = std::abs(p.q);
    const double az = std::abs(p.z);

    // t+(n) = q^{n(n-1)/2} z^n with ratio t+(n+1)/t+(n) = q^n z;
    // t-(k) = q^{k(k+1)/2} z^{-k} with ratio t-(k+1)/t-(k) = q^{k+1}/z.
    cd sum(1.0, 0.0); // n = 0
    int terms = 1;
    double mag_p = az;       // |t+(1)|
    double mag_m = aq / az;  // |t-(1)|
    double mag_qk = aq;      // |q|^level
    for (int level = 1; level < kTermCap; ++level) {
        sum += cpow_int(p.q, tri(level)) * cpow_int(p.z, level) +
               cpow_int(p.q, static_cast<long>(level) * (level + 1) / 2) * cpow_int(p.z, -level);
        terms += 2;

        const double next_p = mag_p * mag_qk * az;      // |t+(level+1)|
        const double next_m = mag_m * mag_qk * aq / az; // |t-(level+1)|
        const double rho_p = mag_qk * aq * az;          // ratio beyond level+1
        const double rho_m = mag_qk * aq * aq / az;
        if (rho_p < 1.0 && rho_m < 1.0) {
            const double tail = next_p / (1.0 - rho_p) + next_m / (1.0 - rho_m);
            if (tail < p.tol * std::max(1.0, std::abs(sum))) break;
        }
        mag_p = next_p;
        mag_m = next_m;
        mag_qk *= aq;
    }
    return {sum, terms};
}

ProductEval eval_finite_m_product_numeric(const NumericPoint& p, int m) {
    validate(p);
    if (m < 0) throw std::invalid_argument("m must be nonnegative");
    const double aq = std::abs(p.q);
    const double az = std::abs(p.z);

    cd value(1.0, 0.0);
    for (int i = 1; i <= m; ++i) {
        const cd qi = cpow_int(p.q, i);
        value *= (1.0 - qi) * (1.0 + qi / p.z);
    }
    cd qn(1.0, 0.0);
    double mag_qn = 1.0;
    for (int n = 0; n < kFactorCap; ++n) {
        value *= 1.0 + p.z * qn;
        qn *= p.q;
        mag_qn *= aq;
        const double spill = az * mag_qn / (1.0 - aq);
        if (std::expm1(spill) * std::abs(value) < p.tol * std::max(1.0, std::abs(value)))
            return {value, true, 2 * m + n + 1};
    }
    return {value, false, 2 * m + kFactorCap};
}

std::complex<double> eval_series_at(const ZQSeries& s, cd q, cd z) {
    cd sum(0.0, 0.0);
    for (const auto& [key, c] : s.terms())
        sum += mpq_get_d(c.get_mpq_t()) * cpow_int(q, key.q_exp) * cpow_int(z, key.z_exp);
    return sum;
}

double theta_truncation_bound(const NumericPoint& p, const SeriesContext& ctx) {
    validate(p);
    const double aq = std::abs(p.q);
    const double az = std::abs(p.z);

    double bound = 0.0;
    double mag = 1.0; // |t+(n)| running
    for (long n = 1; n < kTermCap; ++n) {
        mag = (n == 1) ? az : mag * std::pow(aq, n - 1) * az;
        const bool kept = n <= ctx.z_max && tri(n) <= ctx.q_order;
        if (!kept) bound += mag;
        if (std::pow(aq, n) * az < 0.5 && mag < 1e-300) break;
    }
    mag = 1.0;
    for (long k = 1; k < kTermCap; ++k) {
        mag = (k == 1) ? aq / az : mag * std::pow(aq, k) / az;
        const bool kept = -k >= ctx.z_min && static_cast<long>(k) * (k + 1) / 2 <= ctx.q_order;
        if (!kept) bound += mag;
        if (std::pow(aq, k) / az < 0.5 && mag < 1e-300) break;
    }
    return bound;
}

std::vector<ConvergenceRow> convergence_table(cd q, cd z, int m_lo, int m_hi, double tol) {
    if (m_lo > m_hi) throw std::invalid_argument("empty m range");
    const NumericPoint point{q, z, tol};
    validate(point);

    const SumEval theta = eval_theta_numeric(point);
    std::vector<ConvergenceRow> rows;
    rows.reserve(m_hi - m_lo + 1);
    for (int m = m_lo; m <= m_hi; ++m) {
        const ProductEval fin = eval_finite_m_product_numeric(point, m);
        rows.push_back({m, std::abs(fin.value - theta.value), fin.factors_used, theta.terms_used});
    }
    return rows;
}

} // namespace qtriple::numeric
