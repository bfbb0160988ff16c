#pragma once

#include "qtriple/series.hpp"

#include <complex>
#include <vector>

namespace qtriple::numeric {

/// One evaluation point. Requires |q| < 1, z != 0, tol > 0.
struct NumericPoint {
    std::complex<double> q;
    std::complex<double> z;
    double tol = 1e-10;
};

void validate(const NumericPoint& p); // throws std::invalid_argument

struct ProductEval {
    std::complex<double> value;
    bool converged = false;
    int factors_used = 0;
};

struct SumEval {
    std::complex<double> value;
    int terms_used = 0;
};

/// (q;q)_inf (-q/z;q)_inf (-z;q)_inf: partial products extended until the
/// multiplicative tail bound exp(sum of remaining |a q^n|) - 1 drops below
/// tol relative to the running value. Sets converged = false if the factor
/// cap is hit first.
ProductEval eval_product_numeric(const NumericPoint& p);

/// Bilateral theta sum added in increasing |n|, stopped when the
/// super-geometric term bounds on both tails are below tol.
SumEval eval_theta_numeric(const NumericPoint& p);

/// (q;q)_m (-q/z;q)_m (-z;q)_inf at the point.
ProductEval eval_finite_m_product_numeric(const NumericPoint& p, int m);

/// Evaluates a truncated series at the point (exact coefficients rounded
/// to double at the end of each term).
std::complex<double> eval_series_at(const ZQSeries& s, std::complex<double> q,
                                    std::complex<double> z);

/// Bound on |theta - truncation of theta to ctx| at the point: sum of
/// |q|^{n(n-1)/2} max(|z|,1/|z|)^{|n|} over the omitted n.
double theta_truncation_bound(const NumericPoint& p, const SeriesContext& ctx);

struct ConvergenceRow {
    int m;
    double residual;
    int factor_count;
    int term_count;
};

/// Residuals |finite-m product - theta| for m in [m_lo, m_hi].
std::vector<ConvergenceRow> convergence_table(std::complex<double> q, std::complex<double> z,
                                              int m_lo, int m_hi, double tol);

} // namespace qtriple::numeric
