#pragma once

#include "qtriple/series.hpp"

#include <optional>

namespace qtriple {

/// A factor in the denominator of a negative-index Pochhammer symbol is
/// exactly zero (e.g. (q;q)_{-1}).
struct PoleError : SeriesError {
    using SeriesError::SeriesError;
};

struct PochhammerSpec {
    Monomial base;
    std::optional<int> index; // nullopt = infinite product
};

/// q-exponent of z^n in the bilateral theta sum.
inline long tri(long n) { return n * (n - 1) / 2; }

/// Largest n >= 0 with n(n-1)/2 <= bound (theta support cap above).
int largest_n_tri_up(int bound);
/// Largest n >= 0 with n(n+1)/2 <= bound (theta support cap below).
int largest_n_tri_down(int bound);

/// (a;q)_inf = prod_{n>=0} (1 - a q^n), truncated to the context. Factors
/// stop once no cross term can reach the validity region; when the base
/// carries a negative q-exponent the partial products run at an elevated
/// internal order so that dips below the floor cannot corrupt the result.
ZQSeries pochhammer_inf(const Monomial& base, const SeriesContext& ctx);

/// (a;q)_n for any integer n: the unrolled product for n >= 0, the unit for
/// n = 0, and invert(prod_{i=1}^{-n} (1 - a q^{-i})) for n < 0. Throws
/// PoleError when a denominator factor vanishes exactly.
ZQSeries pochhammer_finite(const Monomial& base, int index, const SeriesContext& ctx);

ZQSeries pochhammer(const PochhammerSpec& spec, const SeriesContext& ctx);

/// sum_{n>=0} q^{n(n-1)/2} z^n / (q;q)_n — the q-exponential expansion
/// of (-z;q)_inf.
ZQSeries euler_qexp_series(const SeriesContext& ctx);

/// sum_{n>=0} (-1)^n z^n / (q;q)_n — the expansion of 1/(-z;q)_inf. As a
/// formal series the identity needs no convergence hypothesis (the analytic
/// reading would require |z| < 1). Every z-column starts at q^0, so the sum
/// is cut by the window alone and the result is always z_truncated.
ZQSeries euler_inverse_series(const SeriesContext& ctx);

/// sum over all integers n of q^{n(n-1)/2} z^n, one term per retained n.
ZQSeries theta_bilateral(const SeriesContext& ctx);

/// (q;q)_inf (-q/z;q)_inf (-z;q)_inf built on an internally widened window.
ZQSeries triple_product_lhs(const SeriesContext& ctx);

/// sum_{n=-m}^{inf} q^{n(n-1)/2} z^n / (q^{m+1};q)_n. Negative n use the
/// reciprocal rule 1/(q^{m+1};q)_{-k} = (q^{m+1-k};q)_k.
ZQSeries semifinite_sum(int m, const SeriesContext& ctx);

/// The rewritten form: sum_{n>=0} q^{n(n-1)/2} z^n / (q^{m+1};q)_n
///                   + sum_{n>=1} (q^{m+1-n};q)_n q^{n(n+1)/2} z^{-n}.
/// Terms of the second sum with n > m are constructed and confirmed to be
/// zero up to the window bound.
ZQSeries semifinite_split(int m, const SeriesContext& ctx);

/// (q;q)_m (-q/z;q)_m (-z;q)_inf.
ZQSeries finite_m_product(int m, const SeriesContext& ctx);

enum class ChainStep { S0, S1, S2, S3, S4, S5 };

/// The six expressions of the proof chain, each built literally from its
/// own formula:
///   S0 = semifinite sum
///   S1 = sum_{n>=0} q^{(n-m)(n-m-1)/2} z^{n-m} / (q^{m+1};q)_{n-m}
///   S2 = q^{m(m+1)/2} z^{-m} / (q^{m+1};q)_{-m}
///        * sum_{n>=0} q^{n(n-1)/2} (z q^{-m})^n / (q;q)_n
///   S3 = q^{m(m+1)/2} z^{-m} (q;q)_m (-z q^{-m};q)_inf
///   S4 = q^{m(m+1)/2} z^{-m} (q;q)_m (-z q^{-m};q)_m (-z;q)_inf
///   S5 = (q;q)_m (-q/z;q)_m (-z;q)_inf
/// S2, S3 and S4 have negative q-exponents internally; the builders widen
/// their working context so the returned series is exact at the requested
/// one.
ZQSeries chain_step(ChainStep step, int m, const SeriesContext& ctx);

const char* chain_step_name(ChainStep step);

} // namespace qtriple
