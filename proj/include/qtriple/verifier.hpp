#pragma once

#include "qtriple/qfunctions.hpp"
#include "qtriple/series.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qtriple {

struct Window {
    int z_min;
    int z_max;
    bool operator==(const Window&) const = default;
};

/// Window matching the theta support at the target order: z_max is the
/// largest n with n(n-1)/2 <= order, z_min the most negative n with
/// n(n+1)/2 <= order. No theta term is silently windowed out.
Window default_window(int target_order);

/// One side of an identity: a constructor plus its declared negative-order
/// mass (how far below q^0 its internals can dip within a window).
struct SeriesExpr {
    std::string label;
    std::function<ZQSeries(const SeriesContext&)> build;
    std::function<int(const Window&)> negative_order_mass;
};

SeriesExpr expr_theta();
SeriesExpr expr_triple_product();
SeriesExpr expr_euler_qexp();
SeriesExpr expr_euler_inverse();
SeriesExpr expr_semifinite(int m);
SeriesExpr expr_split(int m);
SeriesExpr expr_finite_m_product(int m);
SeriesExpr expr_chain_step(ChainStep step, int m);

struct IdentityTask {
    SeriesExpr lhs;
    SeriesExpr rhs;
    int target_order;
    Window window;
    int extra_working_order = 0; // audit knob: rerun above the planned order
};

/// Working order for a task: target + the larger side's negative-order
/// mass (plus any audit surcharge). Factors of (-z q^{-m};q) type
/// contribute z_max * m.
int plan_orders(const IdentityTask& task);

struct VerificationReport {
    std::string lhs_label;
    std::string rhs_label;
    bool equal = false;
    std::optional<Discrepancy> first_discrepancy;
    int target_order = 0;
    int working_order_used = 0;
    Window window{0, 0};
    double wall_seconds = 0.0;
};

/// Builds both sides independently at the working order and compares them
/// at the target order.
VerificationReport verify_identity(const IdentityTask& task);

/// Triple product vs. theta at the given order (default window).
VerificationReport verify_jacobi(int target_order);
VerificationReport verify_jacobi(int target_order, const Window& window);

struct VanishingCheck {
    int n;
    bool zero;
};

struct ChainReport {
    int m = 0;
    int target_order = 0;
    Window window{0, 0};
    std::vector<VerificationReport> edges; // S0=S1, S1=S2, S2=S3, S3=S4, S4=S5
    VerificationReport split_vs_s0;
    std::vector<VanishingCheck> vanishing; // n = m+1 .. m+4
    bool pass = false;
    double wall_seconds = 0.0;
};

/// Runs the five chain edges, the split equivalence and the vanishing
/// lemma for n = m+1..m+4. Failures are report content, not errors.
ChainReport verify_proof_chain(int m, int target_order, const Window& window);
ChainReport verify_proof_chain(int m, int target_order);

/// Least q-order at which the finite-m product differs from theta inside
/// the window; nullopt when they agree through the whole context order.
std::optional<int> discrepancy_order(int m, const SeriesContext& ctx);

} // namespace qtriple
