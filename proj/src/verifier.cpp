#include "qtriple/verifier.hpp"

#include <chrono>

namespace qtriple {

Window default_window(int target_order) {
    return Window{-largest_n_tri_down(target_order), largest_n_tri_up(target_order)};
}

namespace {

std::function<int(const Window&)> zero_mass() {
    return [](const Window&) { return 0; };
}

// Mass of a (-z q^{-m};q)-type factor: every z pick can cost up to m
// orders, and the window admits z_max of them.
std::function<int(const Window&)> shifted_base_mass(int m) {
    return [m](const Window& w) { return w.z_max * m; };
}

} // namespace

SeriesExpr expr_theta() {
    return {"theta()", [](const SeriesContext& ctx) { return theta_bilateral(ctx); }, zero_mass()};
}

SeriesExpr expr_triple_product() {
    return {"TP()", [](const SeriesContext& ctx) { return triple_product_lhs(ctx); }, zero_mass()};
}

SeriesExpr expr_euler_qexp() {
    return {"E()", [](const SeriesContext& ctx) { return euler_qexp_series(ctx); }, zero_mass()};
}

SeriesExpr expr_euler_inverse() {
    return {"Einv()", [](const SeriesContext& ctx) { return euler_inverse_series(ctx); }, zero_mass()};
}

SeriesExpr expr_semifinite(int m) {
    return {"S(" + std::to_string(m) + ")",
            [m](const SeriesContext& ctx) { return semifinite_sum(m, ctx); }, zero_mass()};
}

SeriesExpr expr_split(int m) {
    return {"Split(" + std::to_string(m) + ")",
            [m](const SeriesContext& ctx) { return semifinite_split(m, ctx); }, zero_mass()};
}

SeriesExpr expr_finite_m_product(int m) {
    return {"P(" + std::to_string(m) + ")",
            [m](const SeriesContext& ctx) { return finite_m_product(m, ctx); }, zero_mass()};
}

SeriesExpr expr_chain_step(ChainStep step, int m) {
    const bool has_negative_orders =
        step == ChainStep::S2 || step == ChainStep::S3 || step == ChainStep::S4;
    return {std::string(chain_step_name(step)) + "(m=" + std::to_string(m) + ")",
            [step, m](const SeriesContext& ctx) { return chain_step(step, m, ctx); },
            has_negative_orders ? shifted_base_mass(m) : zero_mass()};
}

int plan_orders(const IdentityTask& task) {
    const int mass = std::max(task.lhs.negative_order_mass(task.window),
                              task.rhs.negative_order_mass(task.window));
    return task.target_order + mass + task.extra_working_order;
}

VerificationReport verify_identity(const IdentityTask& task) {
    const auto t0 = std::chrono::steady_clock::now();
    const int working = plan_orders(task);
    const SeriesContext ctx(working, task.window.z_min, task.window.z_max);

    const ZQSeries lhs = task.lhs.build(ctx);
    const ZQSeries rhs = task.rhs.build(ctx);
    const EqualityVerdict verdict = equal_up_to(lhs, rhs, task.target_order);

    VerificationReport report;
    report.lhs_label = task.lhs.label;
    report.rhs_label = task.rhs.label;
    report.equal = verdict.equal;
    report.first_discrepancy = verdict.first_discrepancy;
    report.target_order = task.target_order;
    report.working_order_used = working;
    report.window = task.window;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

VerificationReport verify_jacobi(int target_order) {
    return verify_jacobi(target_order, default_window(target_order));
}

VerificationReport verify_jacobi(int target_order, const Window& window) {
    return verify_identity({expr_triple_product(), expr_theta(), target_order, window});
}

ChainReport verify_proof_chain(int m, int target_order) {
    return verify_proof_chain(m, target_order, default_window(target_order));
}

ChainReport verify_proof_chain(int m, int target_order, const Window& window) {
    const auto t0 = std::chrono::steady_clock::now();
    ChainReport report;
    report.m = m;
    report.target_order = target_order;
    report.window = window;

    const ChainStep steps[] = {ChainStep::S0, ChainStep::S1, ChainStep::S2,
                               ChainStep::S3, ChainStep::S4, ChainStep::S5};
    for (int i = 0; i < 5; ++i) {
        report.edges.push_back(verify_identity(
            {expr_chain_step(steps[i], m), expr_chain_step(steps[i + 1], m), target_order, window}));
    }
    report.split_vs_s0 =
        verify_identity({expr_split(m), expr_chain_step(ChainStep::S0, m), target_order, window});

    // Vanishing lemma: (q^{m+1-n};q)_n = 0 whenever n > m.
    const SeriesContext small_ctx(std::max(target_order, 4), window.z_min, window.z_max);
    for (int n = m + 1; n <= m + 4; ++n) {
        const ZQSeries p = pochhammer_finite(mono(1, 0, m + 1 - n), n, small_ctx);
        report.vanishing.push_back({n, p.is_zero()});
    }

    report.pass = report.split_vs_s0.equal;
    for (const auto& e : report.edges) report.pass = report.pass && e.equal;
    for (const auto& v : report.vanishing) report.pass = report.pass && v.zero;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

std::optional<int> discrepancy_order(int m, const SeriesContext& ctx) {
    const ZQSeries finite = finite_m_product(m, ctx);
    const ZQSeries theta = theta_bilateral(ctx);
    const EqualityVerdict verdict = equal_up_to(finite, theta, ctx.q_order);
    if (verdict.equal) return std::nullopt;
    return verdict.first_discrepancy->q_exp;
}

} // namespace qtriple
