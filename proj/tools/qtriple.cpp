// qtriple: exact verification and numeric evaluation of q-series identities
// around the triple product. Exit codes: 0 verified/success, 1 discrepancy
// or numeric mismatch, 2 usage or parse error.

#include "qtriple/expr.hpp"
#include "qtriple/numeric.hpp"
#include "qtriple/qfunctions.hpp"
#include "qtriple/report_json.hpp"
#include "qtriple/series.hpp"
#include "qtriple/verifier.hpp"

#include <CLI11.hpp>

#include <complex>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace qtriple;

constexpr int kExitVerified = 0;
constexpr int kExitDiscrepancy = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
    int order = 24;
    std::optional<int> z_min;
    std::optional<int> z_max;
    std::string format = "text";
};

Window resolve_window(const CommonOpts& opts) {
    if (opts.z_min && opts.z_max) return Window{*opts.z_min, *opts.z_max};
    if (opts.z_min || opts.z_max) {
        Window w = default_window(opts.order);
        if (opts.z_min) w.z_min = *opts.z_min;
        if (opts.z_max) w.z_max = *opts.z_max;
        return w;
    }
    return default_window(opts.order);
}

std::complex<double> parse_complex(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) return {std::stod(text), 0.0};
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
}

std::pair<int, int> parse_m_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const int m = std::stoi(text);
        return {m, m};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
}

void print_parse_error(const std::string& source, const dsl::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "    " << source << "\n";
    std::cerr << "    " << std::string(e.position, ' ') << "^\n";
}

std::shared_ptr<const dsl::ExprNode> parse_or_exit(const std::string& source, int& exit_code) {
    try {
        return std::shared_ptr<const dsl::ExprNode>(dsl::parse(source).release());
    } catch (const dsl::ParseError& e) {
        print_parse_error(source, e);
        exit_code = kExitUsage;
        return nullptr;
    }
}

// ---------------------------------------------------------------------------
// expand

int run_expand(const std::string& expr_text, const CommonOpts& opts) {
    int exit_code = kExitVerified;
    auto ast = parse_or_exit(expr_text, exit_code);
    if (!ast) return exit_code;

    const Window w = resolve_window(opts);
    ZQSeries s = [&] {
        const SeriesContext ctx(opts.order, w.z_min, w.z_max);
        return dsl::eval_ast(*ast, ctx);
    }();

    if (opts.format == "json") {
        nlohmann::json j = {{"command", "expand"},
                            {"expr", expr_text},
                            {"order", opts.order},
                            {"window", w},
                            {"z_truncated", s.z_truncated()},
                            {"terms", series_terms_json(s)}};
        std::cout << j.dump(2) << "\n";
    } else if (opts.format == "csv") {
        std::cout << "q_exp,z_exp,coeff\n";
        for (const auto& [key, c] : s.terms())
            std::cout << key.q_exp << "," << key.z_exp << "," << to_string(c) << "\n";
    } else {
        std::cout << "# " << expr_text << "  order " << opts.order << "  window [" << w.z_min
                  << ", " << w.z_max << "]"
                  << (s.z_truncated() ? "  (z-truncated)" : "") << "\n";
        std::cout << to_string(s);
    }
    return kExitVerified;
}

// ---------------------------------------------------------------------------
// verify

void print_verify_text(const VerificationReport& r) {
    std::cout << (r.equal ? "equal" : "DISCREPANCY") << "  " << r.lhs_label << "  vs  "
              << r.rhs_label << "\n";
    std::cout << "  target order " << r.target_order << ", working order "
              << r.working_order_used << ", window [" << r.window.z_min << ", " << r.window.z_max
              << "], " << r.wall_seconds << " s\n";
    if (r.first_discrepancy) {
        const auto& d = *r.first_discrepancy;
        std::cout << "  first discrepancy at z^" << d.z_exp << " q^" << d.q_exp << ": lhs "
                  << to_string(d.lhs_coeff) << ", rhs " << to_string(d.rhs_coeff) << "\n";
    }
}

int run_verify(const std::string& lhs_text, const std::string& rhs_text, const CommonOpts& opts) {
    int exit_code = kExitVerified;
    auto lhs = parse_or_exit(lhs_text, exit_code);
    if (!lhs) return exit_code;
    auto rhs = parse_or_exit(rhs_text, exit_code);
    if (!rhs) return exit_code;

    const Window w = resolve_window(opts);
    const IdentityTask task{dsl::expr_from_ast(lhs, lhs_text), dsl::expr_from_ast(rhs, rhs_text),
                            opts.order, w};
    const VerificationReport report = verify_identity(task);

    if (opts.format == "json") {
        nlohmann::json j = report;
        j["command"] = "verify";
        std::cout << j.dump(2) << "\n";
    } else {
        print_verify_text(report);
    }
    return report.equal ? kExitVerified : kExitDiscrepancy;
}

// ---------------------------------------------------------------------------
// chain

int run_chain(const std::string& m_text, const CommonOpts& opts, int jobs) {
    const auto [m_lo, m_hi] = parse_m_range(m_text);
    if (m_lo < 0 || m_hi < m_lo) {
        std::cerr << "error: invalid m range '" << m_text << "'\n";
        return kExitUsage;
    }
    const Window w = resolve_window(opts);

    std::vector<ChainReport> reports(m_hi - m_lo + 1);
    if (jobs > 1) {
        std::vector<std::future<ChainReport>> futures;
        futures.reserve(reports.size());
        for (int m = m_lo; m <= m_hi; ++m)
            futures.push_back(std::async(std::launch::async, [m, &opts, &w] {
                return verify_proof_chain(m, opts.order, w);
            }));
        for (std::size_t i = 0; i < futures.size(); ++i) reports[i] = futures[i].get();
    } else {
        for (int m = m_lo; m <= m_hi; ++m) reports[m - m_lo] = verify_proof_chain(m, opts.order, w);
    }

    bool all_pass = true;
    for (const auto& r : reports) all_pass = all_pass && r.pass;

    if (opts.format == "json") {
        nlohmann::json j = {{"command", "chain"}, {"pass", all_pass}, {"results", reports}};
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& r : reports) {
            std::cout << "m=" << r.m << "  " << (r.pass ? "pass" : "FAIL") << "  ("
                      << r.wall_seconds << " s)\n";
            for (const auto& e : r.edges)
                std::cout << "    " << e.lhs_label << " = " << e.rhs_label << "  "
                          << (e.equal ? "equal" : "DISCREPANCY") << "  [working order "
                          << e.working_order_used << "]\n";
            std::cout << "    " << r.split_vs_s0.lhs_label << " = " << r.split_vs_s0.rhs_label
                      << "  " << (r.split_vs_s0.equal ? "equal" : "DISCREPANCY") << "\n";
            std::cout << "    vanishing (q^{m+1-n};q)_n for n=";
            for (const auto& v : r.vanishing)
                std::cout << v.n << (v.zero ? "" : "(NONZERO!)") << " ";
            std::cout << "\n";
        }
        std::cout << (all_pass ? "chain: all pass" : "chain: FAILURES") << "\n";
    }
    return all_pass ? kExitVerified : kExitDiscrepancy;
}

// ---------------------------------------------------------------------------
// eval

int run_eval(const std::string& q_text, const std::string& z_text, double tol,
             const CommonOpts& opts) {
    numeric::NumericPoint point;
    point.q = parse_complex(q_text);
    point.z = parse_complex(z_text);
    point.tol = tol;
    try {
        numeric::validate(point);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    const auto product = numeric::eval_product_numeric(point);
    const auto theta = numeric::eval_theta_numeric(point);
    const double diff = std::abs(product.value - theta.value);
    const bool ok = product.converged && diff <= 10.0 * point.tol;

    if (opts.format == "json") {
        nlohmann::json j = {
            {"command", "eval"},
            {"q", {point.q.real(), point.q.imag()}},
            {"z", {point.z.real(), point.z.imag()}},
            {"tol", point.tol},
            {"product", {product.value.real(), product.value.imag()}},
            {"theta", {theta.value.real(), theta.value.imag()}},
            {"abs_diff", diff},
            {"factors_used", product.factors_used},
            {"terms_used", theta.terms_used},
            {"converged", product.converged},
            {"agree", ok},
        };
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "product side = " << product.value << "  (" << product.factors_used
                  << " factors" << (product.converged ? "" : ", NOT CONVERGED") << ")\n";
        std::cout << "theta side   = " << theta.value << "  (" << theta.terms_used << " terms)\n";
        std::cout << "|difference| = " << diff << "  tol " << point.tol << "\n";
    }
    return ok ? kExitVerified : kExitDiscrepancy;
}

// ---------------------------------------------------------------------------
// converge

int run_converge(const std::string& q_text, const std::string& z_text, const std::string& m_text,
                 double tol, const CommonOpts& opts) {
    const auto [m_lo, m_hi] = parse_m_range(m_text);
    std::vector<numeric::ConvergenceRow> rows;
    try {
        rows = numeric::convergence_table(parse_complex(q_text), parse_complex(z_text), m_lo, m_hi,
                                          tol);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    if (opts.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows)
            j.push_back({{"m", r.m},
                         {"residual", r.residual},
                         {"factor_count", r.factor_count},
                         {"term_count", r.term_count}});
        std::cout << nlohmann::json{{"command", "converge"}, {"rows", j}}.dump(2) << "\n";
    } else if (opts.format == "text") {
        for (const auto& r : rows)
            std::cout << "m=" << r.m << "  residual=" << r.residual
                      << "  factors=" << r.factor_count << "  terms=" << r.term_count << "\n";
    } else {
        std::cout << "m,residual,factor_count,term_count\n";
        for (const auto& r : rows)
            std::cout << r.m << "," << r.residual << "," << r.factor_count << "," << r.term_count
                      << "\n";
    }
    return kExitVerified;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_window = true) {
    cmd->add_option("--order", opts.order, "truncation order (default 24)")
        ->envname("QTRIPLE_DEFAULT_ORDER");
    if (with_window) {
        cmd->add_option("--zmin", opts.z_min, "lower z-window bound (default derived from order)");
        cmd->add_option("--zmax", opts.z_max, "upper z-window bound (default derived from order)");
    }
    cmd->add_option("--format", opts.format, "output format: text | json | csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qtriple: exact q-series identity verification and numeric cross-checks"};
    app.require_subcommand(1);

    CommonOpts expand_opts, verify_opts, chain_opts, eval_opts, converge_opts;
    std::string expand_expr, verify_lhs, verify_rhs;
    std::string chain_m = "0..8", converge_m = "0..20";
    std::string eval_q, eval_z, converge_q, converge_z;
    double eval_tol = 1e-10, converge_tol = 1e-10;
    int jobs = 1;

    auto* expand = app.add_subcommand("expand", "expand an expression to a truncated series");
    expand->add_option("--expr", expand_expr, "expression in the q-series DSL")->required();
    add_common(expand, expand_opts);

    auto* verify = app.add_subcommand("verify", "verify lhs = rhs as truncated series");
    verify->add_option("--lhs", verify_lhs, "left-hand expression")->required();
    verify->add_option("--rhs", verify_rhs, "right-hand expression")->required();
    add_common(verify, verify_opts);

    auto* chain = app.add_subcommand("chain", "run the six-step proof chain for a range of m");
    chain->add_option("--m", chain_m, "m value or range, e.g. 3 or 0..8");
    chain->add_option("--jobs", jobs, "worker pool size for independent m");
    add_common(chain, chain_opts);

    auto* eval = app.add_subcommand("eval", "numeric evaluation of both identity sides");
    eval->add_option("--q", eval_q, "complex q as re or re,im with |q| < 1")->required();
    eval->add_option("--z", eval_z, "complex z as re or re,im, z != 0")->required();
    eval->add_option("--tol", eval_tol, "tail-bound tolerance (default 1e-10)");
    add_common(eval, eval_opts, false);

    auto* converge = app.add_subcommand("converge", "finite-m residual table against theta");
    converge->add_option("--q", converge_q, "complex q as re or re,im with |q| < 1")->required();
    converge->add_option("--z", converge_z, "complex z as re or re,im, z != 0")->required();
    converge->add_option("--m", converge_m, "m range, e.g. 0..20");
    converge->add_option("--tol", converge_tol, "tail-bound tolerance (default 1e-10)");
    add_common(converge, converge_opts, false);
    converge_opts.format = "csv";

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (expand->parsed()) return run_expand(expand_expr, expand_opts);
        if (verify->parsed()) return run_verify(verify_lhs, verify_rhs, verify_opts);
        if (chain->parsed()) return run_chain(chain_m, chain_opts, jobs);
        if (eval->parsed()) return run_eval(eval_q, eval_z, eval_tol, eval_opts);
        if (converge->parsed())
            return run_converge(converge_q, converge_z, converge_m, converge_tol, converge_opts);
    } catch (const dsl::EvalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
