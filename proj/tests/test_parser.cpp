#include "qtriple/expr.hpp"

#include "qtriple/qfunctions.hpp"

#include <doctest.h>

#include <random>
#include <string>
#include <vector>

using namespace qtriple;
using namespace qtriple::dsl;

TEST_CASE("tokenizer: kinds and strictly increasing positions") {
    const auto tokens = tokenize("(q;q)_inf * z^-2 + 3/4");
    REQUIRE(tokens.size() > 2);
    std::size_t last = 0;
    bool first = true;
    for (const auto& t : tokens) {
        if (!first) CHECK(t.pos > last);
        last = t.pos;
        first = false;
    }
    CHECK(tokens[0].kind == TokenKind::LParen);
    CHECK(tokens[1].kind == TokenKind::Q);
    CHECK(tokens[2].kind == TokenKind::Semi);
    CHECK(tokens[5].kind == TokenKind::Underscore);
    CHECK(tokens[6].kind == TokenKind::Inf);
    CHECK(tokens.back().kind == TokenKind::End);

    // "3/4" lexes as one rational literal.
    const auto rat = tokenize("3/4");
    CHECK(rat.size() == 2);
    CHECK(rat[0].kind == TokenKind::Number);
    CHECK(rat[0].text == "3/4");

    // "3/z" does not.
    const auto div = tokenize("3/z");
    CHECK(div.size() == 4);
    CHECK(div[1].kind == TokenKind::Slash);
}

TEST_CASE("parse: triple product LHS has the expected shape") {
    const ExprPtr ast = parse("(q;q)_inf * (-q/z;q)_inf * (-z;q)_inf");
    // Left-associated: Mul(Mul(Poch, Poch), Poch).
    REQUIRE(ast->kind == NodeKind::Mul);
    REQUIRE(ast->kids[0]->kind == NodeKind::Mul);
    CHECK(ast->kids[1]->kind == NodeKind::Poch);
    CHECK(ast->kids[1]->index_is_inf);
    CHECK(ast->kids[0]->kids[0]->kind == NodeKind::Poch);
    CHECK(ast->kids[0]->kids[1]->kind == NodeKind::Poch);
}

TEST_CASE("parse: powers with negative literal exponents") {
    const ExprPtr ast = parse("q^3 * z^-1");
    REQUIRE(ast->kind == NodeKind::Mul);
    CHECK(ast->kids[0]->kind == NodeKind::Pow);
    CHECK(ast->kids[0]->int_arg == 3);
    CHECK(ast->kids[0]->kids[0]->kind == NodeKind::VarQ);
    CHECK(ast->kids[1]->kind == NodeKind::Pow);
    CHECK(ast->kids[1]->int_arg == -1);
    CHECK(ast->kids[1]->kids[0]->kind == NodeKind::VarZ);
}

TEST_CASE("parse: unknown identifier is rejected with its position") {
    try {
        parse("(a;q)_2");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position == 1);
        CHECK(std::string(e.what()).find("unknown identifier 'a'") != std::string::npos);
        CHECK_FALSE(e.expected.empty());
    }
}

TEST_CASE("round-trip: pretty-print reparses to an identical AST") {
    const std::vector<std::string> corpus = {
        "theta()",
        "E()",
        "Einv()",
        "TP()",
        "S(0)",
        "S(3)",
        "Split(2)",
        "P(5)",
        "z",
        "q",
        "42",
        "3/4",
        "-z",
        "q^3",
        "z^-2",
        "(q;q)_inf",
        "(-z;q)_inf",
        "(-q/z;q)_inf",
        "(q;q)_3",
        "(q^4;q)_-2",
        "(q;q)_inf * (-q/z;q)_inf * (-z;q)_inf",
        "1 + z + z^2",
        "1 - q - q^2 + q^5",
        "E() / (q;q)_2",
        "theta() - TP()",
        "S(2) - P(2)",
        "q^2 * z^-1 * 5/3",
        "-(1 + z)",
        "(1 + z) * (1 - z)",
        "((q;q)_2 + q) / (1 - q)",
    };
    REQUIRE(corpus.size() == 30);
    for (const auto& source : corpus) {
        INFO("source: ", source);
        const ExprPtr first = parse(source);
        const std::string printed = pretty_print(*first);
        INFO("printed: ", printed);
        const ExprPtr second = parse(printed);
        CHECK(ast_equal(*first, *second));
    }
}

TEST_CASE("malformed inputs: positioned syntax errors with expectations") {
    const std::vector<std::string> bad = {
        "",                  // empty
        "(q;q)_",            // dangling index
        "(q;q)_x",           // bad index
        "(q;q)",             // missing underscore
        "(q;z)_2",           // ';' must be followed by q
        "q +",               // dangling operator
        "* q",               // leading operator
        "theta(",            // unclosed call
        "theta(2)",          // arity mismatch: theta takes no argument
        "S()",               // missing argument
        "S(-1)",             // negative m
        "frob(2)",           // unknown builtin
        "q ^ z",             // non-literal exponent
        "(1 + z",            // unclosed paren
        "q # z",             // illegal character
    };
    REQUIRE(bad.size() == 15);
    for (const auto& source : bad) {
        INFO("source: ", source);
        try {
            parse(source);
            FAIL_CHECK("expected ParseError for: ", source);
        } catch (const ParseError& e) {
            CHECK(e.position <= source.size());
            CHECK_FALSE(e.expected.empty());
        }
    }
}

TEST_CASE("eval: theta() at order 3, window [-2,3]") {
    const SeriesContext ctx(3, -2, 3);
    const ZQSeries t = eval_ast(*parse("theta()"), ctx);
    CHECK(t.term_count() == 6);
    CHECK(coeff(t, 0, 0) == 1);
    CHECK(coeff(t, 1, 0) == 1);
    CHECK(coeff(t, -1, 1) == 1);
    CHECK(coeff(t, 2, 1) == 1);
    CHECK(coeff(t, 3, 3) == 1);
    CHECK(coeff(t, -2, 3) == 1);
}

TEST_CASE("eval: (q;q)_3 unrolled") {
    const SeriesContext ctx(6, -1, 1);
    const ZQSeries p = eval_ast(*parse("(q;q)_3"), ctx);
    // (1-q)(1-q^2)(1-q^3) = 1 - q - q^2 + q^4 + q^5 - q^6
    CHECK(coeff(p, 0, 0) == 1);
    CHECK(coeff(p, 0, 1) == -1);
    CHECK(coeff(p, 0, 2) == -1);
    CHECK(coeff(p, 0, 3) == 0);
    CHECK(coeff(p, 0, 4) == 1);
    CHECK(coeff(p, 0, 5) == 1);
    CHECK(coeff(p, 0, 6) == -1);
}

TEST_CASE("eval: S(2) equals P(2)") {
    const SeriesContext ctx(16, -4, 5);
    const ZQSeries lhs = eval_ast(*parse("S(2)"), ctx);
    const ZQSeries rhs = eval_ast(*parse("P(2)"), ctx);
    CHECK(equal_up_to(lhs, rhs, 16).equal);
}

TEST_CASE("eval: negative Pochhammer index and rational literals") {
    const SeriesContext ctx(10, -2, 2);
    const ZQSeries a = eval_ast(*parse("(q^4;q)_-2"), ctx);
    const ZQSeries b = invert(eval_ast(*parse("(q^2;q)_2"), ctx));
    CHECK(a == b);

    const ZQSeries half = eval_ast(*parse("1/2 * z"), ctx);
    CHECK(coeff(half, 1, 0) == make_rational(1, 2));
}

TEST_CASE("eval: division and error paths") {
    const SeriesContext ctx(8, -2, 2);
    const ZQSeries g = eval_ast(*parse("1 / (1 - q)"), ctx);
    for (int k = 0; k <= 8; ++k) CHECK(coeff(g, 0, k) == 1);

    CHECK_THROWS_AS(eval_ast(*parse("(1 + z;q)_2"), ctx), EvalError); // non-monomial base
    CHECK_THROWS_AS(eval_ast(*parse("1 / (q - q)"), ctx), EvalError); // zero divisor
    CHECK_THROWS_AS(eval_ast(*parse("(q;q)_-1"), ctx), PoleError);    // propagated pole
}

TEST_CASE("eval: planner handles negative-order Pochhammer literals") {
    // (-z q^-2;q)_inf * q^3 has internal dips; evaluation at a small order
    // must still be exact. Cross-check against the wide-order build.
    const SeriesContext ctx(6, -3, 3);
    const ExprPtr ast = parse("(-z*q^-2;q)_inf * q^3");
    const ZQSeries direct = eval_ast(*ast, ctx);

    const SeriesContext wide(30, -3, 3);
    const ZQSeries reference = restrict_to(eval_ast(*ast, wide), ctx);
    CHECK(direct == reference);
}

TEST_CASE("eval: hand-written chain steps match the named constructors") {
    // Expressions with explicit z^{-m} prefactors force the evaluator to
    // widen its working window, not just its working order.
    const SeriesContext ctx(16, -5, 6);
    const ZQSeries s3 = eval_ast(*parse("q^6 * z^-3 * (q;q)_3 * (-z*q^-3;q)_inf"), ctx);
    CHECK(equal_up_to(s3, finite_m_product(3, ctx), 16).equal);
    const ZQSeries s4 =
        eval_ast(*parse("q^6 * z^-3 * (q;q)_3 * (-z*q^-3;q)_3 * (-z;q)_inf"), ctx);
    CHECK(equal_up_to(s4, semifinite_sum(3, ctx), 16).equal);
}

TEST_CASE("eval window-doubling stability with z-shifted products") {
    const SeriesContext ctx(12, -4, 4);
    const SeriesContext wide(12, -7, 7);
    for (const char* source : {"z^-2 * q^3 * (-z*q^-2;q)_inf", "z^2 * (-q/z;q)_inf",
                               "(q;q)_2 * z^-1 * E()"}) {
        INFO("source: ", source);
        const ExprPtr ast = parse(source);
        CHECK(eval_ast(*ast, ctx) == restrict_to(eval_ast(*ast, wide), ctx));
    }
}

TEST_CASE("fuzz: random inputs either parse or raise a positioned error") {
    std::mt19937 rng(8191);
    const std::string alphabet = "zq()+-*/^_;,0123456789 infthetaESPplit#\\\"";
    std::uniform_int_distribution<int> len(0, 24);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    for (int i = 0; i < 500; ++i) {
        std::string source;
        const int n = len(rng);
        for (int k = 0; k < n; ++k) source += alphabet[pick(rng)];
        try {
            const ExprPtr ast = parse(source);
            // Whatever parsed must round-trip.
            CHECK(ast_equal(*ast, *parse(pretty_print(*ast))));
        } catch (const ParseError& e) {
            CHECK(e.position <= source.size());
            CHECK_FALSE(e.expected.empty());
        }
    }
}

TEST_CASE("eval is deterministic") {
    const SeriesContext ctx(12, -4, 4);
    const ExprPtr ast = parse("TP() - theta() + E() * (q;q)_2");
    const ZQSeries a = eval_ast(*ast, ctx);
    const ZQSeries b = eval_ast(*ast, ctx);
    CHECK(a == b);
    CHECK(a.terms() == b.terms());
}
