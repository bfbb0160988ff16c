#pragma once

#include "qtriple/series.hpp"
#include "qtriple/verifier.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace qtriple::dsl {

enum class TokenKind {
    Number, Ident, Z, Q, Inf,
    LParen, RParen, Semi, Underscore,
    Plus, Minus, Star, Slash, Caret, Comma,
    End,
};

struct Token {
    TokenKind kind;
    std::string text;
    std::size_t pos; // byte offset into the input
};

struct ParseError : std::runtime_error {
    ParseError(std::size_t position_, std::string message,
               std::vector<std::string> expected_ = {})
        : std::runtime_error(std::move(message)), position(position_),
          expected(std::move(expected_)) {}
    std::size_t position;
    std::vector<std::string> expected;
};

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<Token> tokenize(std::string_view input); // throws ParseError

enum class NodeKind { Number, VarZ, VarQ, Neg, Add, Sub, Mul, Div, Pow, Poch, Call };

enum class Builtin { Theta, EulerE, EulerInv, SemiS, Split, FiniteP, TripleTP };

struct ExprNode;
using ExprPtr = std::unique_ptr<ExprNode>;

struct ExprNode {
    NodeKind kind;
    Rational number;          // Number
    int int_arg = 0;          // Pow exponent, finite Poch index, builtin m
    bool index_is_inf = false; // Poch
    Builtin builtin{};        // Call
    std::vector<ExprPtr> kids;
};

/// Grammar:
///   expr    := term (('+'|'-') term)*
///   term    := unary (('*'|'/') unary)*
///   unary   := '-' unary | factor
///   factor  := primary ('^' int)?
///   primary := number | 'z' | 'q'
///            | '(' expr ';' 'q' ')' '_' (int | 'inf')
///            | '(' expr ')'
///            | ident '(' args? ')'
/// A Pochhammer literal is told apart from a parenthesized expression by
/// the ';' after the inner expression. Number literals accept "p" and "p/r".
ExprPtr parse(std::string_view input); // throws ParseError

std::string pretty_print(const ExprNode& ast);
bool ast_equal(const ExprNode& a, const ExprNode& b);

/// Conservative bound on how far below q^0 the expression's construction
/// dips inside the window; evaluation adds it to the requested order.
int negative_order_mass(const ExprNode& ast, const Window& window);

/// Total bounded z-displacement of the expression's factors (monomial
/// shifts and finite Pochhammer supports); evaluation widens the window by
/// it so shifted products stay exact inside the requested window.
int z_shift_mass(const ExprNode& ast);

/// Evaluates at a working context elevated by the expression's
/// negative-order mass and widened by its z-shift mass, then restricts to
/// the requested context.
ZQSeries eval_ast(const ExprNode& ast, const SeriesContext& ctx);

/// Wraps a parsed expression for the verifier.
SeriesExpr expr_from_ast(std::shared_ptr<const ExprNode> ast, std::string label);

} // namespace qtriple::dsl
