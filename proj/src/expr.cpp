#include "qtriple/expr.hpp"

#include "qtriple/qfunctions.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <sstream>

namespace qtriple::dsl {

// ---------------------------------------------------------------------------
// Lexer

std::vector<Token> tokenize(std::string_view input) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < input.size()) {
        const char c = input[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        switch (c) {
            case '(': out.push_back({TokenKind::LParen, "(", start}); ++i; continue;
            case ')': out.push_back({TokenKind::RParen, ")", start}); ++i; continue;
            case ';': out.push_back({TokenKind::Semi, ";", start}); ++i; continue;
            case '_': out.push_back({TokenKind::Underscore, "_", start}); ++i; continue;
            case '+': out.push_back({TokenKind::Plus, "+", start}); ++i; continue;
            case '-': out.push_back({TokenKind::Minus, "-", start}); ++i; continue;
            case '*': out.push_back({TokenKind::Star, "*", start}); ++i; continue;
            case '/': out.push_back({TokenKind::Slash, "/", start}); ++i; continue;
            case '^': out.push_back({TokenKind::Caret, "^", start}); ++i; continue;
            case ',': out.push_back({TokenKind::Comma, ",", start}); ++i; continue;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string text;
            while (i < input.size() && std::isdigit(static_cast<unsigned char>(input[i])))
                text += input[i++];
            // "p/r" is one rational literal when digits follow the slash.
            if (i + 1 < input.size() && input[i] == '/' &&
                std::isdigit(static_cast<unsigned char>(input[i + 1]))) {
                text += input[i++];
                while (i < input.size() && std::isdigit(static_cast<unsigned char>(input[i])))
                    text += input[i++];
            }
            out.push_back({TokenKind::Number, text, start});
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string text;
            while (i < input.size() &&
                   (std::isalnum(static_cast<unsigned char>(input[i])) || input[i] == '_'))
                text += input[i++];
            if (text == "z") out.push_back({TokenKind::Z, text, start});
            else if (text == "q") out.push_back({TokenKind::Q, text, start});
            else if (text == "inf") out.push_back({TokenKind::Inf, text, start});
            else out.push_back({TokenKind::Ident, text, start});
            continue;
        }
        throw ParseError(start, "unexpected character '" + std::string(1, c) + "' at position " +
                                    std::to_string(start),
                         {"expression"});
    }
    out.push_back({TokenKind::End, "", input.size()});
    return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

const std::map<std::string, std::pair<Builtin, int>>& builtin_table() {
    static const std::map<std::string, std::pair<Builtin, int>> table = {
        {"theta", {Builtin::Theta, 0}}, {"E", {Builtin::EulerE, 0}},
        {"Einv", {Builtin::EulerInv, 0}}, {"S", {Builtin::SemiS, 1}},
        {"Split", {Builtin::Split, 1}}, {"P", {Builtin::FiniteP, 1}},
        {"TP", {Builtin::TripleTP, 0}},
    };
    return table;
}

ExprPtr node(NodeKind kind) {
    auto n = std::make_unique<ExprNode>();
    n->kind = kind;
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view input) : tokens_(tokenize(input)) {}

    ExprPtr parse_all() {
        ExprPtr e = parse_expr();
        expect(TokenKind::End, "end of input");
        return e;
    }

private:
    std::vector<Token> tokens_;
    std::size_t at_ = 0;

    const Token& cur() const { return tokens_[at_]; }
    bool is(TokenKind k) const { return cur().kind == k; }
    Token take() { return tokens_[at_++]; }

    [[noreturn]] void fail(std::vector<std::string> expected) {
        std::ostringstream msg;
        msg << "syntax error at position " << cur().pos << ": unexpected "
            << (cur().kind == TokenKind::End ? "end of input" : "'" + cur().text + "'")
            << ", expected ";
        for (std::size_t i = 0; i < expected.size(); ++i)
            msg << (i ? " | " : "") << expected[i];
        throw ParseError(cur().pos, msg.str(), std::move(expected));
    }

    Token expect(TokenKind k, const std::string& what) {
        if (!is(k)) fail({what});
        return take();
    }

    int parse_int_literal(const std::string& what) {
        bool negative = false;
        if (is(TokenKind::Minus)) {
            take();
            negative = true;
        }
        if (!is(TokenKind::Number)) fail({what});
        const Token t = take();
        if (t.text.find('/') != std::string::npos)
            throw ParseError(t.pos, "expected an integer at position " + std::to_string(t.pos) +
                                        ", got rational '" + t.text + "'",
                             {what});
        long v = 0;
        try {
            v = std::stol(t.text);
        } catch (const std::out_of_range&) {
            v = 1 << 24;
        }
        if (v > (1 << 20))
            throw ParseError(t.pos, "integer literal too large at position " + std::to_string(t.pos),
                             {what});
        return static_cast<int>(negative ? -v : v);
    }

    ExprPtr parse_expr() {
        ExprPtr lhs = parse_term();
        while (is(TokenKind::Plus) || is(TokenKind::Minus)) {
            const bool plus = take().kind == TokenKind::Plus;
            ExprPtr n = node(plus ? NodeKind::Add : NodeKind::Sub);
            n->kids.push_back(std::move(lhs));
            n->kids.push_back(parse_term());
            lhs = std::move(n);
        }
        return lhs;
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_unary();
        while (is(TokenKind::Star) || is(TokenKind::Slash)) {
            const bool star = take().kind == TokenKind::Star;
            ExprPtr n = node(star ? NodeKind::Mul : NodeKind::Div);
            n->kids.push_back(std::move(lhs));
            n->kids.push_back(parse_unary());
            lhs = std::move(n);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (is(TokenKind::Minus)) {
            take();
            ExprPtr n = node(NodeKind::Neg);
            n->kids.push_back(parse_unary());
            return n;
        }
        return parse_factor();
    }

    ExprPtr parse_factor() {
        ExprPtr base = parse_primary();
        if (is(TokenKind::Caret)) {
            take();
            ExprPtr n = node(NodeKind::Pow);
            n->int_arg = parse_int_literal("integer exponent");
            n->kids.push_back(std::move(base));
            return n;
        }
        return base;
    }

    ExprPtr parse_primary() {
        switch (cur().kind) {
            case TokenKind::Number: {
                const Token t = take();
                ExprPtr n = node(NodeKind::Number);
                n->number = rational_from_string(t.text);
                return n;
            }
            case TokenKind::Z: take(); return node(NodeKind::VarZ);
            case TokenKind::Q: take(); return node(NodeKind::VarQ);
            case TokenKind::LParen: {
                take();
                ExprPtr inner = parse_expr();
                if (is(TokenKind::Semi)) {
                    // Pochhammer literal "(expr; q)_index".
                    take();
                    expect(TokenKind::Q, "'q'");
                    expect(TokenKind::RParen, "')'");
                    expect(TokenKind::Underscore, "'_'");
                    ExprPtr n = node(NodeKind::Poch);
                    if (is(TokenKind::Inf)) {
                        take();
                        n->index_is_inf = true;
                    } else {
                        n->int_arg = parse_int_literal("integer or 'inf' index");
                    }
                    n->kids.push_back(std::move(inner));
                    return n;
                }
                expect(TokenKind::RParen, "')' or ';'");
                return inner;
            }
            case TokenKind::Ident: {
                const Token t = take();
                auto it = builtin_table().find(t.text);
                if (it == builtin_table().end())
                    throw ParseError(t.pos, "unknown identifier '" + t.text + "' at position " +
                                                std::to_string(t.pos),
                                     {"theta", "E", "Einv", "S", "Split", "P", "TP", "z", "q"});
                ExprPtr n = node(NodeKind::Call);
                n->builtin = it->second.first;
                expect(TokenKind::LParen, "'('");
                if (it->second.second == 1) {
                    n->int_arg = parse_int_literal("integer argument");
                    if (n->int_arg < 0)
                        throw ParseError(t.pos, "builtin '" + t.text +
                                                    "' requires a nonnegative argument",
                                         {"nonnegative integer"});
                }
                expect(TokenKind::RParen, "')'");
                return n;
            }
            default:
                fail({"number", "'z'", "'q'", "'('", "builtin name"});
        }
    }
};

} // namespace

ExprPtr parse(std::string_view input) {
    return Parser(input).parse_all();
}

// ---------------------------------------------------------------------------
// Printer / structural equality

namespace {

const char* builtin_name(Builtin b) {
    switch (b) {
        case Builtin::Theta: return "theta";
        case Builtin::EulerE: return "E";
        case Builtin::EulerInv: return "Einv";
        case Builtin::SemiS: return "S";
        case Builtin::Split: return "Split";
        case Builtin::FiniteP: return "P";
        case Builtin::TripleTP: return "TP";
    }
    return "?";
}

bool builtin_takes_arg(Builtin b) {
    return b == Builtin::SemiS || b == Builtin::Split || b == Builtin::FiniteP;
}

void print_rec(const ExprNode& n, std::ostream& os) {
    switch (n.kind) {
        case NodeKind::Number: os << to_string(n.number); return;
        case NodeKind::VarZ: os << "z"; return;
        case NodeKind::VarQ: os << "q"; return;
        case NodeKind::Neg:
            os << "-(";
            print_rec(*n.kids[0], os);
            os << ")";
            return;
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul:
        case NodeKind::Div: {
            const char* op = n.kind == NodeKind::Add   ? " + "
                             : n.kind == NodeKind::Sub ? " - "
                             : n.kind == NodeKind::Mul ? " * "
                                                       : " / ";
            os << "(";
            print_rec(*n.kids[0], os);
            os << op;
            print_rec(*n.kids[1], os);
            os << ")";
            return;
        }
        case NodeKind::Pow:
            os << "(";
            print_rec(*n.kids[0], os);
            os << ")^" << n.int_arg;
            return;
        case NodeKind::Poch:
            os << "(";
            print_rec(*n.kids[0], os);
            os << ";q)_";
            if (n.index_is_inf) os << "inf";
            else os << n.int_arg;
            return;
        case NodeKind::Call:
            os << builtin_name(n.builtin) << "(";
            if (builtin_takes_arg(n.builtin)) os << n.int_arg;
            os << ")";
            return;
    }
}

} // namespace

std::string pretty_print(const ExprNode& ast) {
    std::ostringstream os;
    print_rec(ast, os);
    return os.str();
}

bool ast_equal(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
    switch (a.kind) {
        case NodeKind::Number:
            if (a.number != b.number) return false;
            break;
        case NodeKind::Pow:
            if (a.int_arg != b.int_arg) return false;
            break;
        case NodeKind::Poch:
            if (a.index_is_inf != b.index_is_inf) return false;
            if (!a.index_is_inf && a.int_arg != b.int_arg) return false;
            break;
        case NodeKind::Call:
            if (a.builtin != b.builtin || a.int_arg != b.int_arg) return false;
            break;
        default:
            break;
    }
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!ast_equal(*a.kids[i], *b.kids[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Order planning

namespace {

// Tries to collapse a subexpression into a single monomial, the form a
// Pochhammer base must take.
std::optional<Monomial> fold_monomial(const ExprNode& n) {
    switch (n.kind) {
        case NodeKind::Number: return mono(n.number);
        case NodeKind::VarZ: return mono(1, 1, 0);
        case NodeKind::VarQ: return mono(1, 0, 1);
        case NodeKind::Neg: {
            auto k = fold_monomial(*n.kids[0]);
            if (!k) return std::nullopt;
            k->coeff = -k->coeff;
            return k;
        }
        case NodeKind::Mul: {
            auto a = fold_monomial(*n.kids[0]);
            auto b = fold_monomial(*n.kids[1]);
            if (!a || !b) return std::nullopt;
            return mono(a->coeff * b->coeff, a->z_exp + b->z_exp, a->q_exp + b->q_exp);
        }
        case NodeKind::Div: {
            auto a = fold_monomial(*n.kids[0]);
            auto b = fold_monomial(*n.kids[1]);
            if (!a || !b || b->coeff == 0) return std::nullopt;
            return mono(a->coeff / b->coeff, a->z_exp - b->z_exp, a->q_exp - b->q_exp);
        }
        case NodeKind::Pow: {
            auto a = fold_monomial(*n.kids[0]);
            if (!a) return std::nullopt;
            if (a->coeff == 0) return n.int_arg == 0 ? std::optional<Monomial>(mono(1)) : a;
            Rational c(1);
            const int e = n.int_arg;
            const int steps = e >= 0 ? e : -e;
            for (int i = 0; i < steps; ++i) c *= a->coeff;
            if (e < 0) c = Rational(1) / c;
            return mono(c, a->z_exp * e, a->q_exp * e);
        }
        default:
            return std::nullopt;
    }
}

struct OrderPlan {
    int mu;   // lower bound on the min attainable q-order within the window
    int mass; // extra working order this subtree needs
};

int dip(const OrderPlan& p) { return std::max(0, -p.mu); }

// Min attainable q-order of (base;q)_index within the window: sum of the
// most negative factor exponents reachable by z picks.
int poch_mu(const Monomial& base, std::optional<int> index, const Window& w) {
    if (base.coeff == 0 || base.q_exp >= 0) {
        // Negative finite index may still dip: exponents base.q_exp - i.
        if (index && *index < 0) {
            int b = 0;
            const long cap = base.z_exp > 0   ? w.z_max / base.z_exp
                             : base.z_exp < 0 ? w.z_min / base.z_exp
                                              : -*index;
            long picks = 0;
            for (int i = -*index; i >= 1 && picks < cap; --i) {
                if (base.q_exp - i < 0) {
                    b += i - base.q_exp;
                    ++picks;
                }
            }
            return -b;
        }
        return 0;
    }
    const int neg_count = index && *index >= 0 ? std::min(*index, -base.q_exp) : -base.q_exp;
    const long cap = base.z_exp > 0   ? w.z_max / base.z_exp
                     : base.z_exp < 0 ? w.z_min / base.z_exp
                                      : neg_count;
    long b = 0;
    for (long t = 0; t < cap && t < neg_count; ++t) {
        const long v = -base.q_exp - t;
        if (v <= 0) break;
        b += v;
    }
    return static_cast<int>(-b);
}

OrderPlan plan_rec(const ExprNode& n, const Window& w) {
    switch (n.kind) {
        case NodeKind::Number: return {0, 0};
        case NodeKind::VarZ: return {0, 0};
        case NodeKind::VarQ: return {1, 0};
        case NodeKind::Neg: return plan_rec(*n.kids[0], w);
        case NodeKind::Add:
        case NodeKind::Sub: {
            const OrderPlan a = plan_rec(*n.kids[0], w);
            const OrderPlan b = plan_rec(*n.kids[1], w);
            return {std::min(a.mu, b.mu), std::max(a.mass, b.mass)};
        }
        case NodeKind::Mul: {
            const OrderPlan a = plan_rec(*n.kids[0], w);
            const OrderPlan b = plan_rec(*n.kids[1], w);
            return {a.mu + b.mu, std::max(a.mass + dip(b), b.mass + dip(a))};
        }
        case NodeKind::Div: {
            const OrderPlan a = plan_rec(*n.kids[0], w);
            const OrderPlan b = plan_rec(*n.kids[1], w);
            // The divisor's leading q-order is at most max(0, mu_b) deeper
            // than the surface; inverting also flips the dip.
            const OrderPlan inv_b{-std::max(0, b.mu), b.mass + std::max(0, b.mu) + dip(b)};
            return {a.mu + inv_b.mu, std::max(a.mass + dip(inv_b), inv_b.mass + dip(a))};
        }
        case NodeKind::Pow: {
            const OrderPlan a = plan_rec(*n.kids[0], w);
            const int e = n.int_arg;
            if (e >= 0) return {a.mu * e, e * (a.mass + dip(a))};
            const OrderPlan powed{a.mu * -e, -e * (a.mass + dip(a))};
            return {-std::max(0, powed.mu), powed.mass + std::max(0, powed.mu) + dip(powed)};
        }
        case NodeKind::Poch: {
            auto base = fold_monomial(*n.kids[0]);
            if (!base) return {0, 0}; // eval will reject it anyway
            const std::optional<int> index =
                n.index_is_inf ? std::nullopt : std::optional<int>(n.int_arg);
            const int mu = poch_mu(*base, index, w);
            return {mu, std::max(0, -mu)};
        }
        case NodeKind::Call:
            return {0, 0}; // named constructors are exact at any requested context
    }
    return {0, 0};
}

} // namespace

int negative_order_mass(const ExprNode& ast, const Window& window) {
    return plan_rec(ast, window).mass;
}

int z_shift_mass(const ExprNode& n) {
    if (auto m = fold_monomial(n)) return std::abs(m->z_exp);
    switch (n.kind) {
        case NodeKind::Neg: return z_shift_mass(*n.kids[0]);
        case NodeKind::Add:
        case NodeKind::Sub:
            return std::max(z_shift_mass(*n.kids[0]), z_shift_mass(*n.kids[1]));
        case NodeKind::Mul:
        case NodeKind::Div:
            return z_shift_mass(*n.kids[0]) + z_shift_mass(*n.kids[1]);
        case NodeKind::Pow:
            return std::abs(n.int_arg) * z_shift_mass(*n.kids[0]);
        case NodeKind::Poch: {
            // A finite symbol displaces by its full support width; infinite
            // and negative-index symbols are the unbounded consumers of the
            // extension, not producers.
            if (n.index_is_inf || n.int_arg < 0) return 0;
            auto base = fold_monomial(*n.kids[0]);
            return base ? n.int_arg * std::abs(base->z_exp) : 0;
        }
        default:
            return 0;
    }
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

ZQSeries eval_rec(const ExprNode& n, const SeriesContext& ctx) {
    switch (n.kind) {
        case NodeKind::Number: return make_monomial(mono(n.number), ctx);
        case NodeKind::VarZ: return make_monomial(mono(1, 1, 0), ctx);
        case NodeKind::VarQ: return make_monomial(mono(1, 0, 1), ctx);
        case NodeKind::Neg: return negate(eval_rec(*n.kids[0], ctx));
        case NodeKind::Add: return add(eval_rec(*n.kids[0], ctx), eval_rec(*n.kids[1], ctx));
        case NodeKind::Sub: return sub(eval_rec(*n.kids[0], ctx), eval_rec(*n.kids[1], ctx));
        case NodeKind::Mul: return mul(eval_rec(*n.kids[0], ctx), eval_rec(*n.kids[1], ctx));
        case NodeKind::Div: {
            const ZQSeries denom = eval_rec(*n.kids[1], ctx);
            try {
                return mul(eval_rec(*n.kids[0], ctx), invert(denom));
            } catch (const NonInvertibleError& e) {
                throw EvalError(std::string("non-invertible divisor: ") + e.what());
            }
        }
        case NodeKind::Pow: {
            const int e = n.int_arg;
            if (e == 0) return ZQSeries::unit(ctx);
            ZQSeries base = eval_rec(*n.kids[0], ctx);
            ZQSeries acc = base;
            for (int i = 1; i < std::abs(e); ++i) acc = mul(acc, base);
            if (e < 0) {
                try {
                    return invert(acc);
                } catch (const NonInvertibleError& err) {
                    throw EvalError(std::string("non-invertible power base: ") + err.what());
                }
            }
            return acc;
        }
        case NodeKind::Poch: {
            auto base = fold_monomial(*n.kids[0]);
            if (!base)
                throw EvalError("Pochhammer base does not evaluate to a monomial: " +
                                pretty_print(*n.kids[0]));
            if (n.index_is_inf) return pochhammer_inf(*base, ctx);
            return pochhammer_finite(*base, n.int_arg, ctx);
        }
        case NodeKind::Call: {
            switch (n.builtin) {
                case Builtin::Theta: return theta_bilateral(ctx);
                case Builtin::EulerE: return euler_qexp_series(ctx);
                case Builtin::EulerInv: return euler_inverse_series(ctx);
                case Builtin::SemiS: return semifinite_sum(n.int_arg, ctx);
                case Builtin::Split: return semifinite_split(n.int_arg, ctx);
                case Builtin::FiniteP: return finite_m_product(n.int_arg, ctx);
                case Builtin::TripleTP: return triple_product_lhs(ctx);
            }
            throw EvalError("unknown builtin");
        }
    }
    throw EvalError("unknown AST node");
}

} // namespace

ZQSeries eval_ast(const ExprNode& ast, const SeriesContext& ctx) {
    const int shift = z_shift_mass(ast);
    const int mass =
        negative_order_mass(ast, Window{ctx.z_min - shift, ctx.z_max + shift});
    const SeriesContext work = ctx.widened(mass, shift, shift);
    return restrict_to(eval_rec(ast, work), ctx);
}

SeriesExpr expr_from_ast(std::shared_ptr<const ExprNode> ast, std::string label) {
    return SeriesExpr{
        std::move(label),
        [ast](const SeriesContext& ctx) { return eval_ast(*ast, ctx); },
        [ast](const Window& w) { return negative_order_mass(*ast, w); },
    };
}

} // namespace qtriple::dsl
