#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phibvp/errors.hpp"

// Expression language for right-hand sides f(t, x, v).
//
//   expr    = term , { ("+" | "-") , term } ;
//   term    = unary , { ("*" | "/") , unary } ;
//   unary   = ("-" | "+") , unary | power ;
//   power   = primary , [ ("^" | "**") , unary ] ;     (right associative)
//   primary = number | "t" | "x" | "v" | func , "(" , expr , ")" | "(" , expr , ")" ;
//   func    = "sin" | "cos" | "exp" | "log" | "sqrt" | "abs" | "sign" ;
//   number  = digits , [ "." , [digits] ] , [ ("e" | "E") , ["+" | "-"] , digits ]
//           | "." , digits , [ exponent ] ;
//
// Unary minus binds looser than "^", so -2^2 == -4.

namespace phibvp::expr {

enum class Var : std::uint8_t { T, X, V };

enum class Op : std::uint8_t {
    // unary
    Neg, Abs, Sign, Sin, Cos, Exp, Log, Sqrt,
    // binary
    Add, Sub, Mul, Div, Pow,
};

enum class Kind : std::uint8_t { Number, Variable, Unary, Binary };

struct Node {
    Kind kind = Kind::Number;
    Op op = Op::Add;
    Var var = Var::T;
    double value = 0.0;
    int lhs = -1;  // child index for Unary and Binary
    int rhs = -1;
    std::size_t position = 0;  // byte offset in the source
};

/**
 * Immutable expression tree stored as a flat node array; `root` indexes into
 * `nodes`. Equality compares structure and values, not source positions.
 */
class Ast {
public:
    Ast() = default;

    double eval(double t, double x, double v) const { return eval_node(root_, t, x, v); }

    std::span<const Node> nodes() const { return nodes_; }
    int root() const { return root_; }
    bool empty() const { return nodes_.empty(); }

    bool uses(Var var) const {
        for (const Node& n : nodes_) {
            if (n.kind == Kind::Variable && n.var == var) return true;
        }
        return false;
    }

    friend bool operator==(const Ast& a, const Ast& b) {
        return same_subtree(a, a.root_, b, b.root_);
    }

private:
    friend class Parser;

    static bool same_subtree(const Ast& a, int ia, const Ast& b, int ib) {
        if (ia < 0 || ib < 0) return ia == ib;
        const Node& na = a.nodes_[ia];
        const Node& nb = b.nodes_[ib];
        if (na.kind != nb.kind) return false;
        switch (na.kind) {
            case Kind::Number: return na.value == nb.value;
            case Kind::Variable: return na.var == nb.var;
            case Kind::Unary: return na.op == nb.op && same_subtree(a, na.lhs, b, nb.lhs);
            case Kind::Binary:
                return na.op == nb.op && same_subtree(a, na.lhs, b, nb.lhs) &&
                       same_subtree(a, na.rhs, b, nb.rhs);
        }
        return false;
    }

    double eval_node(int i, double t, double x, double v) const {
        const Node& n = nodes_[i];
        switch (n.kind) {
            case Kind::Number: return n.value;
            case Kind::Variable: return n.var == Var::T ? t : (n.var == Var::X ? x : v);
            case Kind::Unary: return apply_unary(n, eval_node(n.lhs, t, x, v));
            case Kind::Binary:
                return apply_binary(n, eval_node(n.lhs, t, x, v), eval_node(n.rhs, t, x, v));
        }
        return 0.0;
    }

    static double apply_unary(const Node& n, double a) {
        switch (n.op) {
            case Op::Neg: return -a;
            case Op::Abs: return std::abs(a);
            case Op::Sign: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
            case Op::Sin: return std::sin(a);
            case Op::Cos: return std::cos(a);
            case Op::Exp: {
                const double r = std::exp(a);
                if (!std::isfinite(r)) throw DomainError("exp overflow", n.position);
                return r;
            }
            case Op::Log:
                if (!(a > 0.0)) throw DomainError("log of non-positive value", n.position);
                return std::log(a);
            case Op::Sqrt:
                if (a < 0.0) throw DomainError("sqrt of negative value", n.position);
                return std::sqrt(a);
            default: break;
        }
        return a;
    }

    static double apply_binary(const Node& n, double a, double b) {
        switch (n.op) {
            case Op::Add: return a + b;
            case Op::Sub: return a - b;
            case Op::Mul: return a * b;
            case Op::Div:
                if (b == 0.0) throw DomainError("division by zero", n.position);
                return a / b;
            case Op::Pow: {
                if (a < 0.0 && b != std::floor(b)) {
                    throw DomainError("negative base with non-integer exponent", n.position);
                }
                if (a == 0.0 && b < 0.0) throw DomainError("division by zero", n.position);
                const double r = std::pow(a, b);
                if (!std::isfinite(r)) throw DomainError("pow overflow", n.position);
                return r;
            }
            default: break;
        }
        return a;
    }

    std::vector<Node> nodes_;
    int root_ = -1;
};

inline const char* op_name(Op op) {
    switch (op) {
        case Op::Neg: return "-";
        case Op::Abs: return "abs";
        case Op::Sign: return "sign";
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Exp: return "exp";
        case Op::Log: return "log";
        case Op::Sqrt: return "sqrt";
        case Op::Add: return "+";
        case Op::Sub: return "-";
        case Op::Mul: return "*";
        case Op::Div: return "/";
        case Op::Pow: return "^";
    }
    return "?";
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Ast parse() {
        skip_ws();
        if (pos_ >= src_.size()) fail(pos_, "expected an expression");
        const int root = parse_expr();
        skip_ws();
        if (pos_ < src_.size()) fail(pos_, "expected operator or end of input");
        ast_.root_ = root;
        return std::move(ast_);
    }

private:
    [[noreturn]] void fail(std::size_t at, const std::string& message) const {
        throw ParseError(at, message, token_at(at));
    }

    // Text of the token starting at `at`, used for error messages.
    std::string token_at(std::size_t at) const {
        if (at >= src_.size()) return {};
        const auto c = static_cast<unsigned char>(src_[at]);
        std::size_t end = at + 1;
        if (std::isalpha(c) || c == '_') {
            while (end < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
                ++end;
            }
        } else if (std::isdigit(c) || c == '.') {
            while (end < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[end])) || src_[end] == '.')) {
                ++end;
            }
        }
        return std::string(src_.substr(at, end - at));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    int add(Node n) {
        ast_.nodes_.push_back(n);
        return static_cast<int>(ast_.nodes_.size()) - 1;
    }

    int binary(Op op, int l, int r, std::size_t at) {
        Node n;
        n.kind = Kind::Binary;
        n.op = op;
        n.lhs = l;
        n.rhs = r;
        n.position = at;
        return add(n);
    }

    int unary(Op op, int child, std::size_t at) {
        Node n;
        n.kind = Kind::Unary;
        n.op = op;
        n.lhs = child;
        n.position = at;
        return add(n);
    }

    int parse_expr() {
        int lhs = parse_term();
        while (true) {
            skip_ws();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
                const std::size_t at = pos_;
                const Op op = src_[pos_] == '+' ? Op::Add : Op::Sub;
                ++pos_;
                lhs = binary(op, lhs, parse_term(), at);
            } else {
                return lhs;
            }
        }
    }

    int parse_term() {
        int lhs = parse_unary();
        while (true) {
            skip_ws();
            if (pos_ < src_.size() && (src_[pos_] == '*' || src_[pos_] == '/') &&
                !(src_[pos_] == '*' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*')) {
                const std::size_t at = pos_;
                const Op op = src_[pos_] == '*' ? Op::Mul : Op::Div;
                ++pos_;
                lhs = binary(op, lhs, parse_unary(), at);
            } else {
                return lhs;
            }
        }
    }

    int parse_unary() {
        skip_ws();
        if (++depth_ > kMaxDepth) fail(pos_, "expression nested too deeply");
        struct Leave {
            int& d;
            ~Leave() { --d; }
        } leave{depth_};
        if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
            const std::size_t at = pos_;
            const bool neg = src_[pos_] == '-';
            ++pos_;
            const int child = parse_unary();
            return neg ? unary(Op::Neg, child, at) : child;
        }
        return parse_power();
    }

    int parse_power() {
        const int base = parse_primary();
        skip_ws();
        if (pos_ < src_.size()) {
            std::size_t len = 0;
            if (src_[pos_] == '^') {
                len = 1;
            } else if (src_.substr(pos_, 2) == "**") {
                len = 2;
            }
            if (len > 0) {
                const std::size_t at = pos_;
                pos_ += len;
                return binary(Op::Pow, base, parse_unary(), at);
            }
        }
        return base;
    }

    int parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail(pos_, "expected number, variable, function or '('");
        const char c = src_[pos_];
        const std::size_t at = pos_;
        if (c == '(') {
            ++pos_;
            const int inner = parse_expr();
            if (!peek(')')) fail(pos_, "expected ')'");
            ++pos_;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
                ++end;
            }
            const std::string_view name = src_.substr(pos_, end - pos_);
            if (name == "t" || name == "x" || name == "v") {
                pos_ = end;
                Node n;
                n.kind = Kind::Variable;
                n.var = name == "t" ? Var::T : (name == "x" ? Var::X : Var::V);
                n.position = at;
                return add(n);
            }
            static constexpr std::pair<std::string_view, Op> kFunctions[] = {
                {"sin", Op::Sin},   {"cos", Op::Cos}, {"exp", Op::Exp},   {"log", Op::Log},
                {"sqrt", Op::Sqrt}, {"abs", Op::Abs}, {"sign", Op::Sign},
            };
            for (const auto& [fname, op] : kFunctions) {
                if (name != fname) continue;
                pos_ = end;
                if (!peek('(')) fail(pos_, "expected '(' after function name");
                ++pos_;
                const int arg = parse_expr();
                if (!peek(')')) fail(pos_, "expected ')'");
                ++pos_;
                return unary(op, arg, at);
            }
            fail(at, "unknown identifier (variables are t, x, v)");
        }
        fail(at, "expected number, variable, function or '('");
    }

    int parse_number() {
        const std::size_t at = pos_;
        std::size_t end = pos_;
        auto digits = [&] {
            const std::size_t start = end;
            while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
            return end - start;
        };
        std::size_t mantissa = digits();
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            mantissa += digits();
        }
        if (mantissa == 0) fail(at, "malformed number");
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            ++end;
            if (end < src_.size() && (src_[end] == '+' || src_[end] == '-')) ++end;
            if (digits() == 0) fail(end, "expected exponent digits");
        }
        double value = 0.0;
        const auto res = std::from_chars(src_.data() + at, src_.data() + end, value);
        if (res.ec != std::errc{} || !std::isfinite(value)) fail(at, "number out of range");
        pos_ = end;
        Node n;
        n.kind = Kind::Number;
        n.value = value;
        n.position = at;
        return add(n);
    }

    static constexpr int kMaxDepth = 256;

    std::string_view src_;
    std::size_t pos_ = 0;
    int depth_ = 0;
    Ast ast_;
};

inline Ast parse(std::string_view src) { return Parser(src).parse(); }

inline double eval(const Ast& ast, double t, double x, double v) { return ast.eval(t, x, v); }

namespace detail {

inline void print_node(const Ast& ast, int i, std::string& out) {
    const Node& n = ast.nodes()[i];
    switch (n.kind) {
        case Kind::Number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            return;
        }
        case Kind::Variable: out += n.var == Var::T ? 't' : (n.var == Var::X ? 'x' : 'v'); return;
        case Kind::Unary:
            if (n.op == Op::Neg) {
                out += "(-";
                print_node(ast, n.lhs, out);
                out += ')';
            } else {
                out += op_name(n.op);
                out += '(';
                print_node(ast, n.lhs, out);
                out += ')';
            }
            return;
        case Kind::Binary:
            out += '(';
            print_node(ast, n.lhs, out);
            out += ' ';
            out += op_name(n.op);
            out += ' ';
            print_node(ast, n.rhs, out);
            out += ')';
            return;
    }
}

}  // namespace detail

// Fully parenthesized rendering; parse(to_string(a)) == a.
inline std::string to_string(const Ast& ast) {
    std::string out;
    if (!ast.empty()) detail::print_node(ast, ast.root(), out);
    return out;
}

}  // namespace phibvp::expr
