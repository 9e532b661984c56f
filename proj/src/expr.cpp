#include "abflux/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "abflux/errors.hpp"

namespace abflux::expr {

namespace {

// value + first derivatives w.r.t. (r, theta)
struct Dual {
    double v = 0.0, dr = 0.0, dt = 0.0;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.dr + b.dr, a.dt + b.dt}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.dr - b.dr, a.dt - b.dt}; }
Dual operator-(Dual a) { return {-a.v, -a.dr, -a.dt}; }
Dual operator*(Dual a, Dual b) {
    return {a.v * b.v, a.dr * b.v + a.v * b.dr, a.dt * b.v + a.v * b.dt};
}
Dual operator/(Dual a, Dual b) {
    double inv = 1.0 / b.v;
    double q = a.v * inv;
    return {q, (a.dr - q * b.dr) * inv, (a.dt - q * b.dt) * inv};
}
Dual dsin(Dual a) { return {std::sin(a.v), std::cos(a.v) * a.dr, std::cos(a.v) * a.dt}; }
Dual dcos(Dual a) { return {std::cos(a.v), -std::sin(a.v) * a.dr, -std::sin(a.v) * a.dt}; }
Dual dpow(Dual a, double p) {
    double f = std::pow(a.v, p);
    double g = p * std::pow(a.v, p - 1.0);
    return {f, g * a.dr, g * a.dt};
}

enum class Op { kConst, kVarR, kVarTheta, kAdd, kSub, kMul, kDiv, kNeg, kSin, kCos, kPow };

}  // namespace

struct Node {
    Op op;
    double constant = 0.0;  // kConst value or kPow exponent
    NodePtr a, b;
};

namespace {

Dual eval_dual(const Node* n, double r, double theta) {
    switch (n->op) {
        case Op::kConst: return {n->constant, 0.0, 0.0};
        case Op::kVarR: return {r, 1.0, 0.0};
        case Op::kVarTheta: return {theta, 0.0, 1.0};
        case Op::kAdd: return eval_dual(n->a.get(), r, theta) + eval_dual(n->b.get(), r, theta);
        case Op::kSub: return eval_dual(n->a.get(), r, theta) - eval_dual(n->b.get(), r, theta);
        case Op::kMul: return eval_dual(n->a.get(), r, theta) * eval_dual(n->b.get(), r, theta);
        case Op::kDiv: return eval_dual(n->a.get(), r, theta) / eval_dual(n->b.get(), r, theta);
        case Op::kNeg: return -eval_dual(n->a.get(), r, theta);
        case Op::kSin: return dsin(eval_dual(n->a.get(), r, theta));
        case Op::kCos: return dcos(eval_dual(n->a.get(), r, theta));
        case Op::kPow: return dpow(eval_dual(n->a.get(), r, theta), n->constant);
    }
    return {};
}

class Parser {
public:
    explicit Parser(const std::string& s) : src_(s) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != src_.size())
            throw InputError("expr: trailing input at position " + std::to_string(pos_));
        return e;
    }

private:
    const std::string& src_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace((unsigned char)src_[pos_])) ++pos_;
    }
    bool consume(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (consume('+'))
                lhs = NodePtr(new Node{Op::kAdd, 0.0, lhs, term()});
            else if (consume('-'))
                lhs = NodePtr(new Node{Op::kSub, 0.0, lhs, term()});
            else
                return lhs;
        }
    }
    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (consume('*'))
                lhs = NodePtr(new Node{Op::kMul, 0.0, lhs, factor()});
            else if (consume('/'))
                lhs = NodePtr(new Node{Op::kDiv, 0.0, lhs, factor()});
            else
                return lhs;
        }
    }
    NodePtr factor() {
        if (consume('-')) return NodePtr(new Node{Op::kNeg, 0.0, factor(), nullptr});
        return primary();
    }
    NodePtr primary() {
        skip_ws();
        if (consume('(')) {
            NodePtr e = expr();
            if (!consume(')')) throw InputError("expr: expected ')'");
            return e;
        }
        char c = peek();
        if (std::isdigit((unsigned char)c) || c == '.') return number_node();
        if (std::isalpha((unsigned char)c)) {
            std::string ident = identifier();
            if (ident == "r") return NodePtr(new Node{Op::kVarR, 0.0, nullptr, nullptr});
            if (ident == "theta") return NodePtr(new Node{Op::kVarTheta, 0.0, nullptr, nullptr});
            if (ident == "sin" || ident == "cos") {
                if (!consume('(')) throw InputError("expr: expected '(' after " + ident);
                NodePtr a = expr();
                if (!consume(')')) throw InputError("expr: expected ')'");
                return NodePtr(new Node{ident == "sin" ? Op::kSin : Op::kCos, 0.0, a, nullptr});
            }
            if (ident == "pow") {
                if (!consume('(')) throw InputError("expr: expected '(' after pow");
                NodePtr a = expr();
                if (!consume(',')) throw InputError("expr: pow needs a constant exponent");
                double p = number_value();
                if (!consume(')')) throw InputError("expr: expected ')'");
                return NodePtr(new Node{Op::kPow, p, a, nullptr});
            }
            throw InputError("expr: unknown identifier '" + ident + "'");
        }
        throw InputError("expr: unexpected character at position " + std::to_string(pos_));
    }
    std::string identifier() {
        skip_ws();
        size_t b = pos_;
        while (pos_ < src_.size() && std::isalpha((unsigned char)src_[pos_])) ++pos_;
        return src_.substr(b, pos_ - b);
    }
    double number_value() {
        skip_ws();
        bool neg = consume('-');
        const char* begin = src_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw InputError("expr: expected a number");
        pos_ += (size_t)(end - begin);
        return neg ? -v : v;
    }
    NodePtr number_node() {
        return NodePtr(new Node{Op::kConst, number_value(), nullptr, nullptr});
    }
};

}  // namespace

NodePtr parse(const std::string& source) { return Parser(source).run(); }

double eval(const NodePtr& n, double r, double theta) {
    return eval_dual(n.get(), r, theta).v;
}

void eval_with_gradient(const NodePtr& n, double r, double theta, double* value,
                        double* d_r, double* d_theta) {
    Dual d = eval_dual(n.get(), r, theta);
    if (value) *value = d.v;
    if (d_r) *d_r = d.dr;
    if (d_theta) *d_theta = d.dt;
}

}  // namespace abflux::expr
