#pragma once

#include <cstdio>
#include <memory>
#include <string>
#include <utility>

#include "dn/errors.hpp"
#include "dn/value.hpp"

namespace dn {

/// Immutable closed-form expression tree over one complex variable.
///
/// Node set: constant, variable, + - * /, integer power, exp, sin, cos, and
/// affine substitution of the variable. Trees are shared, never mutated, and
/// evaluation is a deterministic recursive walk, so expressions are safe to
/// evaluate from any number of threads.
class Expr {
public:
    enum class Kind {
        constant,
        variable,
        add,
        sub,
        mul,
        div,
        ipow,
        exp_fn,
        sin_fn,
        cos_fn,
        affine, // child evaluated at scale*z + offset
    };

    Expr() : Expr(constant(0.0)) {}

    static Expr constant(Complex c) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::constant;
        n->value = c;
        return wrap(std::move(n));
    }
    static Expr constant(double c) { return constant(Complex(c, 0.0)); }

    static Expr var() {
        auto n = std::make_shared<Node>();
        n->kind = Kind::variable;
        return wrap(std::move(n));
    }

    friend Expr operator+(const Expr& a, const Expr& b) { return binary(Kind::add, a, b); }
    friend Expr operator-(const Expr& a, const Expr& b) { return binary(Kind::sub, a, b); }
    friend Expr operator*(const Expr& a, const Expr& b) { return binary(Kind::mul, a, b); }
    friend Expr operator/(const Expr& a, const Expr& b) { return binary(Kind::div, a, b); }
    friend Expr operator-(const Expr& a) { return constant(0.0) - a; }

    friend Expr pow(const Expr& base, long long n) {
        auto node = std::make_shared<Node>();
        node->kind = Kind::ipow;
        node->a = base.node_;
        node->exponent = n;
        return wrap(std::move(node));
    }

    friend Expr exp(const Expr& a) { return unary(Kind::exp_fn, a); }
    friend Expr sin(const Expr& a) { return unary(Kind::sin_fn, a); }
    friend Expr cos(const Expr& a) { return unary(Kind::cos_fn, a); }

    /// Tree evaluating to this expression at scale*z + offset. Applying it to
    /// an already substituted tree composes the two affine maps into one node.
    Expr with_affine_arg(Complex scale, Complex offset) const {
        if (node_->kind == Kind::affine) {
            // inner map z -> s1*z + o1 applied after outer z -> s2*z + o2:
            // child sees s1*(s2*z + o2) + o1
            auto n = std::make_shared<Node>();
            n->kind = Kind::affine;
            n->a = node_->a;
            n->value = node_->value * scale; // composed scale
            n->offset = node_->value * offset + node_->offset;
            return wrap(std::move(n));
        }
        auto n = std::make_shared<Node>();
        n->kind = Kind::affine;
        n->a = node_;
        n->value = scale;
        n->offset = offset;
        return wrap(std::move(n));
    }

    /// z -> z + c, exact on the tree: eval(shifted(c), z) == eval(z + c).
    Expr shifted(Complex c) const { return with_affine_arg(Complex(1.0, 0.0), c); }

    /// Rewrites z = t/eps: the result, read as a function of t, equals this
    /// expression at t/eps. Rejects eps = 0.
    Expr scaled_arg(Complex eps) const {
        if (eps == Complex(0.0, 0.0)) throw Error("scaled_arg: eps must be nonzero");
        return with_affine_arg(Complex(1.0, 0.0) / eps, Complex(0.0, 0.0));
    }

    Value operator()(Complex z) const { return eval_node(*node_, z); }

    /// Exact symbolic derivative tree.
    Expr derivative() const {
        const Node& n = *node_;
        switch (n.kind) {
            case Kind::constant: return constant(0.0);
            case Kind::variable: return constant(1.0);
            case Kind::add: return wrap(n.a).derivative() + wrap(n.b).derivative();
            case Kind::sub: return wrap(n.a).derivative() - wrap(n.b).derivative();
            case Kind::mul:
                return wrap(n.a).derivative() * wrap(n.b) + wrap(n.a) * wrap(n.b).derivative();
            case Kind::div:
                return (wrap(n.a).derivative() * wrap(n.b) - wrap(n.a) * wrap(n.b).derivative()) /
                       pow(wrap(n.b), 2);
            case Kind::ipow:
                if (n.exponent == 0) return constant(0.0);
                return constant(Complex(static_cast<double>(n.exponent), 0.0)) *
                       pow(wrap(n.a), n.exponent - 1) * wrap(n.a).derivative();
            case Kind::exp_fn: return exp(wrap(n.a)) * wrap(n.a).derivative();
            case Kind::sin_fn: return cos(wrap(n.a)) * wrap(n.a).derivative();
            case Kind::cos_fn: return (constant(0.0) - sin(wrap(n.a))) * wrap(n.a).derivative();
            case Kind::affine:
                return constant(n.value) * wrap(n.a).derivative().with_affine_arg(n.value, n.offset);
        }
        throw Error("derivative: unreachable");
    }

    /// Replaces every occurrence of the variable by `g` (general composition;
    /// shifts and rescalings stay affine nodes, this handles the rest).
    Expr composed_with(const Expr& g) const {
        const Node& n = *node_;
        switch (n.kind) {
            case Kind::constant: return *this;
            case Kind::variable: return g;
            case Kind::add: return wrap(n.a).composed_with(g) + wrap(n.b).composed_with(g);
            case Kind::sub: return wrap(n.a).composed_with(g) - wrap(n.b).composed_with(g);
            case Kind::mul: return wrap(n.a).composed_with(g) * wrap(n.b).composed_with(g);
            case Kind::div: return wrap(n.a).composed_with(g) / wrap(n.b).composed_with(g);
            case Kind::ipow: return pow(wrap(n.a).composed_with(g), n.exponent);
            case Kind::exp_fn: return exp(wrap(n.a).composed_with(g));
            case Kind::sin_fn: return sin(wrap(n.a).composed_with(g));
            case Kind::cos_fn: return cos(wrap(n.a).composed_with(g));
            case Kind::affine:
                // child evaluated at value*g + offset
                return wrap(n.a).composed_with(constant(n.value) * g + constant(n.offset));
        }
        throw Error("composed_with: unreachable");
    }

    /// Canonical fully parenthesised form; parse(to_string()) evaluates
    /// identically (affine nodes print as a rewritten argument).
    std::string to_string() const { return print_node(*node_, "z"); }

    Kind kind() const { return node_->kind; }
    bool is_constant() const { return node_->kind == Kind::constant; }
    Complex constant_value() const { return node_->value; }

    /// Structural probes used by the catalog to recognise special shapes.
    bool is_variable() const { return node_->kind == Kind::variable; }
    const Expr child_a() const { return wrap(node_->a); }
    const Expr child_b() const { return wrap(node_->b); }
    long long exponent() const { return node_->exponent; }
    Complex affine_scale() const { return node_->value; }
    Complex affine_offset() const { return node_->offset; }

private:
    struct Node {
        Kind kind = Kind::constant;
        Complex value{};  // constant payload, or affine scale
        Complex offset{}; // affine offset
        long long exponent = 0;
        std::shared_ptr<const Node> a, b;
    };

    struct RawTag {};
    explicit Expr(RawTag) {}

    static Expr wrap(std::shared_ptr<const Node> n) {
        Expr e{RawTag{}};
        e.node_ = std::move(n);
        return e;
    }

    static Expr binary(Kind k, const Expr& a, const Expr& b) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->a = a.node_;
        n->b = b.node_;
        return wrap(std::move(n));
    }

    static Expr unary(Kind k, const Expr& a) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->a = a.node_;
        return wrap(std::move(n));
    }

    static Value eval_node(const Node& n, Complex z) {
        switch (n.kind) {
            case Kind::constant: return Value(n.value);
            case Kind::variable: return Value(z);
            case Kind::add: return eval_node(*n.a, z) + eval_node(*n.b, z);
            case Kind::sub: return eval_node(*n.a, z) - eval_node(*n.b, z);
            case Kind::mul: return eval_node(*n.a, z) * eval_node(*n.b, z);
            case Kind::div: return eval_node(*n.a, z) / eval_node(*n.b, z);
            case Kind::ipow: return pow_int(eval_node(*n.a, z), n.exponent);
            case Kind::exp_fn: return exp_v(eval_node(*n.a, z));
            case Kind::sin_fn: return sin_v(eval_node(*n.a, z));
            case Kind::cos_fn: return cos_v(eval_node(*n.a, z));
            case Kind::affine: return eval_node(*n.a, n.value * z + n.offset);
        }
        return Value::undef();
    }

    static std::string fmt_real(double x) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        return buf;
    }

    static std::string fmt_complex(Complex c) {
        if (c.imag() == 0.0) {
            if (c.real() < 0.0) return "(0-" + fmt_real(-c.real()) + ")";
            return fmt_real(c.real());
        }
        std::string re = (c.real() < 0.0) ? "0-" + fmt_real(-c.real()) : fmt_real(c.real());
        std::string im = (c.imag() < 0.0) ? "-" + fmt_real(-c.imag()) : "+" + fmt_real(c.imag());
        return "(" + re + im + "*i)";
    }

    static std::string print_node(const Node& n, const std::string& var) {
        switch (n.kind) {
            case Kind::constant: return fmt_complex(n.value);
            case Kind::variable: return var;
            case Kind::add: return "(" + print_node(*n.a, var) + "+" + print_node(*n.b, var) + ")";
            case Kind::sub: return "(" + print_node(*n.a, var) + "-" + print_node(*n.b, var) + ")";
            case Kind::mul: return "(" + print_node(*n.a, var) + "*" + print_node(*n.b, var) + ")";
            case Kind::div: return "(" + print_node(*n.a, var) + "/" + print_node(*n.b, var) + ")";
            case Kind::ipow:
                return "(" + print_node(*n.a, var) + "^" + std::to_string(n.exponent) + ")";
            case Kind::exp_fn: return "exp(" + print_node(*n.a, var) + ")";
            case Kind::sin_fn: return "sin(" + print_node(*n.a, var) + ")";
            case Kind::cos_fn: return "cos(" + print_node(*n.a, var) + ")";
            case Kind::affine: {
                std::string inner =
                    "(" + fmt_complex(n.value) + "*" + var + "+" + fmt_complex(n.offset) + ")";
                return print_node(*n.a, inner);
            }
        }
        return "?";
    }

    std::shared_ptr<const Node> node_;
};

/// max(log x, 0) with the limit convention log_plus(0) = 0.
inline double log_plus(double x) {
    if (x <= 1.0) return 0.0;
    return std::log(x);
}

} // namespace dn
