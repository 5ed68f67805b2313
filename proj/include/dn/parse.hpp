#pragma once

#include <cctype>
#include <map>
#include <string>

#include "dn/errors.hpp"
#include "dn/expr.hpp"

namespace dn {

/// Parameter environment: names bound to subtrees (constants or expressions).
using ParamEnv = std::map<std::string, Expr>;

namespace detail {

class Parser {
public:
    Parser(std::string_view text, const ParamEnv& env) : text_(text), env_(env) {}

    Expr parse() {
        Expr e = expression();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
        return e;
    }

private:
    Expr expression() {
        Expr e = term();
        for (;;) {
            skip_ws();
            if (match('+')) {
                e = e + term();
            } else if (match('-')) {
                e = e - term();
            } else {
                return e;
            }
        }
    }

    Expr term() {
        Expr e = factor();
        for (;;) {
            skip_ws();
            if (match('*')) {
                e = e * factor();
            } else if (match('/')) {
                e = e / factor();
            } else {
                return e;
            }
        }
    }

    Expr factor() {
        skip_ws();
        if (match('-')) return Expr::constant(0.0) - factor();
        if (match('+')) return factor();
        return power();
    }

    Expr power() {
        Expr base = atom();
        skip_ws();
        if (!match('^')) return base;
        skip_ws();
        bool paren = match('(');
        skip_ws();
        bool neg = match('-');
        skip_ws();
        std::size_t start = pos_;
        long long n = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            n = n * 10 + (text_[pos_] - '0');
            ++pos_;
        }
        if (pos_ == start) throw ParseError("expected integer exponent", pos_);
        if (paren) {
            skip_ws();
            if (!match(')')) throw ParseError("expected ')' after exponent", pos_);
        }
        return pow(base, neg ? -n : n);
    }

    Expr atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expression();
            skip_ws();
            if (!match(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    Expr number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark; // 'e' belonged to something else
            }
        }
        if (pos_ == start) throw ParseError("expected number", pos_);
        return Expr::constant(std::stod(std::string(text_.substr(start, pos_ - start))));
    }

    Expr identifier() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));
        if (name == "i") return Expr::constant(Complex(0.0, 1.0));
        if (name == "pi") return Expr::constant(Complex(3.14159265358979323846, 0.0));
        if (name == "z" || name == "t") return Expr::var();
        if (name == "exp" || name == "sin" || name == "cos") {
            skip_ws();
            if (!match('(')) throw ParseError("expected '(' after function name", pos_);
            Expr arg = expression();
            skip_ws();
            if (!match(')')) throw ParseError("expected ')' after function argument", pos_);
            if (name == "exp") return exp(arg);
            if (name == "sin") return sin(arg);
            return cos(arg);
        }
        auto it = env_.find(name);
        if (it == env_.end()) throw ParseError("unknown identifier '" + name + "'", start);
        return it->second;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool match(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string_view text_;
    const ParamEnv& env_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses the expression grammar: variable `z`/`t`, bound parameter names,
/// literals (decimal, `i`, `pi`), `+ - * /`, `^` with an integer exponent,
/// and `exp`, `sin`, `cos`. Throws ParseError with the offending offset.
inline Expr parse(std::string_view text, const ParamEnv& env = {}) {
    return detail::Parser(text, env).parse();
}

} // namespace dn
