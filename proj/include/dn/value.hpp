#pragma once

#include <cmath>
#include <complex>

namespace dn {

using Complex = std::complex<double>;

/// Result of evaluating a closed-form expression at one point.
///
/// Poles are first-class data in this domain, so division by an exact zero
/// yields an explicit `infinite` marker instead of throwing; 0/0 and other
/// indeterminate combinations yield `undefined`.
class Value {
public:
    enum class Kind { finite, infinite, undefined };

    Value() = default;
    Value(Complex v) : v_(v) {}
    Value(double v) : v_(v) {}

    static Value inf() { return Value(Kind::infinite); }
    static Value undef() { return Value(Kind::undefined); }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::finite; }
    bool is_infinite() const { return kind_ == Kind::infinite; }
    bool is_undefined() const { return kind_ == Kind::undefined; }

    /// Finite payload; only meaningful when is_finite().
    Complex get() const { return v_; }

    friend Value operator+(const Value& a, const Value& b) {
        if (a.is_undefined() || b.is_undefined()) return undef();
        if (a.is_infinite() && b.is_infinite()) return undef();
        if (a.is_infinite() || b.is_infinite()) return inf();
        return Value(a.v_ + b.v_);
    }

    friend Value operator-(const Value& a, const Value& b) {
        if (a.is_undefined() || b.is_undefined()) return undef();
        if (a.is_infinite() && b.is_infinite()) return undef();
        if (a.is_infinite() || b.is_infinite()) return inf();
        return Value(a.v_ - b.v_);
    }

    friend Value operator*(const Value& a, const Value& b) {
        if (a.is_undefined() || b.is_undefined()) return undef();
        if (a.is_infinite() || b.is_infinite()) {
            const Value& fin = a.is_infinite() ? b : a;
            if (fin.is_finite() && fin.v_ == Complex(0.0, 0.0)) return undef();
            return inf();
        }
        return Value(a.v_ * b.v_);
    }

    friend Value operator/(const Value& a, const Value& b) {
        if (a.is_undefined() || b.is_undefined()) return undef();
        if (a.is_infinite() && b.is_infinite()) return undef();
        if (a.is_infinite()) return inf();
        if (b.is_infinite()) return Value(Complex(0.0, 0.0));
        if (b.v_ == Complex(0.0, 0.0)) {
            if (a.v_ == Complex(0.0, 0.0)) return undef();
            return inf();
        }
        return Value(a.v_ / b.v_);
    }

    Value operator-() const {
        if (!is_finite()) return *this;
        return Value(-v_);
    }

private:
    explicit Value(Kind k) : kind_(k) {}

    Complex v_{};
    Kind kind_ = Kind::finite;
};

/// Integer power by repeated squaring; 0^n for n<0 is the infinite marker.
inline Value pow_int(const Value& base, long long n) {
    if (base.is_undefined()) return Value::undef();
    if (n == 0) {
        // literal x^0 node: 1 at finite points, indeterminate at a pole
        if (base.is_infinite()) return Value::undef();
        return Value(Complex(1.0, 0.0));
    }
    if (base.is_infinite()) return n > 0 ? Value::inf() : Value(Complex(0.0, 0.0));
    Complex b = base.get();
    bool invert = n < 0;
    unsigned long long m = invert ? static_cast<unsigned long long>(-(n + 1)) + 1ull
                                  : static_cast<unsigned long long>(n);
    Complex acc(1.0, 0.0);
    Complex cur = b;
    while (m) {
        if (m & 1ull) acc *= cur;
        if (m >>= 1ull) cur *= cur;
    }
    if (!invert) return Value(acc);
    if (acc == Complex(0.0, 0.0)) return Value::inf();
    return Value(Complex(1.0, 0.0) / acc);
}

inline Value exp_v(const Value& a) {
    if (!a.is_finite()) return Value::undef();
    return Value(std::exp(a.get()));
}

inline Value sin_v(const Value& a) {
    if (!a.is_finite()) return Value::undef();
    return Value(std::sin(a.get()));
}

inline Value cos_v(const Value& a) {
    if (!a.is_finite()) return Value::undef();
    return Value(std::cos(a.get()));
}

} // namespace dn
