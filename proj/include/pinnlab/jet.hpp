#pragma once

#include <cmath>

namespace pinnlab {

// Second-order jet in the (x, t) inputs of a network: value, u_x, u_t, u_xx.
// u_tt is not carried.
template <typename Scalar>
struct Jet2 {
    Scalar val{0};
    Scalar dx{0};
    Scalar dt{0};
    Scalar dxx{0};

    Jet2() = default;
    Jet2(Scalar v) : val(v) {}  // NOLINT: constants promote implicitly
    Jet2(Scalar v, Scalar x, Scalar t, Scalar xx) : val(v), dx(x), dt(t), dxx(xx) {}

    static Jet2 variable_x(Scalar x) { return {x, Scalar(1), Scalar(0), Scalar(0)}; }
    static Jet2 variable_t(Scalar t) { return {t, Scalar(0), Scalar(1), Scalar(0)}; }

    Jet2& operator+=(const Jet2& o) {
        val += o.val;
        dx += o.dx;
        dt += o.dt;
        dxx += o.dxx;
        return *this;
    }
    Jet2& operator-=(const Jet2& o) {
        val -= o.val;
        dx -= o.dx;
        dt -= o.dt;
        dxx -= o.dxx;
        return *this;
    }
    Jet2& operator*=(const Jet2& o) {
        *this = *this * o;
        return *this;
    }
    Jet2& operator*=(Scalar c) {
        val *= c;
        dx *= c;
        dt *= c;
        dxx *= c;
        return *this;
    }

    friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
    friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
    friend Jet2 operator-(const Jet2& a) { return {-a.val, -a.dx, -a.dt, -a.dxx}; }
    friend Jet2 operator*(const Jet2& a, const Jet2& b) {
        return {a.val * b.val, a.dx * b.val + a.val * b.dx, a.dt * b.val + a.val * b.dt,
                a.dxx * b.val + Scalar(2) * a.dx * b.dx + a.val * b.dxx};
    }
    friend Jet2 operator*(Scalar c, Jet2 a) { return a *= c; }
    friend Jet2 operator*(Jet2 a, Scalar c) { return a *= c; }
};

// g(j) given g, g', g'' evaluated at j.val.
template <typename Scalar>
Jet2<Scalar> compose(const Jet2<Scalar>& j, Scalar g, Scalar g1, Scalar g2) {
    return {g, g1 * j.dx, g1 * j.dt, g2 * j.dx * j.dx + g1 * j.dxx};
}

template <typename Scalar>
Jet2<Scalar> sin(const Jet2<Scalar>& j) {
    using std::cos;
    using std::sin;
    const Scalar s = sin(j.val);
    return compose(j, s, Scalar(cos(j.val)), -s);
}

template <typename Scalar>
Jet2<Scalar> exp(const Jet2<Scalar>& j) {
    using std::exp;
    const Scalar e = exp(j.val);
    return compose(j, e, e, e);
}

using Jet2d = Jet2<double>;

}  // namespace pinnlab
