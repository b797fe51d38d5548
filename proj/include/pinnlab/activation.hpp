#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace pinnlab {

enum class Activation { sigmoid, tanh, relu };

std::string to_string(Activation a);
std::optional<Activation> parse_activation(std::string_view name);

// Numerically stable logistic function.
template <typename Scalar>
Scalar sigmoid(Scalar z) {
    using std::exp;
    if (z >= Scalar(0)) {
        return Scalar(1) / (Scalar(1) + exp(-z));
    }
    const Scalar e = exp(z);
    return e / (Scalar(1) + e);
}

// Value and the first three derivatives of an activation at a point.
template <typename Scalar>
struct ActivationTaylor {
    Scalar f, d1, d2, d3;
};

template <typename Scalar>
ActivationTaylor<Scalar> activation_taylor(Activation a, Scalar z) {
    switch (a) {
        case Activation::sigmoid: {
            const Scalar s = sigmoid(z);
            const Scalar d1 = s * (Scalar(1) - s);
            return {s, d1, d1 * (Scalar(1) - Scalar(2) * s), d1 * (Scalar(1) - Scalar(6) * d1)};
        }
        case Activation::tanh: {
            using std::tanh;
            const Scalar y = tanh(z);
            const Scalar d1 = Scalar(1) - y * y;
            return {y, d1, Scalar(-2) * y * d1, d1 * (Scalar(6) * y * y - Scalar(2))};
        }
        case Activation::relu:
            // Kink at 0 takes the zero subgradient; curvature is zero everywhere.
            return {z > Scalar(0) ? z : Scalar(0), z > Scalar(0) ? Scalar(1) : Scalar(0), Scalar(0),
                    Scalar(0)};
    }
    return {};
}

// Coefficient-wise activation over a dense block.
template <typename Derived>
Eigen::ArrayXXd apply_activation(Activation a, const Eigen::ArrayBase<Derived>& z) {
    switch (a) {
        case Activation::sigmoid:
            return z.unaryExpr([](double v) { return sigmoid(v); });
        case Activation::tanh:
            return z.tanh();
        case Activation::relu:
            return z.max(0.0);
    }
    return z;
}

}  // namespace pinnlab
