#include "fitvol/coefficient.hpp"

#include <cmath>

namespace fitvol {

CoefficientSpec CoefficientSpec::constant(double value) {
    return {Kind::Constant, value, 0.0, 0.0};
}

CoefficientSpec CoefficientSpec::sinusoidal_in_t(double base, double amplitude,
                                                 double frequency) {
    return {Kind::SinusoidalInT, base, amplitude, frequency};
}

CoefficientSpec CoefficientSpec::linear_in_x(double slope) {
    return {Kind::LinearInX, slope, 0.0, 0.0};
}

double CoefficientSpec::operator()(double x, double t) const {
    switch (kind_) {
        case Kind::Constant:
            return p0_;
        case Kind::SinusoidalInT:
            return p0_ + p1_ * std::sin(p2_ * t);
        case Kind::LinearInX:
            return p0_ * x;
    }
    return 0.0;
}

double CoefficientSpec::ddx(double /*x*/, double /*t*/) const {
    return kind_ == Kind::LinearInX ? p0_ : 0.0;
}

double CoefficientSpec::integral_t(double x, double t) const {
    switch (kind_) {
        case Kind::Constant:
            return p0_ * t;
        case Kind::SinusoidalInT:
            if (p2_ == 0.0) return p0_ * t;
            return p0_ * t + p1_ * (1.0 - std::cos(p2_ * t)) / p2_;
        case Kind::LinearInX:
            return p0_ * x * t;
    }
    return 0.0;
}

bool CoefficientSpec::strictly_positive() const {
    switch (kind_) {
        case Kind::Constant:
            return p0_ > 0.0;
        case Kind::SinusoidalInT:
            return p0_ - std::abs(p1_) > 0.0;
        case Kind::LinearInX:
            return false;  // vanishes at x = 0
    }
    return false;
}

}  // namespace fitvol
