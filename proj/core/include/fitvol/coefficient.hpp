#pragma once

namespace fitvol {

/// Closed family of coefficient shapes used by the market models.
///
/// Keeping the family closed (instead of accepting arbitrary callables)
/// gives every shape an exact spatial derivative and a closed-form time
/// integral, which the boundary references and model validation rely on.
class CoefficientSpec {
public:
    enum class Kind { Constant, SinusoidalInT, LinearInX };

    static CoefficientSpec constant(double value);
    /// base + amplitude * sin(frequency * t)
    static CoefficientSpec sinusoidal_in_t(double base, double amplitude, double frequency);
    /// slope * x
    static CoefficientSpec linear_in_x(double slope);

    double operator()(double x, double t) const;
    /// Exact spatial derivative.
    double ddx(double x, double t) const;
    /// Closed-form integral over s in [0, t] at fixed x.
    double integral_t(double x, double t) const;

    bool time_dependent() const { return kind_ == Kind::SinusoidalInT; }
    bool space_dependent() const { return kind_ == Kind::LinearInX; }
    /// True when the value is provably positive for every (x, t).
    bool strictly_positive() const;

    Kind kind() const { return kind_; }

private:
    CoefficientSpec(Kind kind, double p0, double p1, double p2)
        : kind_(kind), p0_(p0), p1_(p1), p2_(p2) {}

    Kind kind_;
    double p0_;  // value | base | slope
    double p1_;  // amplitude
    double p2_;  // frequency
};

}  // namespace fitvol
