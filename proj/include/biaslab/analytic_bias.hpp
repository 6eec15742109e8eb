#pragma once

// Closed-form bias quantities for the instrument/confounder models.
//
// Coefficient naming follows the canonical graphs:
//   Z -> X : c3,  U -> X : c1,  U -> Y : c2,  X -> Y : c0,  Z -> Y : c4
// and for the selection graph  X -> S : beta1,  Y -> S : beta2.
// All variables are zero-mean and unit-variance.

#include <string_view>
#include <variant>
#include <vector>

namespace biaslab::bias {

struct UProjection {
    double beta = 0.0;   // coefficient of X in E(U | x, z)
    double alpha = 0.0;  // coefficient of Z in E(U | x, z)
};

enum class Classification { Amplifier, Reducer, Neutral, NewBias };

std::string_view to_string(Classification c) noexcept;

struct BiasReport {
    double a1 = 0.0;  // causal slope
    double a2 = 0.0;  // slope without Z
    double a3 = 0.0;  // slope with Z
    double b0 = 0.0;  // a2 - a1
    double bz = 0.0;  // a3 - a1
    double amplification = 0.0;
    Classification classification = Classification::Neutral;
};

/// Compares |bz| against |b0| with a relative tolerance of 1e-12.
Classification classify(double b0, double bz) noexcept;

UProjection u_projection(double c1, double c3);

/// Pure instrument.  amplification = 1 / (1 - c3^2).
BiasReport linear_bias_pair(double c0, double c1, double c2, double c3);

/// Z also affects Y directly with coefficient c4.  amplification = bz / b0
/// (NaN when b0 = 0).
BiasReport imperfect_instrument_report(double c0, double c1, double c2, double c3, double c4);

/// Smallest c4 >= 0 at which Z stops amplifying: c3 * c1 * c2 / (1 - c3^2).
double reducer_threshold(double c1, double c2, double c3);

/// The signed rule c4 / c3 >= c2 c1 / (1 - c3^2), evaluated literally.
bool signed_reducer_rule(double c1, double c2, double c3, double c4);

// ---------------------------------------------------------------------------
// Nonlinear outcome  Y = f(X) + U g(X) + e''  with the linear X equation.

struct Polynomial {
    std::vector<double> coefficients;  // ascending powers
};
struct Reciprocal {
    double scale = 1.0;  // A / x
};
struct Constant {
    double value = 0.0;
};

/// Reciprocal evaluation requires |x| >= kReciprocalGuard.
inline constexpr double kReciprocalGuard = 1e-6;

class FunctionSpec {
public:
    using Kind = std::variant<Polynomial, Reciprocal, Constant>;

    FunctionSpec() : kind_(Constant{0.0}) {}
    FunctionSpec(Kind kind) : kind_(std::move(kind)) {}

    static FunctionSpec polynomial(std::vector<double> coefficients) { return {Polynomial{std::move(coefficients)}}; }
    static FunctionSpec reciprocal(double scale) { return {Reciprocal{scale}}; }
    static FunctionSpec constant(double value) { return {Constant{value}}; }

    const Kind& kind() const noexcept { return kind_; }
    bool is_reciprocal() const noexcept { return std::holds_alternative<Reciprocal>(kind_); }

    /// Throws DomainError for Reciprocal near zero.
    double value(double x) const;
    double derivative(double x) const;

private:
    Kind kind_;
};

struct NonlinearOutcomeModel {
    double c3 = 0.0;
    double c1 = 0.0;
    FunctionSpec f;
    FunctionSpec g;
    double outcome_noise_variance = 1.0;  // Var(e'')

    /// Var(e') = 1 - c3^2 - c1^2.  Throws DegenerateInstrument,
    /// InfeasibleStandardization, InvalidArgument.
    double treatment_noise_variance() const;
    void validate() const;
};

struct NonlinearSlopes {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
};

NonlinearSlopes nonlinear_slopes(const NonlinearOutcomeModel& model, double x, double z);
BiasReport nonlinear_bias_pair(const NonlinearOutcomeModel& model, double x, double z);

/// E(Y | x) = f(x) + c1 x g(x).
double nonlinear_mean_given_x(const NonlinearOutcomeModel& model, double x);
/// E(Y | x, z) = f(x) + beta g(x) (x - c3 z).
double nonlinear_mean_given_xz(const NonlinearOutcomeModel& model, double x, double z);

// ---------------------------------------------------------------------------

/// Bias of the X slope after conditioning on S = s, with S = beta1 X +
/// beta2 Y + e_S.  Throws DegenerateSelection, InfeasibleStandardization.
double selection_bias(double c0, double beta1, double beta2);

/// Fraction of a unit change in X = U + cZ that reaches U.
double attenuation_factor(double var_u, double c, double var_z);

/// True when the crude and Z-adjusted slopes have opposite nonzero signs.
bool simpson_reversal(double c0, double c1, double c2, double c3);

}  // namespace biaslab::bias
