#include "biaslab/analytic_bias.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "biaslab/error.hpp"

namespace biaslab::bias {
namespace {

constexpr double kSlack = 1e-12;

void require_instrument(double c3) {
    if (!(std::abs(c3) < 1.0))
        throw Error(ErrorKind::DegenerateInstrument, "|c3| must be < 1, got " + std::to_string(c3));
}

void require_unit_variance(const char* node, double explained) {
    if (explained > 1.0 + kSlack)
        throw Error(ErrorKind::InfeasibleStandardization,
                    std::string("node '") + node + "': parents explain variance " + std::to_string(explained) +
                        " > 1");
}

void require_finite(std::initializer_list<double> values) {
    for (double v : values)
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite parameter");
}

double ratio_or_nan(double num, double den) {
    return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : num / den;
}

}  // namespace

std::string_view to_string(Classification c) noexcept {
    switch (c) {
        case Classification::Amplifier: return "Amplifier";
        case Classification::Reducer: return "Reducer";
        case Classification::Neutral: return "Neutral";
        case Classification::NewBias: return "NewBias";
    }
    return "Neutral";
}

Classification classify(double b0, double bz) noexcept {
    const double tol = 1e-12 * std::max({1.0, std::abs(b0), std::abs(bz)});
    const bool b0_zero = std::abs(b0) <= tol;
    const bool bz_zero = std::abs(bz) <= tol;
    if (b0_zero && !bz_zero) return Classification::NewBias;
    const double gap = std::abs(bz) - std::abs(b0);
    if (std::abs(gap) <= tol) return Classification::Neutral;
    return gap > 0.0 ? Classification::Amplifier : Classification::Reducer;
}

UProjection u_projection(double c1, double c3) {
    require_finite({c1, c3});
    require_instrument(c3);
    const double d = 1.0 - c3 * c3;
    return {c1 / d, -c1 * c3 / d};
}

BiasReport linear_bias_pair(double c0, double c1, double c2, double c3) {
    require_finite({c0, c1, c2, c3});
    require_instrument(c3);
    require_unit_variance("X", c3 * c3 + c1 * c1);
    require_unit_variance("Y", c0 * c0 + c2 * c2 + 2.0 * c0 * c1 * c2);
    const double amp = 1.0 / (1.0 - c3 * c3);
    BiasReport r;
    r.a1 = c0;
    r.b0 = c1 * c2;
    r.bz = c1 * c2 * amp;
    r.a2 = c0 + r.b0;
    r.a3 = c0 + r.bz;
    r.amplification = amp;
    r.classification = classify(r.b0, r.bz);
    return r;
}

BiasReport imperfect_instrument_report(double c0, double c1, double c2, double c3, double c4) {
    require_finite({c0, c1, c2, c3, c4});
    require_instrument(c3);
    require_unit_variance("X", c3 * c3 + c1 * c1);
    require_unit_variance("Y", c0 * c0 + c2 * c2 + c4 * c4 + 2.0 * c0 * c1 * c2 + 2.0 * c0 * c3 * c4);
    BiasReport r;
    r.a1 = c0;
    r.b0 = c2 * c1 + c3 * c4;
    r.bz = c2 * c1 / (1.0 - c3 * c3);
    r.a2 = c0 + r.b0;
    r.a3 = c0 + r.bz;
    r.amplification = ratio_or_nan(r.bz, r.b0);
    r.classification = classify(r.b0, r.bz);
    return r;
}

double reducer_threshold(double c1, double c2, double c3) {
    require_instrument(c3);
    return c3 * c1 * c2 / (1.0 - c3 * c3);
}

bool signed_reducer_rule(double c1, double c2, double c3, double c4) {
    require_instrument(c3);
    if (c3 == 0.0) throw Error(ErrorKind::DegenerateInstrument, "signed rule divides by c3 = 0");
    return c4 / c3 >= c2 * c1 / (1.0 - c3 * c3);
}

double FunctionSpec::value(double x) const {
    return std::visit(
        [x](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Polynomial>) {
                double acc = 0.0;
                for (auto it = k.coefficients.rbegin(); it != k.coefficients.rend(); ++it) acc = acc * x + *it;
                return acc;
            } else if constexpr (std::is_same_v<K, Reciprocal>) {
                if (std::abs(x) < kReciprocalGuard)
                    throw Error(ErrorKind::DomainError, "reciprocal function evaluated at x = " + std::to_string(x));
                return k.scale / x;
            } else {
                return k.value;
            }
        },
        kind_);
}

double FunctionSpec::derivative(double x) const {
    return std::visit(
        [x](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Polynomial>) {
                double acc = 0.0;
                const auto& c = k.coefficients;
                for (std::size_t i = c.size(); i-- > 1;) acc = acc * x + static_cast<double>(i) * c[i];
                return acc;
            } else if constexpr (std::is_same_v<K, Reciprocal>) {
                if (std::abs(x) < kReciprocalGuard)
                    throw Error(ErrorKind::DomainError, "reciprocal function evaluated at x = " + std::to_string(x));
                return -k.scale / (x * x);
            } else {
                return 0.0;
            }
        },
        kind_);
}

double NonlinearOutcomeModel::treatment_noise_variance() const {
    validate();
    return std::max(0.0, 1.0 - c3 * c3 - c1 * c1);
}

void NonlinearOutcomeModel::validate() const {
    require_finite({c1, c3, outcome_noise_variance});
    require_instrument(c3);
    require_unit_variance("X", c3 * c3 + c1 * c1);
    if (outcome_noise_variance < 0.0)
        throw Error(ErrorKind::InvalidArgument, "outcome noise variance must be nonnegative");
}

NonlinearSlopes nonlinear_slopes(const NonlinearOutcomeModel& model, double x, double z) {
    model.validate();
    const UProjection proj = u_projection(model.c1, model.c3);
    const double fp = model.f.derivative(x);
    const double g = model.g.value(x);
    const double gp = model.g.derivative(x);
    return {fp, fp + model.c1 * (x * gp + g), fp + proj.beta * (x * gp + g - model.c3 * gp * z)};
}

BiasReport nonlinear_bias_pair(const NonlinearOutcomeModel& model, double x, double z) {
    const NonlinearSlopes s = nonlinear_slopes(model, x, z);
    const double gp = model.g.derivative(x);
    BiasReport r;
    r.a1 = s.a1;
    r.a2 = s.a2;
    r.a3 = s.a3;
    r.b0 = model.c1 * (x * gp + model.g.value(x));
    r.bz = (r.b0 - model.c1 * model.c3 * gp * z) / (1.0 - model.c3 * model.c3);
    r.amplification = ratio_or_nan(r.bz, r.b0);
    r.classification = classify(r.b0, r.bz);
    return r;
}

double nonlinear_mean_given_x(const NonlinearOutcomeModel& model, double x) {
    model.validate();
    return model.f.value(x) + model.c1 * x * model.g.value(x);
}

double nonlinear_mean_given_xz(const NonlinearOutcomeModel& model, double x, double z) {
    const UProjection proj = u_projection(model.c1, model.c3);
    model.validate();
    return model.f.value(x) + proj.beta * model.g.value(x) * (x - model.c3 * z);
}

double selection_bias(double c0, double beta1, double beta2) {
    require_finite({c0, beta1, beta2});
    require_unit_variance("Y", c0 * c0);
    require_unit_variance("S", beta1 * beta1 + beta2 * beta2 + 2.0 * beta1 * beta2 * c0);
    const double rho = beta1 + c0 * beta2;  // Cov(X, S)
    if (!(rho * rho < 1.0))
        throw Error(ErrorKind::DegenerateSelection, "(beta1 + c0 beta2)^2 must be < 1");
    return -beta2 * (1.0 - c0 * c0) * rho / (1.0 - rho * rho);
}

double attenuation_factor(double var_u, double c, double var_z) {
    require_finite({var_u, c, var_z});
    if (!(var_u > 0.0)) throw Error(ErrorKind::NonpositiveVariance, "Var(U) must be positive");
    if (var_z < 0.0) throw Error(ErrorKind::NonpositiveVariance, "Var(Z) must be nonnegative");
    return var_u / (var_u + c * c * var_z);
}

bool simpson_reversal(double c0, double c1, double c2, double c3) {
    const BiasReport r = linear_bias_pair(c0, c1, c2, c3);
    if (r.a2 == 0.0 || r.a3 == 0.0) return false;
    return std::signbit(r.a2) != std::signbit(r.a3);
}

}  // namespace biaslab::bias
