#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "biaslab/dataset.hpp"

namespace biaslab::diag {

enum class Verdict { ConfoundingSuspected, NoEvidenceOfConfounding };
std::string_view to_string(Verdict v) noexcept;

struct SensitivityOptions {
    double k = 4.0;                // verdict threshold in bootstrap SEs
    std::size_t resamples = 1000;  // paired bootstrap resamples
    std::uint64_t seed = 0;

    /// Throws InvalidArgument.
    void validate() const;
};

struct SensitivityVerdict {
    double slope_without_iv = 0.0;
    double slope_with_iv = 0.0;
    double delta = 0.0;  // slope_with_iv - slope_without_iv
    double delta_se = 0.0;
    Verdict verdict = Verdict::NoEvidenceOfConfounding;
    double k = 4.0;
    std::size_t resamples = 0;
    std::size_t n = 0;
    std::vector<std::string> caveats;
};

/// Compares the x coefficient of y ~ x + extra with that of
/// y ~ x + z + extra.  The SE of the difference comes from a seeded paired
/// bootstrap of rows.  `z` is taken to be an instrument on the caller's
/// word; nothing here tests that.
/// Throws UnknownColumn, InvalidArgument, SingularDesign, InsufficientData (n < 30).
SensitivityVerdict iv_sensitivity_test(const Dataset& data, std::string_view x, std::string_view y,
                                       std::string_view z, const std::vector<std::string>& extra = {},
                                       SensitivityOptions options = {});

enum class Advice { Retain, Discard, Indeterminate };
std::string_view to_string(Advice a) noexcept;

struct ScreenOptions {
    /// |t| below this counts as a negligible association.
    double negligible_t = 2.0;
};

struct CovariateAdvice {
    std::string covariate;
    double treatment_association = 0.0;  // corr(C, X)
    double outcome_association = 0.0;    // partial corr(C, Y | X, other candidates)
    double treatment_t = 0.0;
    double outcome_t = 0.0;
    Advice advice = Advice::Indeterminate;
};

/// Retain when the outcome association is clearly nonzero; Discard when it
/// is negligible while the treatment association is not (and no larger in
/// magnitude); otherwise Indeterminate.  Associations only, not causal
/// labels.  Throws UnknownColumn, InvalidArgument, SingularDesign,
/// InsufficientData.
std::vector<CovariateAdvice> covariate_screen(const Dataset& data, std::string_view x, std::string_view y,
                                              const std::vector<std::string>& candidates, ScreenOptions options = {});

}  // namespace biaslab::diag
