#pragma once

// Standardized models used throughout: the instrument model, its imperfect
// variant, the selection model and the three-selector model.

#include "biaslab/linear_scm.hpp"
#include "biaslab/model_spec.hpp"

namespace biaslab::figures {

/// Z -> X (c3), U -> X (c1), X -> Y (c0), U -> Y (c2).
ModelSpec instrument_spec(double c0, double c1, double c2, double c3);
/// instrument_spec plus Z -> Y (c4).
ModelSpec imperfect_instrument_spec(double c0, double c1, double c2, double c3, double c4);
/// Z -> X (c3), X -> Y (c0), X -> S (beta1), Y -> S (beta2).
ModelSpec selection_spec(double c0, double beta1, double beta2, double c3 = 0.6);
/// Z -> X, U1 -> X, X -> Y, U2 -> Y and the selectors S1 (U1, Y),
/// S2 (X, U2), S3 (U1, U2); all coefficients set to `coefficient`.
ModelSpec three_selector_spec(double coefficient = 0.3);

inline LinearSCM instrument_model(double c0, double c1, double c2, double c3) {
    return build_model(instrument_spec(c0, c1, c2, c3));
}
inline LinearSCM imperfect_instrument_model(double c0, double c1, double c2, double c3, double c4) {
    return build_model(imperfect_instrument_spec(c0, c1, c2, c3, c4));
}
inline LinearSCM selection_model(double c0, double beta1, double beta2, double c3 = 0.6) {
    return build_model(selection_spec(c0, beta1, beta2, c3));
}

}  // namespace biaslab::figures
