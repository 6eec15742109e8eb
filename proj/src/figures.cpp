#include "biaslab/figures.hpp"

namespace biaslab::figures {

ModelSpec instrument_spec(double c0, double c1, double c2, double c3) {
    ModelSpec s;
    s.variables = {{"Z", NodeKind::Observed}, {"U", NodeKind::Latent}, {"X", NodeKind::Observed},
                   {"Y", NodeKind::Observed}};
    s.edges = {{"Z", "X", c3}, {"U", "X", c1}, {"X", "Y", c0}, {"U", "Y", c2}};
    return s;
}

ModelSpec imperfect_instrument_spec(double c0, double c1, double c2, double c3, double c4) {
    ModelSpec s = instrument_spec(c0, c1, c2, c3);
    s.edges.push_back({"Z", "Y", c4});
    return s;
}

ModelSpec selection_spec(double c0, double beta1, double beta2, double c3) {
    ModelSpec s;
    s.variables = {{"Z", NodeKind::Observed}, {"X", NodeKind::Observed}, {"Y", NodeKind::Observed},
                   {"S", NodeKind::Selection}};
    s.edges = {{"Z", "X", c3}, {"X", "Y", c0}, {"X", "S", beta1}, {"Y", "S", beta2}};
    return s;
}

ModelSpec three_selector_spec(double coefficient) {
    ModelSpec s;
    s.variables = {{"Z", NodeKind::Observed},   {"U1", NodeKind::Latent},    {"U2", NodeKind::Latent},
                   {"X", NodeKind::Observed},   {"Y", NodeKind::Observed},   {"S1", NodeKind::Selection},
                   {"S2", NodeKind::Selection}, {"S3", NodeKind::Selection}};
    const double c = coefficient;
    s.edges = {{"Z", "X", c},   {"U1", "X", c},  {"X", "Y", c},   {"U2", "Y", c},  {"U1", "S1", c},
               {"Y", "S1", c},  {"X", "S2", c},  {"U2", "S2", c}, {"U1", "S3", c}, {"U2", "S3", c}};
    return s;
}

}  // namespace biaslab::figures
