#include "biaslab/kernels.hpp"

#include <algorithm>

#include <omp.h>

#include "biaslab/error.hpp"

namespace biaslab::kernels {

void set_thread_count(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

LinearRowGenerator::LinearRowGenerator(const LinearSCM& model, Disturbance disturbance)
    : width_(model.graph().size()), disturbance_(disturbance) {
    const auto& g = model.graph();
    for (NodeId v : g.topological_order()) {
        Step s{v, parent_.size(), 0, 0.0};
        for (NodeId p : g.parents(v)) {
            parent_.push_back(p);
            coef_.push_back(model.coefficients()(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(p)));
        }
        s.last = parent_.size();
        const double psi = model.noise_variances()(static_cast<Eigen::Index>(v));
        s.scale = disturbance == Disturbance::Gaussian ? std::sqrt(psi) : std::sqrt(12.0 * psi);
        steps_.push_back(s);
    }
}

NonlinearRowGenerator::NonlinearRowGenerator(const bias::NonlinearOutcomeModel& model, double min_abs_x)
    : c3_(model.c3),
      c1_(model.c1),
      sd_x_(std::sqrt(model.treatment_noise_variance())),
      sd_y_(std::sqrt(model.outcome_noise_variance)),
      reject_below_(0.0),
      f_(model.f),
      g_(model.g) {
    if (model.f.is_reciprocal() || model.g.is_reciprocal())
        reject_below_ = std::max(min_abs_x, bias::kReciprocalGuard);
}

}  // namespace biaslab::kernels
