#include "biaslab/linalg.hpp"

#include <cmath>
#include <string>

#include "biaslab/error.hpp"

namespace biaslab::linalg {

Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& m, std::string_view context) {
    const Eigen::Index k = m.rows();
    if (k == 0) return Eigen::MatrixXd(0, 0);
    Eigen::VectorXd scale(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double d = m(i, i);
        if (!(d > 0.0) || !std::isfinite(d))
            throw Error(ErrorKind::SingularDesign, std::string(context) + ": zero-variance term");
        scale(i) = 1.0 / std::sqrt(d);
    }
    const Eigen::MatrixXd corr = scale.asDiagonal() * m * scale.asDiagonal();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxCondition)
        throw Error(ErrorKind::SingularDesign, std::string(context) + ": collinear design (condition number " +
                                                   (lo > 0.0 ? std::to_string(hi / lo) : std::string("inf")) + ")");
    const Eigen::MatrixXd corr_inv =
        eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    return scale.asDiagonal() * corr_inv * scale.asDiagonal();
}

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs, std::string_view context) {
    return inverse_spd(m, context) * rhs;
}

}  // namespace biaslab::linalg
