#include "cpf/util/ols.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cpf {

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double max_condition) {
    const auto n = X.rows();
    const auto k = X.cols();
    if (y.size() != n) {
        throw std::invalid_argument("ols: design has " + std::to_string(n) + " rows but response has " +
                                    std::to_string(y.size()));
    }
    if (n <= k) {
        throw std::invalid_argument("ols: need more observations than regressors");
    }

    // Column scaling keeps the condition number meaningful for mixed-unit regressors.
    Eigen::VectorXd scale = X.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < k; ++j) {
        if (scale(j) == 0.0) {
            throw SingularDesignError("ols: regressor column " + std::to_string(j) + " is identically zero",
                                      std::numeric_limits<double>::infinity());
        }
    }
    const Eigen::MatrixXd Xs = X * scale.cwiseInverse().asDiagonal();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xs, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double condition = sv(k - 1) > 0.0 ? sv(0) / sv(k - 1) : std::numeric_limits<double>::infinity();
    if (!(condition <= max_condition)) {
        std::ostringstream msg;
        msg << "ols: design is singular or ill-conditioned (condition number " << condition << ")";
        throw SingularDesignError(msg.str(), condition);
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
    const Eigen::VectorXd coef_scaled = qr.solve(y);

    OlsFit fit;
    fit.coef = coef_scaled.cwiseQuotient(scale);
    fit.residuals = y - X * fit.coef;
    fit.rss = fit.residuals.squaredNorm();
    fit.sigma2 = fit.rss / static_cast<double>(n - k);
    fit.condition = condition;

    // (X'X)^{-1} diagonal from the SVD of the scaled design.
    const Eigen::MatrixXd V = svd.matrixV();
    fit.std_err.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) {
            acc += V(j, i) * V(j, i) / (sv(i) * sv(i));
        }
        fit.std_err(j) = std::sqrt(fit.sigma2 * acc) / scale(j);
    }
    return fit;
}

}  // namespace cpf
