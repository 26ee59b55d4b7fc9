#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace cpf {

/// Raised when a least-squares design is rank deficient or too ill-conditioned.
class SingularDesignError : public std::runtime_error {
public:
    SingularDesignError(const std::string& what, double condition)
        : std::runtime_error(what), condition_(condition) {}

    /// 2-norm condition number of the design (infinite when rank deficient).
    [[nodiscard]] double condition() const noexcept { return condition_; }

private:
    double condition_;
};

struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd std_err;
    Eigen::VectorXd residuals;
    double rss = 0.0;
    double sigma2 = 0.0;  ///< rss / (n - k)
    double condition = 0.0;
};

/// Ordinary least squares of y on the columns of X via column-pivoted QR.
/// Throws SingularDesignError when cond(X) exceeds max_condition.
[[nodiscard]] OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         double max_condition = 1e10);

}  // namespace cpf
