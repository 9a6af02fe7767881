#include "model_impl.hpp"

#include "tspec/error.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace tspec::detail {

double sigmoid(double z)
{
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z)
{
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

LinearParams fit_logistic(const Matrix& X, std::span<const double> y, const Hyperparameters& hp)
{
    const std::size_t m = X.rows(), d = X.cols();
    LinearParams p;
    p.weights.assign(d, 0.0);

    std::vector<double> margin(m), grad(d);
    auto loss_and_margins = [&]() {
        double loss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double z = p.intercept;
            const auto row = X.row(i);
            for (std::size_t j = 0; j < d; ++j)
                z += p.weights[j] * row[j];
            margin[i] = z;
            // -[y log s(z) + (1-y) log(1-s(z))] = softplus(z) - y z
            loss += softplus(z) - y[i] * z;
        }
        double penalty = 0.0;
        for (double w : p.weights)
            penalty += w * w;
        return loss / static_cast<double>(m) + 0.5 * hp.l2 * penalty;
    };

    double loss = loss_and_margins();
    for (int iter = 0; iter < hp.max_iterations; ++iter) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double r = sigmoid(margin[i]) - y[i];
            grad_b += r;
            const auto row = X.row(i);
            for (std::size_t j = 0; j < d; ++j)
                grad[j] += r * row[j];
        }
        const double inv_m = 1.0 / static_cast<double>(m);
        for (std::size_t j = 0; j < d; ++j)
            p.weights[j] -= hp.learning_rate * (grad[j] * inv_m + hp.l2 * p.weights[j]);
        p.intercept -= hp.learning_rate * grad_b * inv_m;

        const double next = loss_and_margins();
        const bool converged = std::abs(loss - next) < hp.tolerance;
        loss = next;
        if (converged)
            break;
    }
    return p;
}

LinearParams fit_ridge(const Matrix& X, std::span<const double> y, const Hyperparameters& hp)
{
    const auto m = static_cast<Eigen::Index>(X.rows());
    const auto d = static_cast<Eigen::Index>(X.cols());
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(X.data().data(), m, d);
    Eigen::Map<const Eigen::VectorXd> b(y.data(), m);

    // Centering leaves the intercept unpenalised.
    const Eigen::RowVectorXd x_mean = A.colwise().mean();
    const double y_mean = b.mean();
    const Eigen::MatrixXd Ac = A.rowwise() - x_mean;
    const Eigen::VectorXd bc = b.array() - y_mean;

    Eigen::MatrixXd gram = Ac.transpose() * Ac;
    gram.diagonal().array() += hp.ridge;
    const Eigen::VectorXd rhs = Ac.transpose() * bc;

    Eigen::VectorXd w;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        w = ldlt.solve(rhs);
    } else {
        // Singular design with zero ridge: minimum-norm least squares.
        w = Ac.completeOrthogonalDecomposition().solve(bc);
    }
    if (!w.allFinite())
        throw DataError("glm_gaussian: normal equations are singular");

    LinearParams p;
    p.weights.assign(w.data(), w.data() + w.size());
    p.intercept = y_mean - x_mean.dot(w);
    return p;
}

}  // namespace tspec::detail
