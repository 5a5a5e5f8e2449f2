#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ringres {

template <typename Scalar = double>
struct RidgeModel {
    Eigen::Vector<Scalar, Eigen::Dynamic> weights;
    Scalar lambda = Scalar(0);
};

// Ridge regression through the regularized normal equations
// (S^T S + lambda I) w = S^T y. With lambda = 0 a singular system is
// detected by the residual and reported instead of returning garbage.
template <typename DS, typename DY>
RidgeModel<typename DS::Scalar> train_ridge(const Eigen::MatrixBase<DS>& s,
                                            const Eigen::MatrixBase<DY>& y,
                                            typename DS::Scalar lambda) {
    using Scalar = typename DS::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
    if (s.rows() != y.rows()) throw std::invalid_argument("row count mismatch between S and y");
    if (lambda < Scalar(0)) throw std::invalid_argument("lambda must be non-negative");

    Mat gram = s.transpose() * s;
    gram.diagonal().array() += lambda;
    const Vec rhs = s.transpose() * y;

    const Eigen::LDLT<Mat> ldlt(gram);
    RidgeModel<Scalar> model;
    model.lambda = lambda;
    model.weights = ldlt.solve(rhs);

    // the normal equations are always consistent, so rank deficiency has to
    // be caught through the factor pivots rather than the residual
    if (lambda == Scalar(0)) {
        const auto d = ldlt.vectorD();
        if (d.minCoeff() <= Scalar(1e-13) * d.maxCoeff())
            throw std::runtime_error("singular normal equations; use lambda > 0");
    }
    const Scalar residual = (gram * model.weights - rhs).norm();
    const Scalar ref = rhs.norm() + gram.norm() * model.weights.norm();
    if (!model.weights.allFinite() || residual > Scalar(1e-8) * (ref + Scalar(1)))
        throw std::runtime_error("ridge solve failed");
    return model;
}

template <typename Scalar, typename DS>
Eigen::Vector<Scalar, Eigen::Dynamic> predict(const RidgeModel<Scalar>& model,
                                              const Eigen::MatrixBase<DS>& s) {
    if (s.cols() != model.weights.size())
        throw std::invalid_argument("feature count does not match weight count");
    return s * model.weights;
}

// Normalized mean square error: mean squared residual over the population
// variance of the target.
template <typename D1, typename D2>
typename D1::Scalar nmse(const Eigen::MatrixBase<D1>& y_hat, const Eigen::MatrixBase<D2>& y) {
    using Scalar = typename D1::Scalar;
    if (y_hat.size() != y.size()) throw std::invalid_argument("nmse: length mismatch");
    if (y.size() < 2) throw std::invalid_argument("nmse needs at least two samples");
    const Scalar mean = y.mean();
    const Scalar var = (y.array() - mean).square().sum() / static_cast<Scalar>(y.size());
    if (!(var > Scalar(0))) throw std::invalid_argument("nmse: target has zero variance");
    const Scalar mse =
        (y_hat.array() - y.array()).square().sum() / static_cast<Scalar>(y.size());
    return mse / var;
}

// Fraction of thresholded predictions matching the binary target.
template <typename D1, typename D2>
double accuracy(const Eigen::MatrixBase<D1>& y_hat, const Eigen::MatrixBase<D2>& y_binary,
                double threshold = 0.5) {
    if (y_hat.size() != y_binary.size()) throw std::invalid_argument("accuracy: length mismatch");
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < y_hat.size(); ++i)
        hits += (y_hat[i] >= threshold) == (y_binary[i] >= 0.5);
    return static_cast<double>(hits) / static_cast<double>(y_hat.size());
}

// Nearest symbol in {-3, -1, +1, +3}; midpoints resolve to the smaller symbol.
inline double quantize_symbol(double x) {
    if (x <= -2.0) return -3.0;
    if (x <= 0.0) return -1.0;
    if (x <= 2.0) return 1.0;
    return 3.0;
}

// Symbol error ratio after quantization.
template <typename D1, typename D2>
double ser(const Eigen::MatrixBase<D1>& y_hat, const Eigen::MatrixBase<D2>& symbols) {
    if (y_hat.size() != symbols.size()) throw std::invalid_argument("ser: length mismatch");
    if (y_hat.size() == 0) throw std::invalid_argument("ser: empty input");
    Eigen::Index errors = 0;
    for (Eigen::Index i = 0; i < y_hat.size(); ++i)
        errors += quantize_symbol(y_hat[i]) != symbols[i];
    return static_cast<double>(errors) / static_cast<double>(y_hat.size());
}

inline std::vector<double> default_lambda_grid() {
    return {1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2};
}

// Ridge with the regularization strength chosen by k-fold cross-validation
// over a log grid. Non-constant feature columns are standardized internally
// (z-score on the given rows) so the grid is meaningful regardless of the
// physical feature scale; constant columns — the bias column in particular —
// are left untouched and absorb the centering offsets when the weights are
// mapped back to raw feature space. The reported lambda refers to the
// standardized problem. Folds are contiguous row blocks; ties prefer the
// smaller lambda.
template <typename Scalar = double>
RidgeModel<Scalar> train_ridge_cv(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& s,
                                  const Eigen::Vector<Scalar, Eigen::Dynamic>& y,
                                  const std::vector<double>& lambdas = default_lambda_grid(),
                                  int folds = 5) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
    const Eigen::Index rows = s.rows();
    const Eigen::Index cols = s.cols();
    if (rows != y.size()) throw std::invalid_argument("row count mismatch between S and y");
    if (lambdas.empty()) throw std::invalid_argument("empty lambda grid");
    folds = static_cast<int>(std::min<Eigen::Index>(folds, rows));

    Vec mu = Vec::Zero(cols);
    Vec sigma = Vec::Ones(cols);
    std::vector<bool> scaled(static_cast<std::size_t>(cols), false);
    Eigen::Index intercept_col = -1;
    for (Eigen::Index j = 0; j < cols; ++j) {
        const Scalar m = s.col(j).mean();
        const Scalar v = (s.col(j).array() - m).square().sum() / static_cast<Scalar>(rows);
        const Scalar sd = std::sqrt(v);
        if (sd > Scalar(1e-300) * (std::abs(m) + Scalar(1))) {
            mu[j] = m;
            sigma[j] = sd;
            scaled[static_cast<std::size_t>(j)] = true;
        } else if (m != Scalar(0)) {
            intercept_col = j;  // last constant non-zero column wins
        }
    }

    Mat z = s;
    for (Eigen::Index j = 0; j < cols; ++j)
        if (scaled[static_cast<std::size_t>(j)]) z.col(j) = (s.col(j).array() - mu[j]) / sigma[j];

    double best_lambda = lambdas.front();
    Scalar best_err = std::numeric_limits<Scalar>::infinity();
    if (folds >= 2 && lambdas.size() > 1) {
        for (const double lam : lambdas) {
            Scalar err = Scalar(0);
            for (int f = 0; f < folds; ++f) {
                const Eigen::Index lo = rows * f / folds;
                const Eigen::Index hi = rows * (f + 1) / folds;
                const Eigen::Index nv = hi - lo;
                Mat zt(rows - nv, cols);
                Vec yt(rows - nv);
                zt.topRows(lo) = z.topRows(lo);
                zt.bottomRows(rows - hi) = z.bottomRows(rows - hi);
                yt.head(lo) = y.head(lo);
                yt.tail(rows - hi) = y.tail(rows - hi);
                const auto m = train_ridge(zt, yt, Scalar(lam));
                err += (z.middleRows(lo, nv) * m.weights - y.segment(lo, nv)).squaredNorm();
            }
            if (err < best_err) {
                best_err = err;
                best_lambda = lam;
            }
        }
    }

    const auto zm = train_ridge(z, y, Scalar(best_lambda));
    RidgeModel<Scalar> model;
    model.lambda = Scalar(best_lambda);
    model.weights = zm.weights;
    Scalar offset = Scalar(0);
    for (Eigen::Index j = 0; j < cols; ++j) {
        if (scaled[static_cast<std::size_t>(j)]) {
            model.weights[j] = zm.weights[j] / sigma[j];
            offset -= zm.weights[j] * mu[j] / sigma[j];
        }
    }
    if (offset != Scalar(0)) {
        if (intercept_col < 0)
            throw std::runtime_error("train_ridge_cv requires a constant bias column");
        model.weights[intercept_col] += offset / s(0, intercept_col);
    }
    return model;
}

}  // namespace ringres
