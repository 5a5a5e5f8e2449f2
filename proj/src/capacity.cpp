#include "ringres/capacity.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "ringres/format.hpp"
#include "ringres/readout.hpp"

namespace ringres {

namespace {

double legendre_value(int order, double x) {
    switch (order) {
        case 1: return x;
        case 2: return 3.0 * x * x - 1.0;  // printed convention, 2x the standard P2
        case 3: return 0.5 * (5.0 * x * x * x - 3.0 * x);
        default: throw std::invalid_argument("capacity order must be 1, 2 or 3");
    }
}

// All (order, lag) regressions share one state matrix, so the Gram matrices
// and their per-lambda factorizations are computed once and reused; only the
// right-hand sides change between targets.
class RidgeScanner {
public:
    RidgeScanner(const Eigen::MatrixXd& s_train, const Eigen::MatrixXd& s_test,
                 const std::vector<double>& lambdas, int folds)
        : lambdas_(lambdas), folds_(folds) {
        const Eigen::Index rows = s_train.rows();
        const Eigen::Index cols = s_train.cols();
        if (s_test.cols() != cols) throw std::invalid_argument("train/test column mismatch");

        // standardize non-constant columns on the train rows (see train_ridge_cv)
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(cols);
        Eigen::VectorXd sigma = Eigen::VectorXd::Ones(cols);
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double m = s_train.col(j).mean();
            const double v =
                (s_train.col(j).array() - m).square().sum() / static_cast<double>(rows);
            const double sd = std::sqrt(v);
            if (sd > 1e-300 * (std::abs(m) + 1.0)) {
                mu[j] = m;
                sigma[j] = sd;
            }
        }
        z_train_ = (s_train.rowwise() - mu.transpose()).array().rowwise() /
                   sigma.transpose().array();
        z_test_ =
            (s_test.rowwise() - mu.transpose()).array().rowwise() / sigma.transpose().array();

        gram_full_ = z_train_.transpose() * z_train_;
        fold_lo_.resize(folds_ + 1);
        for (int f = 0; f <= folds_; ++f) fold_lo_[f] = rows * f / folds_;
        for (int f = 0; f < folds_; ++f) {
            const auto zf = fold_rows(f);
            gram_folds_.push_back(gram_full_ - zf.transpose() * zf);
        }

        for (const double lam : lambdas_) {
            LambdaSet set;
            Eigen::MatrixXd g = gram_full_;
            g.diagonal().array() += lam;
            set.full.compute(g);
            for (int f = 0; f < folds_; ++f) {
                Eigen::MatrixXd gf = gram_folds_[f];
                gf.diagonal().array() += lam;
                set.folds.emplace_back();
                set.folds.back().compute(gf);
            }
            sets_.push_back(std::move(set));
        }
    }

    // Cross-validated fit on z_train -> predictions on z_test.
    Eigen::VectorXd fit_predict(const Eigen::VectorXd& y, double* lambda_out = nullptr) const {
        const Eigen::VectorXd rhs_full = z_train_.transpose() * y;

        std::size_t best = 0;
        double best_err = std::numeric_limits<double>::infinity();
        if (lambdas_.size() > 1 && folds_ >= 2) {
            for (std::size_t li = 0; li < lambdas_.size(); ++li) {
                double err = 0.0;
                for (int f = 0; f < folds_; ++f) {
                    const auto zf = fold_rows(f);
                    const auto yf = y.segment(fold_lo_[f], fold_lo_[f + 1] - fold_lo_[f]);
                    const Eigen::VectorXd rhs = rhs_full - zf.transpose() * yf;
                    const Eigen::VectorXd w = sets_[li].folds[f].solve(rhs);
                    err += (zf * w - yf).squaredNorm();
                }
                if (err < best_err) {
                    best_err = err;
                    best = li;
                }
            }
        }
        if (lambda_out) *lambda_out = lambdas_[best];
        const Eigen::VectorXd w = sets_[best].full.solve(rhs_full);
        return z_test_ * w;
    }

private:
    Eigen::Block<const Eigen::MatrixXd> fold_rows(int f) const {
        return z_train_.middleRows(fold_lo_[f], fold_lo_[f + 1] - fold_lo_[f]);
    }

    struct LambdaSet {
        Eigen::LDLT<Eigen::MatrixXd> full;
        std::vector<Eigen::LDLT<Eigen::MatrixXd>> folds;
    };

    std::vector<double> lambdas_;
    int folds_;
    Eigen::MatrixXd z_train_, z_test_;
    Eigen::MatrixXd gram_full_;
    std::vector<Eigen::MatrixXd> gram_folds_;
    std::vector<Eigen::Index> fold_lo_;
    std::vector<LambdaSet> sets_;
};

double floor_and_threshold(double c, const CapacityOptions& opts, double noise_floor) {
    if (opts.floor_negative && c < 0.0) c = 0.0;
    if (c < noise_floor) c = 0.0;
    return c;
}

double resolve_noise_floor(const CapacityOptions& opts, Eigen::Index test_rows) {
    if (opts.noise_threshold >= 0.0) return opts.noise_threshold;
    return 2.0 / std::sqrt(static_cast<double>(test_rows));
}

}  // namespace

Eigen::VectorXd legendre_target(int order, int lag, const Eigen::VectorXd& u,
                                Eigen::Index row_offset, Eigen::Index rows,
                                const CapacityOptions& opts) {
    if (lag < 0) throw std::invalid_argument("lag must be non-negative");
    if (row_offset < lag)
        throw std::invalid_argument("row offset leaves no history for the requested lag");
    if (row_offset + rows > u.size()) throw std::invalid_argument("rows exceed the input length");

    Eigen::VectorXd y(rows);
    const double span = opts.input_hi - opts.input_lo;
    for (Eigen::Index r = 0; r < rows; ++r) {
        double x = u[row_offset + r - lag];
        if (opts.rescale_input) x = 2.0 * (x - opts.input_lo) / span - 1.0;
        y[r] = legendre_value(order, x);
    }
    return y;
}

double capacity(const Eigen::MatrixXd& s_train, const Eigen::MatrixXd& s_test,
                const Eigen::VectorXd& u, Eigen::Index train_offset, Eigen::Index test_offset,
                int order, int lag, const CapacityOptions& opts) {
    const auto lambdas = opts.lambda_grid.empty() ? default_lambda_grid() : opts.lambda_grid;
    RidgeScanner scanner(s_train, s_test, lambdas, 5);
    const Eigen::VectorXd y_train = legendre_target(order, lag, u, train_offset, s_train.rows(), opts);
    const Eigen::VectorXd y_test = legendre_target(order, lag, u, test_offset, s_test.rows(), opts);
    const Eigen::VectorXd y_hat = scanner.fit_predict(y_train);
    const double c = 1.0 - nmse(y_hat, y_test);
    return floor_and_threshold(c, opts, resolve_noise_floor(opts, s_test.rows()));
}

CapacityReport capacity_report(const Eigen::MatrixXd& s_train, const Eigen::MatrixXd& s_test,
                               const Eigen::VectorXd& u, Eigen::Index train_offset,
                               Eigen::Index test_offset, const CapacityOptions& opts) {
    if (train_offset < opts.k_max || test_offset < opts.k_max)
        throw std::invalid_argument("offsets leave no history for k_max lags");
    const auto lambdas = opts.lambda_grid.empty() ? default_lambda_grid() : opts.lambda_grid;
    RidgeScanner scanner(s_train, s_test, lambdas, 5);

    CapacityReport report;
    report.noise_floor = resolve_noise_floor(opts, s_test.rows());
    report.curves.setZero(opts.max_order, opts.k_max);
    report.order_sums.setZero(opts.max_order);
    for (int order = 1; order <= opts.max_order; ++order) {
        for (int lag = 1; lag <= opts.k_max; ++lag) {
            const Eigen::VectorXd y_train =
                legendre_target(order, lag, u, train_offset, s_train.rows(), opts);
            const Eigen::VectorXd y_test =
                legendre_target(order, lag, u, test_offset, s_test.rows(), opts);
            const Eigen::VectorXd y_hat = scanner.fit_predict(y_train);
            const double c = floor_and_threshold(1.0 - nmse(y_hat, y_test), opts, report.noise_floor);
            report.curves(order - 1, lag - 1) = c;
        }
        report.order_sums[order - 1] = report.curves.row(order - 1).sum();
    }
    report.total = report.order_sums.sum();
    return report;
}

std::string CapacityReport::to_csv() const {
    std::string out = "order,k,C\n";
    for (Eigen::Index i = 0; i < curves.rows(); ++i) {
        for (Eigen::Index k = 0; k < curves.cols(); ++k)
            out += fmt(static_cast<int>(i + 1)) + "," + fmt(static_cast<int>(k + 1)) + "," +
                   fmt(curves(i, k)) + "\n";
        out += fmt(static_cast<int>(i + 1)) + ",sum," + fmt(order_sums[i]) + "\n";
    }
    out += "total,sum," + fmt(total) + "\n";
    return out;
}

}  // namespace ringres
