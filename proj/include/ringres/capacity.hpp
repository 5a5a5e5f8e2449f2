#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace ringres {

struct CapacityOptions {
    int max_order = 3;
    int k_max = 50;
    bool rescale_input = true;   // map the drive onto [-1, 1] before the polynomials
    double input_lo = 0.0;       // support of the raw drive when rescaling
    double input_hi = 0.5;
    bool floor_negative = true;
    double noise_threshold = -1.0;  // < 0: use 2/sqrt(test rows)
    std::vector<double> lambda_grid;  // empty: readout default
};

struct CapacityReport {
    Eigen::MatrixXd curves;       // max_order x k_max, entry (i-1, k-1) = C_i[k]
    Eigen::VectorXd order_sums;   // C_1 .. C_M
    double total = 0.0;           // MC = sum of order sums
    double noise_floor = 0.0;

    std::string to_csv() const;   // columns order,k,C plus one summary row per order
};

// Degree-i Legendre value of the (optionally rescaled) drive lagged by k,
// evaluated for `rows` rows starting at absolute symbol index row_offset.
// The printed second-order form 3x^2-1 (twice the standard polynomial) is
// kept; capacities are invariant to target scaling.
Eigen::VectorXd legendre_target(int order, int lag, const Eigen::VectorXd& u,
                                Eigen::Index row_offset, Eigen::Index rows,
                                const CapacityOptions& opts = {});

// Capacity of one (order, lag) reconstruction task: a ridge readout is
// trained on the train rows and C = 1 - NMSE is evaluated on the held-out
// test rows, floored at zero and zeroed below the noise threshold.
double capacity(const Eigen::MatrixXd& s_train, const Eigen::MatrixXd& s_test,
                const Eigen::VectorXd& u, Eigen::Index train_offset, Eigen::Index test_offset,
                int order, int lag, const CapacityOptions& opts = {});

// Full memory-capacity scan: all orders up to max_order, lags 1..k_max.
CapacityReport capacity_report(const Eigen::MatrixXd& s_train, const Eigen::MatrixXd& s_test,
                               const Eigen::VectorXd& u, Eigen::Index train_offset,
                               Eigen::Index test_offset, const CapacityOptions& opts = {});

}  // namespace ringres
