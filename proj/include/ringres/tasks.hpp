#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

namespace ringres {

enum class MetricKind { nmse, accuracy, ser };

std::string metric_name(MetricKind m);

// One benchmark dataset laid out as [warmup | train | warmup | test] with a
// per-sample target aligned to the same indexing.
struct TaskDataset {
    Eigen::VectorXd input;
    Eigen::VectorXd target;
    Eigen::VectorXi group;          // waveform id per sample (classification only)
    Eigen::Index warmup_len = 200;  // applied before the train block and again before test
    Eigen::Index train_len = 0;
    Eigen::Index test_len = 0;
    int test_subsets = 1;           // test block evaluated in equal chunks
    double input_preshift = 0.0;    // additive shift baked into `input` before masking
    double mask_lo = 0.0;
    double mask_hi = 1.0;
    MetricKind metric = MetricKind::nmse;
    bool bipolar_modulation = false;
    std::uint64_t seed = 0;             // seed actually used
    std::uint64_t requested_seed = 0;   // seed asked for (differs after divergence regeneration)

    Eigen::Index total_len() const { return 2 * warmup_len + train_len + test_len; }
    auto train_targets() const { return target.segment(warmup_len, train_len); }
    auto test_targets() const { return target.segment(2 * warmup_len + train_len, test_len); }
};

struct SplitSpec {
    Eigen::Index train_len = 2000;
    Eigen::Index test_len = 2000;
    Eigen::Index warmup_len = 200;
};

// Tenth-order NARMA recurrence with zero initial history. Returns y of
// length u.size() + 1 with y[0] = 0; stops early (leaving the remainder
// zero) and reports divergence once |y| exceeds 10.
Eigen::VectorXd narma10_recurrence(const Eigen::VectorXd& u, bool* diverged = nullptr);

// Tenth-order NARMA one-step-ahead prediction. Inputs are uniform on
// [0, 0.5]; the target at index n is the recurrence output for step n+1.
// Divergent realizations (|y| > 10) are regenerated with the next seed,
// recorded in `seed` vs `requested_seed`.
TaskDataset gen_narma10(const SplitSpec& split, std::uint64_t seed);

// Random concatenation of sine and square periods, 12 samples per period,
// target 1.0 on square samples and 0.0 on sine samples. Lengths count
// samples; the trailing partial period is truncated.
TaskDataset gen_waveform_classification(const SplitSpec& split, std::uint64_t seed);

// FIR coefficients and nonlinearity of the wireless channel.
struct ChannelModel {
    // taps for d(n+2) .. d(n-7)
    static constexpr double kTaps[10] = {0.08, -0.12, 1.0, 0.18, -0.1, 0.091, -0.05, 0.04, 0.03, 0.01};
    static constexpr double kQuadratic = 0.036;
    static constexpr double kCubic = -0.011;
    double snr_db = 32.0;

    // channel output for a symbol sequence, zero-padded at the edges
    static Eigen::VectorXd fir(const Eigen::VectorXd& d);
};

// Nonlinear channel equalization: recover the 4-level symbols d(n) from the
// distorted, noisy channel output. The input carries the +5 quasi-DC shift
// and is masked over [-1, 1], so it modulates the field bipolarly.
TaskDataset gen_channel_equalization(const SplitSpec& split, std::uint64_t seed,
                                     double snr_db = 32.0, int test_subsets = 1);

// Flattens an I/Q record by interleaving (i0, q0, i1, q1, ...) and predicts
// the flattened stream k steps ahead.
TaskDataset make_radar_dataset(const Eigen::VectorXd& in_phase, const Eigen::VectorXd& quadrature,
                               int k, const SplitSpec& split);

// CSV loader for radar records. Expected format: header "i,q", one row of
// two decimal floats per complex sample.
TaskDataset load_radar(const std::string& path, int k, const SplitSpec& split);

// Synthetic stand-in for sea-clutter I/Q data: a lognormal slow texture with
// a bounded, slowly wandering phase. Bursty envelope, strong short-lag
// correlation. `length` counts complex samples.
void surrogate_radar_iq(Eigen::Index length, std::uint64_t seed, Eigen::VectorXd& in_phase,
                        Eigen::VectorXd& quadrature);

TaskDataset gen_surrogate_radar(Eigen::Index length, std::uint64_t seed, int k,
                                const SplitSpec& split);

}  // namespace ringres
