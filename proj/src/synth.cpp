#include "polyunmix/synth.hpp"

#include "polyunmix/rng.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace polyunmix {

SynthInstance generate(const SynthConfig& config)
{
    const int d = config.d;
    const int m = config.m;
    const long n = static_cast<long>(config.height) * config.width;
    if (m < 2 || d < m) throw std::invalid_argument("generate: need d >= m >= 2");
    if (n < m) throw std::invalid_argument("generate: need n >= m");
    if (config.noise_sigma < 0.0) throw std::invalid_argument("generate: noise_sigma < 0");
    if (!(config.dirichlet_alpha > 0.0))
        throw std::invalid_argument("generate: dirichlet_alpha must be > 0");

    Pcg32 rng(config.seed);

    Eigen::MatrixXd endmembers(d, m);
    for (int attempt = 0;; ++attempt) {
        for (int i = 0; i < d; ++i)
            for (int c = 0; c < m; ++c) endmembers(i, c) = rng.uniform(0.1, 1.0);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(endmembers);
        if (svd.singularValues()(m - 1) > 0.05 * svd.singularValues()(0)) break;
        if (attempt > 1000)
            throw std::runtime_error("generate: could not sample well-conditioned endmembers");
    }

    Eigen::MatrixXd abundances(m, n);
    for (long j = 0; j < n; ++j) {
        const std::vector<double> a = rng.dirichlet(m, config.dirichlet_alpha);
        for (int i = 0; i < m; ++i) abundances(i, j) = a[static_cast<std::size_t>(i)];
    }

    Eigen::MatrixXd y = endmembers * abundances; // d x n
    if (config.noise_sigma > 0.0)
        for (long j = 0; j < n; ++j)
            for (int i = 0; i < d; ++i) y(i, j) += config.noise_sigma * rng.gaussian();

    SynthInstance out;
    out.dataset.data = y.transpose(); // pixels as rows
    out.dataset.height = config.height;
    out.dataset.width = config.width;
    out.ground_truth.endmembers = endmembers;
    out.ground_truth.abundances = abundances;
    out.ground_truth.labels = argmax_labels(abundances);
    return out;
}

namespace {

constexpr double kTieBand = 1e-9;

// Dominant label from exact linear coefficients, or -1 inside the tie band.
int dominant_label(const Eigen::MatrixXd& pinv, const Eigen::VectorXd& x)
{
    const Eigen::VectorXd coeff = pinv * x;
    int best = 0;
    for (long i = 1; i < coeff.size(); ++i)
        if (coeff(i) > coeff(best)) best = static_cast<int>(i);
    for (long i = 0; i < coeff.size(); ++i)
        if (i != best && coeff(best) - coeff(i) < kTieBand) return -1;
    return best;
}

} // namespace

TheoremReport verify_theorem(const Eigen::MatrixXd& endmembers, long trials, std::uint64_t seed)
{
    const long d = endmembers.rows();
    const long m = endmembers.cols();
    const Eigen::MatrixXd gram = endmembers.transpose() * endmembers;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible())
        throw std::invalid_argument("verify_theorem: endmembers must be linearly independent");
    const Eigen::MatrixXd pinv = gram.ldlt().solve(endmembers.transpose()); // m x d

    Pcg32 rng(seed);
    TheoremReport rep;
    rep.trials = trials;
    rep.witness = Eigen::VectorXd::Zero(d);

    // origin: zero coefficient on every endmember, hence in every closure
    const Eigen::VectorXd origin_coeff = pinv * Eigen::VectorXd::Zero(d);
    rep.origin_in_all_regions = origin_coeff.cwiseAbs().maxCoeff() <= kTieBand;

    auto draw_point = [&]() {
        Eigen::VectorXd x(d);
        for (long i = 0; i < d; ++i) x(i) = rng.gaussian();
        return x;
    };

    for (long t = 0; t < trials; ++t) {
        Eigen::VectorXd x = draw_point();
        int label = dominant_label(pinv, x);
        if (label < 0) {
            ++rep.ties_skipped;
            continue;
        }

        // positive homogeneity: scaling keeps the label
        const double scale = std::exp(rng.uniform(-2.0, 2.0));
        const int scaled_label = dominant_label(pinv, scale * x);
        if (scaled_label >= 0 && scaled_label != label) {
            ++rep.homogeneity_violations;
            if (rep.homogeneity_violations == 1 && rep.convexity_violations == 0) rep.witness = x;
        }

        // convexity: a second point with the same label, convex combination
        Eigen::VectorXd x2;
        int found = 0;
        for (int attempt = 0; attempt < 200; ++attempt) {
            x2 = draw_point();
            const int l2 = dominant_label(pinv, x2);
            if (l2 == label) {
                found = 1;
                break;
            }
        }
        if (!found) {
            ++rep.ties_skipped;
            continue;
        }
        const double rho = rng.uniform();
        const Eigen::VectorXd mid = rho * x + (1.0 - rho) * x2;
        const int mid_label = dominant_label(pinv, mid);
        if (mid_label >= 0 && mid_label != label) {
            ++rep.convexity_violations;
            if (rep.convexity_violations == 1) rep.witness = mid;
        }
    }
    return rep;
}

} // namespace polyunmix
