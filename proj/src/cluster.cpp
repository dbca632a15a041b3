#include "polyunmix/cluster.hpp"

#include "polyunmix/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace polyunmix {

namespace {

int nearest_centroid(const Eigen::MatrixXd& centroids, const Eigen::RowVectorXd& x)
{
    int best = 0;
    double best_d = (centroids.row(0) - x).squaredNorm();
    for (long c = 1; c < centroids.rows(); ++c) {
        const double d = (centroids.row(c) - x).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& data, int m, Pcg32& rng)
{
    const long n = data.rows();
    Eigen::MatrixXd centroids(m, data.cols());
    const long first = static_cast<long>(rng.bounded(static_cast<std::uint32_t>(n)));
    centroids.row(0) = data.row(first);

    Eigen::VectorXd dist2(n);
    for (long i = 0; i < n; ++i) dist2(i) = (data.row(i) - centroids.row(0)).squaredNorm();

    for (int c = 1; c < m; ++c) {
        double total = 0.0;
        for (long i = 0; i < n; ++i) total += dist2(i);
        long pick = 0;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (long i = 0; i < n; ++i) {
                acc += dist2(i);
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<long>(rng.bounded(static_cast<std::uint32_t>(n)));
        }
        centroids.row(c) = data.row(pick);
        for (long i = 0; i < n; ++i)
            dist2(i) = std::min(dist2(i), (data.row(i) - centroids.row(c)).squaredNorm());
    }
    return centroids;
}

} // namespace

KmeansResult kmeans(const Eigen::MatrixXd& data, int m, std::uint64_t seed, int max_iter)
{
    const long n = data.rows();
    if (m < 1) throw std::invalid_argument("kmeans: m must be >= 1");
    if (n < m) throw std::invalid_argument("kmeans: m > n");

    Pcg32 rng(seed);
    Eigen::MatrixXd centroids = kmeanspp_init(data, m, rng);
    std::vector<int> assign(static_cast<std::size_t>(n), -1);

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        bool changed = false;
        for (long i = 0; i < n; ++i) {
            const int c = nearest_centroid(centroids, data.row(i));
            if (c != assign[static_cast<std::size_t>(i)]) {
                assign[static_cast<std::size_t>(i)] = c;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(m, data.cols());
        std::vector<long> counts(static_cast<std::size_t>(m), 0);
        for (long i = 0; i < n; ++i) {
            sums.row(assign[static_cast<std::size_t>(i)]) += data.row(i);
            ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < m; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            } else {
                // re-seed an empty cluster to the point farthest from its
                // current centroid
                long far_idx = 0;
                double far_d = -1.0;
                for (long i = 0; i < n; ++i) {
                    const double d =
                        (data.row(i) - centroids.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        far_idx = i;
                    }
                }
                centroids.row(c) = data.row(far_idx);
                assign[static_cast<std::size_t>(far_idx)] = c;
            }
        }
    }

    KmeansResult res;
    res.map.labels = assign;
    res.map.m = m;
    res.centroids = centroids;
    res.iterations = iter;
    double inertia = 0.0;
    for (long i = 0; i < n; ++i)
        inertia += (data.row(i) - centroids.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
    res.inertia = inertia;
    return res;
}

namespace {

constexpr double kVarFloor = 1e-8;

// Row c of out: log weight_c + log N(x | mean_c, diag var_c) for every sample.
Eigen::MatrixXd weighted_log_pdf(const GmmModel& model, const Eigen::MatrixXd& data)
{
    const long n = data.rows();
    const long m = model.means.rows();
    const long d = data.cols();
    Eigen::MatrixXd out(m, n);
    for (long c = 0; c < m; ++c) {
        double log_norm = 0.0;
        for (long k = 0; k < d; ++k) log_norm += std::log(2.0 * M_PI * model.variances(c, k));
        log_norm *= -0.5;
        const double log_w = std::log(std::max(model.weights(c), 1e-300));
        for (long i = 0; i < n; ++i) {
            double q = 0.0;
            for (long k = 0; k < d; ++k) {
                const double diff = data(i, k) - model.means(c, k);
                q += diff * diff / model.variances(c, k);
            }
            out(c, i) = log_w + log_norm - 0.5 * q;
        }
    }
    return out;
}

} // namespace

double gmm_log_likelihood(const GmmModel& model, const Eigen::MatrixXd& data)
{
    const Eigen::MatrixXd lp = weighted_log_pdf(model, data);
    double total = 0.0;
    for (long i = 0; i < lp.cols(); ++i) {
        const double mx = lp.col(i).maxCoeff();
        double s = 0.0;
        for (long c = 0; c < lp.rows(); ++c) s += std::exp(lp(c, i) - mx);
        total += mx + std::log(s);
    }
    return total / static_cast<double>(lp.cols());
}

GmmModel gmm_fit(const Eigen::MatrixXd& data, int m, std::uint64_t seed, int max_iter, double tol)
{
    const long n = data.rows();
    const long d = data.cols();
    if (n < m) throw std::invalid_argument("gmm_fit: m > n");

    const KmeansResult km = kmeans(data, m, seed);
    GmmModel model;
    model.weights = Eigen::VectorXd::Zero(m);
    model.means = km.centroids;
    model.variances = Eigen::MatrixXd::Zero(m, d);
    std::vector<long> counts(static_cast<std::size_t>(m), 0);
    for (long i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(km.map.labels[static_cast<std::size_t>(i)])];
    for (long i = 0; i < n; ++i) {
        const int c = km.map.labels[static_cast<std::size_t>(i)];
        model.variances.row(c) +=
            (data.row(i) - model.means.row(c)).array().square().matrix();
    }
    for (int c = 0; c < m; ++c) {
        const double cnt = static_cast<double>(std::max<long>(counts[static_cast<std::size_t>(c)], 1));
        model.weights(c) = static_cast<double>(counts[static_cast<std::size_t>(c)]) / static_cast<double>(n);
        model.variances.row(c) /= cnt;
        for (long k = 0; k < d; ++k)
            model.variances(c, k) = std::max(model.variances(c, k), kVarFloor);
    }
    model.weights = model.weights.cwiseMax(1e-12);
    model.weights /= model.weights.sum();

    double prev_ll = -std::numeric_limits<double>::infinity();
    bool floored = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        // E-step
        const Eigen::MatrixXd lp = weighted_log_pdf(model, data);
        Eigen::MatrixXd resp(m, n);
        double ll = 0.0;
        for (long i = 0; i < n; ++i) {
            const double mx = lp.col(i).maxCoeff();
            double s = 0.0;
            for (long c = 0; c < m; ++c) s += std::exp(lp(c, i) - mx);
            const double log_total = mx + std::log(s);
            ll += log_total;
            for (long c = 0; c < m; ++c) resp(c, i) = std::exp(lp(c, i) - log_total);
        }
        ll /= static_cast<double>(n);
        if (ll - prev_ll < tol && iter > 0) break;
        prev_ll = ll;

        // M-step
        for (long c = 0; c < m; ++c) {
            double wsum = 0.0;
            for (long i = 0; i < n; ++i) wsum += resp(c, i);
            model.weights(c) = wsum / static_cast<double>(n);
            if (wsum < 1e-12) wsum = 1e-12;
            Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
            for (long i = 0; i < n; ++i) mean += resp(c, i) * data.row(i);
            mean /= wsum;
            model.means.row(c) = mean;
            Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(d);
            for (long i = 0; i < n; ++i)
                var += resp(c, i) * (data.row(i) - mean).array().square().matrix();
            var /= wsum;
            for (long k = 0; k < d; ++k) {
                if (var(k) < kVarFloor) {
                    var(k) = kVarFloor;
                    floored = true;
                }
            }
            model.variances.row(c) = var;
        }
        model.weights = model.weights.cwiseMax(1e-12);
        model.weights /= model.weights.sum();
    }
    if (floored)
        std::cerr << "warning: gmm_fit: variance floor engaged on a degenerate component\n";
    return model;
}

ClassificationMap gmm_predict(const GmmModel& model, const Eigen::MatrixXd& data)
{
    if (data.cols() != model.means.cols())
        throw std::invalid_argument("gmm_predict: dimension mismatch");
    const Eigen::MatrixXd lp = weighted_log_pdf(model, data);
    ClassificationMap map;
    map.m = static_cast<int>(model.means.rows());
    map.labels.resize(static_cast<std::size_t>(data.rows()));
    for (long i = 0; i < data.rows(); ++i) {
        int best = 0;
        for (long c = 1; c < lp.rows(); ++c)
            if (lp(c, i) > lp(best, i)) best = static_cast<int>(c);
        map.labels[static_cast<std::size_t>(i)] = best;
    }
    return map;
}

std::vector<int> subsample(int n, double fraction, std::uint64_t seed)
{
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("subsample: fraction must be in (0, 1]");
    const int k = static_cast<int>(std::floor(fraction * n));
    Pcg32 rng(seed);
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.bounded(static_cast<std::uint32_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
}

} // namespace polyunmix
