#ifndef POLYUNMIX_CLUSTER_HPP
#define POLYUNMIX_CLUSTER_HPP

#include "polyunmix/types.hpp"

#include <cstdint>

namespace polyunmix {

struct KmeansResult {
    ClassificationMap map;
    Eigen::MatrixXd centroids; // m x d'
    double inertia = 0.0;
    int iterations = 0;
};

// Diagonal-covariance mixture; variances floored at 1e-8.
struct GmmModel {
    Eigen::VectorXd weights;   // m
    Eigen::MatrixXd means;     // m x d'
    Eigen::MatrixXd variances; // m x d'
};

// k-means++ seeding, Lloyd iterations to an assignment fixpoint. Empty
// clusters are re-seeded to the point farthest from its centroid.
KmeansResult kmeans(const Eigen::MatrixXd& data, int m, std::uint64_t seed, int max_iter = 300);

// EM from a k-means initialization; log-likelihood nondecreasing up to
// numerical slack, stops when the improvement drops below tol.
GmmModel gmm_fit(const Eigen::MatrixXd& data, int m, std::uint64_t seed, int max_iter = 200,
                 double tol = 1e-6);

ClassificationMap gmm_predict(const GmmModel& model, const Eigen::MatrixXd& data);

// Per-sample mean log-likelihood, used by tests to check EM monotonicity.
double gmm_log_likelihood(const GmmModel& model, const Eigen::MatrixXd& data);

// floor(fraction*n) distinct indices, uniform without replacement,
// deterministic per seed, returned in increasing order.
std::vector<int> subsample(int n, double fraction, std::uint64_t seed);

} // namespace polyunmix

#endif
