#ifndef POLYUNMIX_SYNTH_HPP
#define POLYUNMIX_SYNTH_HPP

#include "polyunmix/types.hpp"

#include <cstdint>

namespace polyunmix {

struct SynthConfig {
    int d = 16;
    int m = 3;
    int height = 50;
    int width = 50;
    double noise_sigma = 0.0;
    double dirichlet_alpha = 0.5;
    std::uint64_t seed = 0;
};

struct SynthInstance {
    SpectralDataset dataset;
    GroundTruth ground_truth;
};

// Y = MA + E with M entrywise uniform(0.1, 1), re-sampled until the smallest
// singular value exceeds 0.05x the largest; A columns symmetric Dirichlet;
// E Gaussian. Deterministic per seed.
SynthInstance generate(const SynthConfig& config);

struct TheoremReport {
    long trials = 0;
    long convexity_violations = 0;
    long homogeneity_violations = 0;
    long ties_skipped = 0;
    bool origin_in_all_regions = false;
    Eigen::VectorXd witness; // first counterexample point, if any

    bool passed() const
    {
        return convexity_violations == 0 && homogeneity_violations == 0 && origin_in_all_regions;
    }
};

// Monte-Carlo certificate for the cone-partition geometry: dominant labels
// (from exact least-squares coefficients on M) are preserved under convex
// combination and positive scaling; the origin's coefficient vector is zero.
// Pairs whose label margin falls inside the 1e-9 tie band are skipped.
TheoremReport verify_theorem(const Eigen::MatrixXd& endmembers, long trials, std::uint64_t seed);

} // namespace polyunmix

#endif
