#ifndef POLYUNMIX_PIPELINE_HPP
#define POLYUNMIX_PIPELINE_HPP

#include "polyunmix/io.hpp"
#include "polyunmix/partition.hpp"
#include "polyunmix/types.hpp"

#include <cstdint>
#include <optional>

namespace polyunmix {

struct RunConfig {
    // preprocessing
    bool sphere_normalize = true;
    bool pca_enabled = true;
    int pca_dim = 0; // 0 = default d' = m

    // segmentation
    std::string cluster_method = "gmm"; // kmeans | gmm | external
    double cluster_fraction = 0.25;     // GMM fit subsample
    std::uint64_t cluster_seed = 0;

    // separation hyperplanes
    double svm_c = 1.0;
    double svm_fraction = 0.20;
    std::uint64_t svm_seed = 0;

    // stages 2-3
    double saturation = 0.0; // 0 = auto 1/(2 std(D'))
    double lambda = -1.0;    // < 0 = auto (0, escalated when ill-conditioned)
    double cond_limit = 1e10;
    bool tikhonov_fallback = false;
    bool project_final_abundances = false;

    void validate() const;
    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

struct PipelineResult {
    ResultBundle bundle;
    ClassificationMap segmentation;
    Eigen::MatrixXd initial_abundances; // m x n
    double saturation_used = 0.0;
    double lambda_used = 0.0;
    double segmentation_seconds = 0.0;
    double unmixing_seconds = 0.0;
};

// Stages 1-3 end to end. external_labels bypasses the built-in clustering
// (cluster_method "external").
PipelineResult run_pipeline(const SpectralDataset& dataset, int m, const RunConfig& config,
                            const std::optional<ClassificationMap>& external_labels = std::nullopt);

// Preprocess + clustering only; what `segment` emits.
ClassificationMap run_segmentation(const SpectralDataset& dataset, int m, const RunConfig& config);

// FNV-1a over the canonical config dump, reported in metrics.json.
std::string config_hash(const nlohmann::json& config);

} // namespace polyunmix

#endif
