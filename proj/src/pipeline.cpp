#include "polyunmix/pipeline.hpp"

#include "polyunmix/cluster.hpp"
#include "polyunmix/geometry.hpp"
#include "polyunmix/preprocess.hpp"
#include "polyunmix/unmix.hpp"

#include <chrono>
#include <stdexcept>

using nlohmann::json;

namespace polyunmix {

void RunConfig::validate() const
{
    if (cluster_method != "kmeans" && cluster_method != "gmm" && cluster_method != "external")
        throw std::invalid_argument("config: unknown clustering method '" + cluster_method + "'");
    if (!(cluster_fraction > 0.0) || cluster_fraction > 1.0)
        throw std::invalid_argument("config: cluster fraction must be in (0, 1]");
    if (!(svm_fraction > 0.0) || svm_fraction > 1.0)
        throw std::invalid_argument("config: svm sample fraction must be in (0, 1]");
    if (svm_c <= 0.0) throw std::invalid_argument("config: svm C must be positive");
    if (saturation < 0.0) throw std::invalid_argument("saturation must be positive");
    if (pca_dim < 0) throw std::invalid_argument("config: pca_dim must be >= 0");
}

json RunConfig::to_json() const
{
    json j;
    j["sphere_normalize"] = sphere_normalize;
    j["pca_enabled"] = pca_enabled;
    j["pca_dim"] = pca_dim;
    j["cluster_method"] = cluster_method;
    j["cluster_fraction"] = cluster_fraction;
    j["cluster_seed"] = cluster_seed;
    j["svm_c"] = svm_c;
    j["svm_fraction"] = svm_fraction;
    j["svm_seed"] = svm_seed;
    j["saturation"] = saturation;
    j["lambda"] = lambda;
    j["cond_limit"] = cond_limit;
    j["tikhonov_fallback"] = tikhonov_fallback;
    j["project_final_abundances"] = project_final_abundances;
    return j;
}

RunConfig RunConfig::from_json(const json& j)
{
    RunConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("sphere_normalize", c.sphere_normalize);
    get("pca_enabled", c.pca_enabled);
    get("pca_dim", c.pca_dim);
    get("cluster_method", c.cluster_method);
    get("cluster_fraction", c.cluster_fraction);
    get("cluster_seed", c.cluster_seed);
    get("svm_c", c.svm_c);
    get("svm_fraction", c.svm_fraction);
    get("svm_seed", c.svm_seed);
    get("saturation", c.saturation);
    get("lambda", c.lambda);
    get("cond_limit", c.cond_limit);
    get("tikhonov_fallback", c.tikhonov_fallback);
    get("project_final_abundances", c.project_final_abundances);
    return c;
}

std::string config_hash(const json& config)
{
    const std::string s = config.dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::MatrixXd preprocess(const SpectralDataset& dataset, int m, const RunConfig& config)
{
    SpectralDataset work = config.sphere_normalize ? sphere_normalize(dataset) : dataset;
    if (!config.pca_enabled) return work.data;
    const int d = work.n_bands();
    const int d_prime = std::min(config.pca_dim > 0 ? config.pca_dim : m, d);
    const ProjectionBasis basis = fit_projection(work.data, d_prime);
    return apply_projection(basis, work.data);
}

// lambda = 0 while the Gram matrix is well-conditioned, otherwise a small
// trace-scaled ridge.
double auto_lambda(const Eigen::MatrixXd& gram, double cond_limit)
{
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram);
    const long m = gram.rows();
    const double smin = svd.singularValues()(m - 1);
    const double smax = svd.singularValues()(0);
    if (smin > 0.0 && smax / smin <= cond_limit) return 0.0;
    return 1e-8 * gram.trace() / static_cast<double>(m);
}

} // namespace

ClassificationMap run_segmentation(const SpectralDataset& dataset, int m, const RunConfig& config)
{
    config.validate();
    const Eigen::MatrixXd reduced = preprocess(dataset, m, config);
    if (config.cluster_method == "kmeans") return kmeans(reduced, m, config.cluster_seed).map;
    if (config.cluster_method == "gmm") {
        const std::vector<int> idx =
            subsample(static_cast<int>(reduced.rows()), config.cluster_fraction, config.cluster_seed);
        Eigen::MatrixXd sample(static_cast<long>(idx.size()), reduced.cols());
        for (std::size_t i = 0; i < idx.size(); ++i)
            sample.row(static_cast<long>(i)) = reduced.row(idx[i]);
        const GmmModel model = gmm_fit(sample, m, config.cluster_seed);
        return gmm_predict(model, reduced);
    }
    throw std::invalid_argument("run_segmentation: external labels must be supplied by the caller");
}

PipelineResult run_pipeline(const SpectralDataset& dataset, int m, const RunConfig& config,
                            const std::optional<ClassificationMap>& external_labels)
{
    config.validate();
    dataset.validate();
    if (m < 2) throw std::invalid_argument("run_pipeline: need m >= 2 materials");

    PipelineResult out;
    const long n = dataset.n_pixels();

    // Stage 1a: preprocessing + segmentation (the clustering time is reported
    // separately from the segmentation-to-unmixing time)
    const Eigen::MatrixXd reduced = preprocess(dataset, m, config);

    const auto t_seg = std::chrono::steady_clock::now();
    if (config.cluster_method == "external" || external_labels) {
        if (!external_labels)
            throw std::invalid_argument("run_pipeline: external clustering selected but no "
                                        "label map supplied");
        if (static_cast<long>(external_labels->labels.size()) != n)
            throw std::invalid_argument("run_pipeline: external label map length mismatch");
        out.segmentation = *external_labels;
        if (out.segmentation.m < m) out.segmentation.m = m;
    } else {
        out.segmentation = run_segmentation(dataset, m, config);
    }
    out.segmentation.validate();
    out.segmentation_seconds = seconds_since(t_seg);

    // Stages 1b-3: hyperplanes, partition, distances, recovery
    const auto t_unmix = std::chrono::steady_clock::now();
    const std::vector<SeparatingHyperplane> planes =
        train_pairwise_svm(reduced, out.segmentation, config.svm_c, config.svm_fraction,
                           config.svm_seed);
    const ConePartition partition = build_partition(planes, reduced, out.segmentation);

    const Eigen::MatrixXd distances = compute_distance_matrix(partition, reduced);
    std::vector<char> mask(static_cast<std::size_t>(n), 0);
    for (long j = 0; j < n; ++j)
        mask[static_cast<std::size_t>(j)] =
            partition.region_of(reduced.row(j).transpose()) ==
            out.segmentation.labels[static_cast<std::size_t>(j)];
    const ReferenceBasis ref = select_reference_basis(distances, out.segmentation.labels, &mask);
    const Eigen::MatrixXd d_prime = change_of_basis(distances, ref.basis, config.cond_limit,
                                                    config.tikhonov_fallback);

    out.saturation_used =
        config.saturation > 0.0 ? config.saturation : saturation_default(d_prime);
    out.initial_abundances = initial_abundances(d_prime, out.saturation_used);

    const Eigen::MatrixXd y = dataset.data.transpose(); // d x n, original bands
    const Eigen::MatrixXd gram_a = out.initial_abundances * out.initial_abundances.transpose();
    out.lambda_used = config.lambda >= 0.0 ? config.lambda
                                           : auto_lambda(gram_a, config.cond_limit);
    Eigen::MatrixXd endmembers = recover_endmembers(y, out.initial_abundances, out.lambda_used);

    double lambda_abund = config.lambda >= 0.0
        ? config.lambda
        : auto_lambda(endmembers.transpose() * endmembers, config.cond_limit);
    Eigen::MatrixXd abundances = recover_abundances(y, endmembers, lambda_abund);
    if (config.project_final_abundances)
        for (long j = 0; j < abundances.cols(); ++j)
            abundances.col(j) = project_onto_simplex(abundances.col(j));
    out.unmixing_seconds = seconds_since(t_unmix);

    out.bundle.endmembers = std::move(endmembers);
    out.bundle.abundances = std::move(abundances);
    out.bundle.labels = dominant_labels(out.bundle.abundances).labels;
    json cfg = config.to_json();
    cfg["m"] = m;
    cfg["saturation_used"] = out.saturation_used;
    cfg["lambda_used"] = out.lambda_used;
    out.bundle.config = cfg;
    out.bundle.timings = {{"segmentation_seconds", out.segmentation_seconds},
                          {"unmixing_seconds", out.unmixing_seconds}};
    return out;
}

} // namespace polyunmix
