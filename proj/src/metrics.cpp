#include "polyunmix/metrics.hpp"

#include "polyunmix/hungarian.hpp"
#include "polyunmix/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

using nlohmann::json;

namespace polyunmix {

double sad(const Eigen::VectorXd& u, const Eigen::VectorXd& v)
{
    if (u.size() != v.size()) throw std::invalid_argument("sad: length mismatch");
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu <= 1e-12 || nv <= 1e-12) throw std::invalid_argument("sad: zero vector");
    const double cosine = std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
    return std::acos(cosine);
}

double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("rmse: length mismatch");
    return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

EvaluationReport match_and_score(const Eigen::MatrixXd& est_endmembers,
                                 const Eigen::MatrixXd& est_abundances, const GroundTruth& gt)
{
    const long m = gt.endmembers.cols();
    if (est_endmembers.cols() != m || est_abundances.rows() != m)
        throw std::invalid_argument("match_and_score: material count mismatch");
    if (est_endmembers.rows() != gt.endmembers.rows())
        throw std::invalid_argument("match_and_score: band count mismatch");
    if (est_abundances.cols() != gt.abundances.cols())
        throw std::invalid_argument("match_and_score: pixel count mismatch");

    Eigen::MatrixXd cost(m, m);
    for (long e = 0; e < m; ++e)
        for (long t = 0; t < m; ++t) cost(e, t) = sad(est_endmembers.col(e), gt.endmembers.col(t));

    EvaluationReport rep;
    rep.assignment = hungarian_min_cost(cost);
    rep.per_material_sad.assign(static_cast<std::size_t>(m), 0.0);
    rep.per_material_rmse.assign(static_cast<std::size_t>(m), 0.0);
    for (long e = 0; e < m; ++e) {
        const int t = rep.assignment[static_cast<std::size_t>(e)];
        rep.per_material_sad[static_cast<std::size_t>(t)] = cost(e, t);
        rep.per_material_rmse[static_cast<std::size_t>(t)] =
            rmse(est_abundances.row(e).transpose(), gt.abundances.row(t).transpose());
    }
    double ssum = 0.0, rsum = 0.0;
    for (long t = 0; t < m; ++t) {
        ssum += rep.per_material_sad[static_cast<std::size_t>(t)];
        rsum += rep.per_material_rmse[static_cast<std::size_t>(t)];
    }
    rep.avg_sad = ssum / static_cast<double>(m);
    rep.avg_rmse = rsum / static_cast<double>(m);
    return rep;
}

double segmentation_accuracy(const ClassificationMap& pred, const ClassificationMap& truth)
{
    if (pred.labels.size() != truth.labels.size())
        throw std::invalid_argument("segmentation_accuracy: length mismatch");
    if (pred.m != truth.m)
        throw std::invalid_argument("segmentation_accuracy: class count mismatch");
    const int m = pred.m;
    Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < pred.labels.size(); ++i)
        confusion(pred.labels[i], truth.labels[i]) += 1.0;
    const std::vector<int> perm = hungarian_max_weight(confusion);
    double agree = 0.0;
    for (int p = 0; p < m; ++p) agree += confusion(p, perm[static_cast<std::size_t>(p)]);
    return agree / static_cast<double>(pred.labels.size());
}

ClassificationMap inject_label_noise(const ClassificationMap& labels, double p,
                                     std::uint64_t seed, bool other_classes_only)
{
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("inject_label_noise: p must be in [0, 1]");
    ClassificationMap out = labels;
    const int n = static_cast<int>(labels.labels.size());
    const int k = static_cast<int>(std::floor(p * n));
    if (k == 0 || labels.m < 1) return out;

    Pcg32 rng(seed);
    // distinct pixel sample via partial Fisher-Yates
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.bounded(static_cast<std::uint32_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    for (int i = 0; i < k; ++i) {
        const int pix = idx[static_cast<std::size_t>(i)];
        if (other_classes_only) {
            if (labels.m < 2) continue;
            const int shift = 1 + static_cast<int>(rng.bounded(static_cast<std::uint32_t>(labels.m - 1)));
            out.labels[static_cast<std::size_t>(pix)] =
                (labels.labels[static_cast<std::size_t>(pix)] + shift) % labels.m;
        } else {
            out.labels[static_cast<std::size_t>(pix)] =
                static_cast<int>(rng.bounded(static_cast<std::uint32_t>(labels.m)));
        }
    }
    return out;
}

json EvaluationReport::to_json(const std::string& config_hash) const
{
    json per = json::array();
    for (std::size_t i = 0; i < per_material_sad.size(); ++i)
        per.push_back({{"sad", per_material_sad[i]}, {"rmse", per_material_rmse[i]}});
    json j;
    j["per_material"] = per;
    j["avg_sad"] = avg_sad;
    j["avg_rmse"] = avg_rmse;
    j["assignment"] = assignment;
    if (accuracy) j["accuracy"] = *accuracy;
    if (!config_hash.empty()) j["config_hash"] = config_hash;
    return j;
}

} // namespace polyunmix
