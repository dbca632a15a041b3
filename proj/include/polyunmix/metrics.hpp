#ifndef POLYUNMIX_METRICS_HPP
#define POLYUNMIX_METRICS_HPP

#include "polyunmix/types.hpp"

#include "json.hpp"

#include <cstdint>

namespace polyunmix {

struct EvaluationReport {
    std::vector<double> per_material_sad;  // radians, indexed by TRUE material
    std::vector<double> per_material_rmse;
    double avg_sad = 0.0;
    double avg_rmse = 0.0;
    std::vector<int> assignment; // estimated material -> true material
    std::optional<double> accuracy;

    nlohmann::json to_json(const std::string& config_hash = "") const;
};

// Spectral angle distance in radians; cosine clamped to [-1,1].
double sad(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Hungarian assignment minimizing total SAD between endmember columns; the
// same permutation then scores abundance rows with RMSE.
EvaluationReport match_and_score(const Eigen::MatrixXd& est_endmembers,
                                 const Eigen::MatrixXd& est_abundances,
                                 const GroundTruth& gt);

// Best label-permutation agreement fraction (Hungarian on the confusion
// matrix).
double segmentation_accuracy(const ClassificationMap& pred, const ClassificationMap& truth);

// Redraws floor(p*n) distinct pixels uniformly over all m classes (the
// redrawn value may equal the original). other_classes_only switches to a
// redraw excluding the current label.
ClassificationMap inject_label_noise(const ClassificationMap& labels, double p,
                                     std::uint64_t seed, bool other_classes_only = false);

} // namespace polyunmix

#endif
