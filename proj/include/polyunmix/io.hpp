#ifndef POLYUNMIX_IO_HPP
#define POLYUNMIX_IO_HPP

#include "polyunmix/types.hpp"

#include <optional>
#include <string>

// vendored single-header json
#include "json.hpp"

namespace polyunmix {

// A run's output: estimates plus the exact configuration that produced them.
struct ResultBundle {
    Eigen::MatrixXd endmembers; // d x m
    Eigen::MatrixXd abundances; // m x n
    std::vector<int> labels;    // length n
    nlohmann::json config;
    nlohmann::json timings;              // per-stage seconds
    std::optional<nlohmann::json> metrics;
};

struct LoadedBundle {
    SpectralDataset dataset;
    std::optional<GroundTruth> ground_truth;
};

// Directory layout: header.json + data.npy, optional gt_endmembers.npy,
// gt_abundances.npy, gt_labels.npy.
LoadedBundle load_bundle(const std::string& dir);

void save_bundle(const ResultBundle& result, const std::string& dir, bool overwrite = false);
ResultBundle load_result_bundle(const std::string& dir);

// Writes a dataset (+ optional ground truth) as an input bundle, used by the
// synth generator and round-trip tests.
void save_input_bundle(const SpectralDataset& ds, const std::optional<GroundTruth>& gt,
                       const std::string& dir, bool overwrite = false);

// CSV of h rows x w integer columns, values in {0..m-1}; m taken as 1+max
// label unless declared_m is given. Absent classes are accepted (warning on
// stderr).
ClassificationMap load_labels_csv(const std::string& path, int declared_m = -1);
void save_labels_csv(const ClassificationMap& map, int height, int width, const std::string& path);

} // namespace polyunmix

#endif
