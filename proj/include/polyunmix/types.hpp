#ifndef POLYUNMIX_TYPES_HPP
#define POLYUNMIX_TYPES_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace polyunmix {

// Observed cube Y flattened row-major: one pixel spectrum per row (n x d).
struct SpectralDataset {
    Eigen::MatrixXd data; // n x d
    int height = 0;
    int width = 0;
    std::optional<Eigen::VectorXd> band_wavelengths;

    int n_pixels() const { return static_cast<int>(data.rows()); }
    int n_bands() const { return static_cast<int>(data.cols()); }

    void validate() const;
};

// Per-pixel class labels in {0..m-1}, row-major over the image.
struct ClassificationMap {
    std::vector<int> labels;
    int m = 0;

    void validate() const;
};

struct GroundTruth {
    Eigen::MatrixXd endmembers; // d x m
    Eigen::MatrixXd abundances; // m x n
    std::optional<std::vector<int>> labels;

    int n_materials() const { return static_cast<int>(endmembers.cols()); }
    void validate() const;
};

// Per-column argmax with lowest-index tie-break.
std::vector<int> argmax_labels(const Eigen::MatrixXd& abundances);

} // namespace polyunmix

#endif
