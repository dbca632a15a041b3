#ifndef POLYUNMIX_NPY_HPP
#define POLYUNMIX_NPY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace polyunmix::npy {

// Minimal NumPy .npy v1.0 reader/writer. Matrices are stored row-major
// ('<f8', fortran_order False); label vectors as 1-D '<i8'. Little-endian
// only, which is also what the format emits on all common platforms.

void save_matrix(const std::string& path, const Eigen::MatrixXd& m);
void save_vector(const std::string& path, const Eigen::VectorXd& v);
void save_int_vector(const std::string& path, const std::vector<std::int64_t>& v);

// Loads a '<f8' array of rank 1 or 2. Rank-1 arrays come back as n x 1.
Eigen::MatrixXd load_matrix(const std::string& path, std::vector<std::size_t>* shape_out = nullptr);
std::vector<std::int64_t> load_int_vector(const std::string& path);

} // namespace polyunmix::npy

#endif
