#include "polyunmix/partition.hpp"

#include "polyunmix/cluster.hpp"
#include "polyunmix/hungarian.hpp"
#include "polyunmix/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace polyunmix {

double svm_primal_objective(const Eigen::MatrixXd& x, const std::vector<int>& y,
                            const Eigen::VectorXd& w, double c_reg)
{
    double obj = 0.5 * w.squaredNorm();
    for (long i = 0; i < x.rows(); ++i) {
        const double margin = static_cast<double>(y[static_cast<std::size_t>(i)]) * x.row(i).dot(w);
        obj += c_reg * std::max(0.0, 1.0 - margin);
    }
    return obj;
}

Eigen::VectorXd svm_train_binary(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                 double c_reg, std::uint64_t seed, double gap_tol, int max_epochs)
{
    const long n = x.rows();
    const long d = x.cols();
    if (static_cast<long>(y.size()) != n)
        throw std::invalid_argument("svm_train_binary: label length mismatch");

    // Dual: min 1/2 a'Qa - e'a, 0 <= a_i <= C, Q_ij = y_i y_j x_i.x_j,
    // with w = sum a_i y_i x_i maintained incrementally.
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd qii(n);
    for (long i = 0; i < n; ++i) qii(i) = x.row(i).squaredNorm();

    Pcg32 rng(seed);
    for (int epoch = 0; epoch < max_epochs; ++epoch) {
        const std::vector<int> order = rng.permutation(static_cast<int>(n));
        for (int idx : order) {
            const long i = idx;
            if (qii(i) <= 0.0) continue;
            const double yi = static_cast<double>(y[static_cast<std::size_t>(i)]);
            const double g = yi * x.row(i).dot(w) - 1.0;
            double pg = g;
            if (alpha(i) <= 0.0) pg = std::min(g, 0.0);
            else if (alpha(i) >= c_reg) pg = std::max(g, 0.0);
            if (pg == 0.0) continue;
            const double old = alpha(i);
            alpha(i) = std::min(std::max(old - g / qii(i), 0.0), c_reg);
            if (alpha(i) != old) w += (alpha(i) - old) * yi * x.row(i).transpose();
        }
        // duality gap: primal - dual, dual = sum(alpha) - 0.5||w||^2
        const double primal = svm_primal_objective(x, y, w, c_reg);
        const double dual = alpha.sum() - 0.5 * w.squaredNorm();
        if (primal - dual <= gap_tol * std::max(1.0, std::abs(primal))) break;
    }
    return w;
}

std::vector<SeparatingHyperplane> train_pairwise_svm(const Eigen::MatrixXd& data,
                                                     const ClassificationMap& labels,
                                                     double c_reg, double sample_fraction,
                                                     std::uint64_t seed)
{
    const int m = labels.m;
    if (m < 2) throw std::invalid_argument("train_pairwise_svm: need m >= 2 classes");
    if (static_cast<long>(labels.labels.size()) != data.rows())
        throw std::invalid_argument("train_pairwise_svm: label length mismatch");

    const std::vector<int> sampled = subsample(static_cast<int>(data.rows()), sample_fraction, seed);

    std::vector<SeparatingHyperplane> planes;
    std::uint64_t pair_seed = seed;
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            ++pair_seed;
            std::vector<long> rows;
            std::vector<int> y;
            auto collect = [&](const std::vector<int>& indices) {
                rows.clear();
                y.clear();
                for (int i : indices) {
                    const int lab = labels.labels[static_cast<std::size_t>(i)];
                    if (lab == a || lab == b) {
                        rows.push_back(i);
                        y.push_back(lab == a ? -1 : +1);
                    }
                }
            };
            collect(sampled);
            const bool has_a = std::find(y.begin(), y.end(), -1) != y.end();
            const bool has_b = std::find(y.begin(), y.end(), +1) != y.end();
            if (!has_a || !has_b) {
                // subsample missed a class entirely: fall back to all pixels
                std::vector<int> all(static_cast<std::size_t>(data.rows()));
                for (long i = 0; i < data.rows(); ++i) all[static_cast<std::size_t>(i)] = static_cast<int>(i);
                collect(all);
            }
            if (rows.empty())
                throw std::runtime_error("train_pairwise_svm: no pixels for class pair (" +
                                         std::to_string(a) + "," + std::to_string(b) + ")");

            Eigen::MatrixXd sub(static_cast<long>(rows.size()), data.cols());
            for (std::size_t r = 0; r < rows.size(); ++r) sub.row(static_cast<long>(r)) = data.row(rows[r]);

            Eigen::VectorXd w = svm_train_binary(sub, y, c_reg, pair_seed);
            const double nrm = w.norm();
            if (nrm <= 1e-12)
                throw std::runtime_error("inseparable degenerate pair (" + std::to_string(a) +
                                         "," + std::to_string(b) + "): zero separating normal");
            w /= nrm;

            // orient so class a lies on the nonpositive side by majority
            long neg_ok = 0, neg_total = 0;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (y[r] == -1) {
                    ++neg_total;
                    if (sub.row(static_cast<long>(r)).dot(w) <= 0.0) ++neg_ok;
                }
            }
            if (2 * neg_ok < neg_total) w = -w;

            planes.push_back({a, b, w});
        }
    }
    return planes;
}

namespace {

std::vector<int> sign_pattern(const std::vector<SeparatingHyperplane>& hyperplanes,
                              const Eigen::VectorXd& x)
{
    std::vector<int> pattern(hyperplanes.size());
    for (std::size_t h = 0; h < hyperplanes.size(); ++h) {
        const double v = hyperplanes[h].normal.dot(x);
        pattern[h] = v > 1e-12 ? 1 : 0; // |v| <= 1e-12 joins the nonpositive side
    }
    return pattern;
}

PolyhedralCone cone_from_pattern(const std::vector<SeparatingHyperplane>& hyperplanes,
                                 const std::vector<int>& pattern)
{
    std::vector<Halfspace> hs;
    hs.reserve(hyperplanes.size());
    for (std::size_t h = 0; h < hyperplanes.size(); ++h) {
        const Eigen::VectorXd w =
            pattern[h] == 0 ? hyperplanes[h].normal : Eigen::VectorXd(-hyperplanes[h].normal);
        hs.emplace_back(w, 0.0);
    }
    return PolyhedralCone(std::move(hs));
}

} // namespace

int ConePartition::region_of(const Eigen::VectorXd& x) const
{
    const std::vector<int> pattern = sign_pattern(hyperplanes, x);
    for (std::size_t c = 0; c < region_patterns.size(); ++c)
        if (region_patterns[c] == pattern) return static_cast<int>(c);
    return -1;
}

ConePartition build_partition(const std::vector<SeparatingHyperplane>& hyperplanes,
                              const Eigen::MatrixXd& data, const ClassificationMap& labels)
{
    const int m = labels.m;
    const long n = data.rows();
    if (m < 2) throw std::invalid_argument("build_partition: need m >= 2");
    if (n == 0) throw std::invalid_argument("build_partition: empty data");

    // group pixels by sign pattern (cells of the arrangement that hold data)
    std::map<std::vector<int>, std::vector<long>> cells;
    for (long i = 0; i < n; ++i)
        cells[sign_pattern(hyperplanes, data.row(i).transpose())].push_back(i);

    if (static_cast<int>(cells.size()) < m)
        throw std::runtime_error("degenerate arrangement: k < m (" +
                                 std::to_string(cells.size()) + " populated cells)");

    // rank by population, ties by lexicographic sign pattern (map order)
    std::vector<const std::pair<const std::vector<int>, std::vector<long>>*> ranked;
    for (const auto& kv : cells) ranked.push_back(&kv);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) {
        return a->second.size() > b->second.size();
    });
    ranked.resize(static_cast<std::size_t>(m));

    // cell-vs-label contingency counts
    Eigen::MatrixXd contingency = Eigen::MatrixXd::Zero(m, m);
    for (int cell = 0; cell < m; ++cell)
        for (long i : ranked[static_cast<std::size_t>(cell)]->second)
            contingency(cell, labels.labels[static_cast<std::size_t>(i)]) += 1.0;

    const std::vector<int> cell_to_class = hungarian_max_weight(contingency);

    ConePartition part;
    part.hyperplanes = hyperplanes;
    part.m = m;
    part.regions.reserve(static_cast<std::size_t>(m));
    part.region_populations.assign(static_cast<std::size_t>(m), 0);
    part.region_patterns.resize(static_cast<std::size_t>(m));
    std::vector<std::vector<int>> patterns_by_class(static_cast<std::size_t>(m));
    for (int cell = 0; cell < m; ++cell) {
        const int cls = cell_to_class[static_cast<std::size_t>(cell)];
        patterns_by_class[static_cast<std::size_t>(cls)] = ranked[static_cast<std::size_t>(cell)]->first;
        part.region_populations[static_cast<std::size_t>(cls)] =
            static_cast<long>(ranked[static_cast<std::size_t>(cell)]->second.size());
    }
    for (int cls = 0; cls < m; ++cls) {
        part.region_patterns[static_cast<std::size_t>(cls)] = patterns_by_class[static_cast<std::size_t>(cls)];
        part.regions.push_back(cone_from_pattern(hyperplanes, patterns_by_class[static_cast<std::size_t>(cls)]));
    }
    return part;
}

} // namespace polyunmix
