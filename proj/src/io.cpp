#include "polyunmix/io.hpp"

#include "polyunmix/npy.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;
using nlohmann::json;

namespace polyunmix {

void SpectralDataset::validate() const
{
    const long n = data.rows();
    const long d = data.cols();
    if (n < 1 || d < 1) throw std::runtime_error("dataset: empty data matrix");
    if (static_cast<long>(height) * width != n)
        throw std::runtime_error("dataset: height*width does not match pixel count");
    if (!data.allFinite()) throw std::runtime_error("dataset: non-finite values in data");
    if (band_wavelengths && band_wavelengths->size() != d)
        throw std::runtime_error("dataset: wavelength list length does not match band count");
}

void ClassificationMap::validate() const
{
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] < 0 || labels[i] >= m)
            throw std::runtime_error("classification map: label out of range at pixel " +
                                     std::to_string(i));
}

std::vector<int> argmax_labels(const Eigen::MatrixXd& abundances)
{
    std::vector<int> labels(static_cast<std::size_t>(abundances.cols()));
    for (long j = 0; j < abundances.cols(); ++j) {
        int best = 0;
        for (long i = 1; i < abundances.rows(); ++i)
            if (abundances(i, j) > abundances(best, j)) best = static_cast<int>(i);
        labels[static_cast<std::size_t>(j)] = best;
    }
    return labels;
}

void GroundTruth::validate() const
{
    const long m = endmembers.cols();
    const long n = abundances.cols();
    if (abundances.rows() != m)
        throw std::runtime_error("ground truth: endmember/abundance material count mismatch");
    if (!endmembers.allFinite() || !abundances.allFinite())
        throw std::runtime_error("ground truth: non-finite values");
    for (long j = 0; j < n; ++j) {
        double sum = 0.0;
        for (long i = 0; i < m; ++i) {
            if (abundances(i, j) < -1e-9)
                throw std::runtime_error("ground truth: abundance simplex violation (negative "
                                         "entry) at pixel " + std::to_string(j));
            sum += abundances(i, j);
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw std::runtime_error("ground truth: abundance simplex violation (column sum " +
                                     std::to_string(sum) + ") at pixel " + std::to_string(j));
    }
    if (labels) {
        if (static_cast<long>(labels->size()) != n)
            throw std::runtime_error("ground truth: label length mismatch");
        const std::vector<int> expect = argmax_labels(abundances);
        for (long j = 0; j < n; ++j)
            if ((*labels)[static_cast<std::size_t>(j)] != expect[static_cast<std::size_t>(j)])
                throw std::runtime_error(
                    "ground truth: labels disagree with abundance argmax at pixel " +
                    std::to_string(j));
    }
}

namespace {

json read_json_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("corrupt JSON in " + path + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const json& j)
{
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

} // namespace

LoadedBundle load_bundle(const std::string& dir)
{
    const fs::path p(dir);
    if (!fs::is_directory(p)) throw std::runtime_error("bundle directory not found: " + dir);

    const json header = read_json_file((p / "header.json").string());
    LoadedBundle out;
    out.dataset.height = header.at("height").get<int>();
    out.dataset.width = header.at("width").get<int>();
    const int bands = header.at("bands").get<int>();

    out.dataset.data = npy::load_matrix((p / "data.npy").string());
    if (out.dataset.data.rows() != static_cast<long>(out.dataset.height) * out.dataset.width ||
        out.dataset.data.cols() != bands)
        throw std::runtime_error("bundle: data.npy shape does not match header.json");
    if (header.contains("wavelengths") && !header["wavelengths"].is_null()) {
        const auto wl = header["wavelengths"].get<std::vector<double>>();
        out.dataset.band_wavelengths =
            Eigen::Map<const Eigen::VectorXd>(wl.data(), static_cast<long>(wl.size()));
    }
    out.dataset.validate();

    const bool has_m = fs::exists(p / "gt_endmembers.npy");
    const bool has_a = fs::exists(p / "gt_abundances.npy");
    if (has_m != has_a)
        throw std::runtime_error("bundle: ground truth requires both gt_endmembers.npy "
                                 "and gt_abundances.npy");
    if (has_m) {
        GroundTruth gt;
        gt.endmembers = npy::load_matrix((p / "gt_endmembers.npy").string());
        gt.abundances = npy::load_matrix((p / "gt_abundances.npy").string());
        if (gt.endmembers.rows() != out.dataset.n_bands())
            throw std::runtime_error("bundle: gt_endmembers band count mismatch");
        if (gt.abundances.cols() != out.dataset.n_pixels())
            throw std::runtime_error("bundle: gt_abundances pixel count mismatch");
        if (fs::exists(p / "gt_labels.npy")) {
            const auto raw = npy::load_int_vector((p / "gt_labels.npy").string());
            std::vector<int> labels(raw.size());
            for (std::size_t i = 0; i < raw.size(); ++i) labels[i] = static_cast<int>(raw[i]);
            gt.labels = std::move(labels);
        }
        gt.validate();
        if (header.contains("num_materials") && !header["num_materials"].is_null() &&
            header["num_materials"].get<int>() != gt.n_materials())
            throw std::runtime_error("bundle: num_materials disagrees with ground truth");
        out.ground_truth = std::move(gt);
    }
    return out;
}

void save_input_bundle(const SpectralDataset& ds, const std::optional<GroundTruth>& gt,
                       const std::string& dir, bool overwrite)
{
    ds.validate();
    const fs::path p(dir);
    if (fs::exists(p) && !fs::is_empty(p) && !overwrite)
        throw std::runtime_error("refusing to write into non-empty directory " + dir +
                                 " (overwrite disabled)");
    fs::create_directories(p);

    json header;
    header["height"] = ds.height;
    header["width"] = ds.width;
    header["bands"] = ds.n_bands();
    if (gt) header["num_materials"] = gt->n_materials();
    if (ds.band_wavelengths) {
        std::vector<double> wl(ds.band_wavelengths->data(),
                               ds.band_wavelengths->data() + ds.band_wavelengths->size());
        header["wavelengths"] = wl;
    }
    write_json_file((p / "header.json").string(), header);
    npy::save_matrix((p / "data.npy").string(), ds.data);
    if (gt) {
        gt->validate();
        npy::save_matrix((p / "gt_endmembers.npy").string(), gt->endmembers);
        npy::save_matrix((p / "gt_abundances.npy").string(), gt->abundances);
        if (gt->labels) {
            std::vector<std::int64_t> raw(gt->labels->begin(), gt->labels->end());
            npy::save_int_vector((p / "gt_labels.npy").string(), raw);
        }
    }
}

void save_bundle(const ResultBundle& result, const std::string& dir, bool overwrite)
{
    if (result.endmembers.cols() == 0 || result.abundances.rows() == 0)
        throw std::runtime_error("degenerate result: no materials to save");
    if (result.endmembers.cols() != result.abundances.rows())
        throw std::runtime_error("result: endmember/abundance material count mismatch");
    if (static_cast<long>(result.labels.size()) != result.abundances.cols())
        throw std::runtime_error("result: label length mismatch");

    const fs::path p(dir);
    if (fs::exists(p) && !fs::is_empty(p) && !overwrite)
        throw std::runtime_error("refusing to write into non-empty directory " + dir +
                                 " (overwrite disabled)");
    fs::create_directories(p);
    npy::save_matrix((p / "endmembers.npy").string(), result.endmembers);
    npy::save_matrix((p / "abundances.npy").string(), result.abundances);
    std::vector<std::int64_t> raw(result.labels.begin(), result.labels.end());
    npy::save_int_vector((p / "labels.npy").string(), raw);
    json config = result.config;
    config["timings"] = result.timings;
    write_json_file((p / "config.json").string(), config);
    if (result.metrics) write_json_file((p / "metrics.json").string(), *result.metrics);
}

ResultBundle load_result_bundle(const std::string& dir)
{
    const fs::path p(dir);
    if (!fs::is_directory(p)) throw std::runtime_error("result directory not found: " + dir);
    ResultBundle r;
    r.endmembers = npy::load_matrix((p / "endmembers.npy").string());
    r.abundances = npy::load_matrix((p / "abundances.npy").string());
    const auto raw = npy::load_int_vector((p / "labels.npy").string());
    r.labels.assign(raw.begin(), raw.end());
    if (fs::exists(p / "config.json")) r.config = read_json_file((p / "config.json").string());
    if (fs::exists(p / "metrics.json")) r.metrics = read_json_file((p / "metrics.json").string());
    if (r.endmembers.cols() != r.abundances.rows())
        throw std::runtime_error("result bundle: material count mismatch");
    return r;
}

ClassificationMap load_labels_csv(const std::string& path, int declared_m)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open labels CSV: " + path);
    ClassificationMap map;
    std::string line;
    long width = -1;
    int max_label = -1;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        long count = 0;
        while (std::getline(ss, tok, ',')) {
            int v;
            try {
                v = std::stoi(tok);
            } catch (const std::exception&) {
                throw std::runtime_error("labels CSV: non-integer token '" + tok + "'");
            }
            if (v < 0) throw std::runtime_error("labels CSV: negative label " + std::to_string(v));
            if (declared_m >= 0 && v >= declared_m)
                throw std::runtime_error("labels CSV: label " + std::to_string(v) +
                                         " out of range for m=" + std::to_string(declared_m));
            map.labels.push_back(v);
            max_label = std::max(max_label, v);
            ++count;
        }
        if (width < 0) width = count;
        else if (count != width)
            throw std::runtime_error("labels CSV: ragged row (" + std::to_string(count) +
                                     " vs " + std::to_string(width) + " columns)");
    }
    if (map.labels.empty()) throw std::runtime_error("labels CSV: no labels in " + path);
    map.m = declared_m >= 0 ? declared_m : max_label + 1;
    std::vector<long> counts(static_cast<std::size_t>(map.m), 0);
    for (int v : map.labels) ++counts[static_cast<std::size_t>(v)];
    for (int c = 0; c < map.m; ++c)
        if (counts[static_cast<std::size_t>(c)] == 0)
            std::cerr << "warning: empty class " << c << " in " << path << "\n";
    return map;
}

void save_labels_csv(const ClassificationMap& map, int height, int width, const std::string& path)
{
    if (static_cast<long>(map.labels.size()) != static_cast<long>(height) * width)
        throw std::runtime_error("labels CSV: size does not match height*width");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            if (c) f << ",";
            f << map.labels[static_cast<std::size_t>(r) * width + c];
        }
        f << "\n";
    }
}

} // namespace polyunmix
