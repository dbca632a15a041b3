#include "doctest.h"

#include "polyunmix/io.hpp"
#include "polyunmix/npy.hpp"
#include "polyunmix/rng.hpp"

#include <filesystem>
#include <fstream>

using namespace polyunmix;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("polyunmix_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

SpectralDataset make_dataset(int h, int w, int d, std::uint64_t seed)
{
    Pcg32 rng(seed);
    SpectralDataset ds;
    ds.height = h;
    ds.width = w;
    ds.data.resize(static_cast<long>(h) * w, d);
    for (long i = 0; i < ds.data.rows(); ++i)
        for (long k = 0; k < d; ++k) ds.data(i, k) = rng.uniform(0.05, 1.0);
    return ds;
}

} // namespace

TEST_CASE("npy round-trip is bit-exact for float64 matrices")
{
    const fs::path dir = temp_dir("npy");
    Pcg32 rng(7);
    Eigen::MatrixXd m(5, 3);
    for (long i = 0; i < m.size(); ++i) m(i) = rng.gaussian();
    npy::save_matrix((dir / "m.npy").string(), m);
    std::vector<std::size_t> shape;
    const Eigen::MatrixXd back = npy::load_matrix((dir / "m.npy").string(), &shape);
    REQUIRE(shape == std::vector<std::size_t>{5, 3});
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0); // bit-exact
}

TEST_CASE("npy int64 vectors round-trip and header is numpy-parsable shape")
{
    const fs::path dir = temp_dir("npy_int");
    const std::vector<std::int64_t> v{0, 1, 2, 1, 0};
    npy::save_int_vector((dir / "v.npy").string(), v);
    CHECK(npy::load_int_vector((dir / "v.npy").string()) == v);
    // header length multiple of 64 including magic+version+len prefix
    std::ifstream f(dir / "v.npy", std::ios::binary);
    std::string head(10, '\0');
    f.read(head.data(), 10);
    const std::size_t hlen = static_cast<unsigned char>(head[8]) |
                             (static_cast<std::size_t>(static_cast<unsigned char>(head[9])) << 8);
    CHECK((10 + hlen) % 64 == 0);
}

TEST_CASE("npy rejects truncated and wrong-dtype files")
{
    const fs::path dir = temp_dir("npy_bad");
    npy::save_int_vector((dir / "v.npy").string(), {1, 2, 3});
    CHECK_THROWS(npy::load_matrix((dir / "v.npy").string())); // dtype mismatch
    std::ofstream f(dir / "trunc.npy", std::ios::binary);
    f << "\x93NUMPY";
    f.close();
    CHECK_THROWS(npy::load_int_vector((dir / "trunc.npy").string()));
}

TEST_CASE("load_bundle validates header shapes")
{
    const fs::path dir = temp_dir("bundle_shapes");
    SpectralDataset ds = make_dataset(2, 2, 3, 1);
    save_input_bundle(ds, std::nullopt, dir.string(), true);
    const LoadedBundle back = load_bundle(dir.string());
    CHECK(back.dataset.n_pixels() == 4);
    CHECK(back.dataset.n_bands() == 3);
    CHECK_FALSE(back.ground_truth.has_value());

    // corrupt the header dimensions
    std::ofstream f(dir / "header.json");
    f << R"({"height": 3, "width": 2, "bands": 3})";
    f.close();
    CHECK_THROWS(load_bundle(dir.string()));
}

TEST_CASE("ground truth simplex constraints are enforced on ingest")
{
    const fs::path dir = temp_dir("bundle_gt");
    SpectralDataset ds = make_dataset(2, 2, 3, 2);
    GroundTruth gt;
    gt.endmembers = Eigen::MatrixXd::Random(3, 2).cwiseAbs();
    gt.abundances.resize(2, 4);
    gt.abundances << 0.25, 0.5, 1.0, 0.0, 0.75, 0.5, 0.0, 1.0;
    save_input_bundle(ds, gt, dir.string(), true);
    const LoadedBundle ok = load_bundle(dir.string());
    REQUIRE(ok.ground_truth.has_value());

    // column summing to 0.8 is rejected
    Eigen::MatrixXd bad = gt.abundances;
    bad(0, 0) = 0.05;
    npy::save_matrix((dir / "gt_abundances.npy").string(), bad);
    CHECK_THROWS_WITH_AS(load_bundle(dir.string()),
                         doctest::Contains("abundance simplex violation"), std::runtime_error);
}

TEST_CASE("gt labels must equal the abundance argmax with lowest-index ties")
{
    GroundTruth gt;
    gt.endmembers = Eigen::MatrixXd::Ones(3, 2);
    gt.abundances.resize(2, 2);
    gt.abundances << 0.5, 0.2, 0.5, 0.8;
    gt.labels = std::vector<int>{0, 1}; // tie in column 0 breaks to 0
    CHECK_NOTHROW(gt.validate());
    gt.labels = std::vector<int>{1, 1};
    CHECK_THROWS(gt.validate());
}

TEST_CASE("save_bundle round-trips matrices bit-exactly and refuses overwrite")
{
    const fs::path dir = temp_dir("result");
    Pcg32 rng(3);
    ResultBundle r;
    r.endmembers = Eigen::MatrixXd::NullaryExpr(4, 2, [&](long) { return rng.gaussian(); });
    r.abundances = Eigen::MatrixXd::NullaryExpr(2, 6, [&](long) { return rng.gaussian(); });
    r.labels = {0, 1, 0, 1, 0, 1};
    r.config = {{"svm_seed", 0}};
    save_bundle(r, dir.string(), true);

    const ResultBundle back = load_result_bundle(dir.string());
    CHECK((back.endmembers - r.endmembers).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.abundances - r.abundances).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.labels == r.labels);

    CHECK_THROWS(save_bundle(r, dir.string(), false)); // overwrite disabled

    ResultBundle empty;
    CHECK_THROWS_WITH_AS(save_bundle(empty, (dir / "x").string(), true),
                         doctest::Contains("degenerate result"), std::runtime_error);
}

TEST_CASE("labels CSV parsing")
{
    const fs::path dir = temp_dir("csv");
    {
        std::ofstream f(dir / "ok.csv");
        f << "0,1\n1,0\n";
    }
    const ClassificationMap map = load_labels_csv((dir / "ok.csv").string());
    CHECK(map.labels == std::vector<int>{0, 1, 1, 0});
    CHECK(map.m == 2);

    {
        std::ofstream f(dir / "neg.csv");
        f << "0,-1\n";
    }
    CHECK_THROWS(load_labels_csv((dir / "neg.csv").string()));

    {
        std::ofstream f(dir / "ragged.csv");
        f << "0,1\n1\n";
    }
    CHECK_THROWS(load_labels_csv((dir / "ragged.csv").string()));

    // class 1 absent with declared m=3: accepted (warning on stderr)
    {
        std::ofstream f(dir / "gap.csv");
        f << "0,2\n2,0\n";
    }
    const ClassificationMap gap = load_labels_csv((dir / "gap.csv").string(), 3);
    CHECK(gap.m == 3);

    {
        std::ofstream f(dir / "range.csv");
        f << "0,3\n";
    }
    CHECK_THROWS(load_labels_csv((dir / "range.csv").string(), 3));
}
