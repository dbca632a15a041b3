// Command-line front end for the segmentation-driven unmixing pipeline.
//
// Verbs:
//   synth         generate a synthetic linear-mixture bundle
//   segment       preprocess + clustering, emit a label CSV
//   unmix         full pipeline, save a result bundle
//   evaluate      score a result bundle against a ground-truth bundle
//   theorem-check Monte-Carlo certificate of the cone-partition geometry
//   noise-sweep   label-noise robustness table (CSV)
//
// Exit codes: 0 ok, 1 runtime failure, 2 usage/validation error.

#include "polyunmix/cluster.hpp"
#include "polyunmix/io.hpp"
#include "polyunmix/metrics.hpp"
#include "polyunmix/pipeline.hpp"
#include "polyunmix/png_writer.hpp"
#include "polyunmix/synth.hpp"

#include "polyunmix/rng.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace polyunmix;
using nlohmann::json;

namespace {

struct ConfigFlags {
    std::string config_path;
    RunConfig config;
    bool no_sphere = false;
    bool no_pca = false;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--config", config_path, "JSON config file (flags win over file values)");
        cmd->add_flag("--no-sphere-normalize", no_sphere, "disable unit-sphere normalization");
        cmd->add_flag("--no-pca", no_pca, "disable dimensionality reduction");
        cmd->add_option("--pca-dim", config.pca_dim, "reduced dimension d' (default: m)");
        cmd->add_option("--cluster", config.cluster_method, "kmeans | gmm | external");
        cmd->add_option("--cluster-fraction", config.cluster_fraction, "GMM fit subsample fraction");
        cmd->add_option("--cluster-seed", config.cluster_seed, "clustering seed");
        cmd->add_option("--svm-c", config.svm_c, "SVM regularization C");
        cmd->add_option("--svm-fraction", config.svm_fraction, "SVM pixel subsample fraction");
        cmd->add_option("--svm-seed", config.svm_seed, "SVM subsample seed");
        cmd->add_option("--saturation", config.saturation, "explicit saturation s (default auto)");
        cmd->add_option("--lambda", config.lambda, "explicit Tikhonov lambda (default auto)");
        cmd->add_flag("--tikhonov-fallback", config.tikhonov_fallback,
                      "regularized solve for an ill-conditioned reference basis");
        cmd->add_flag("--project-final", config.project_final_abundances,
                      "simplex-project the final abundances");
    }

    RunConfig resolve(const CLI::App* cmd)
    {
        RunConfig base;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw CLI::ValidationError("--config", "cannot open " + config_path);
            json j;
            f >> j;
            base = RunConfig::from_json(j);
        }
        // flags win over file values
        auto seen = [&](const std::string& name) { return cmd->count(name) > 0; };
        if (seen("--pca-dim")) base.pca_dim = config.pca_dim;
        if (seen("--cluster")) base.cluster_method = config.cluster_method;
        if (seen("--cluster-fraction")) base.cluster_fraction = config.cluster_fraction;
        if (seen("--cluster-seed")) base.cluster_seed = config.cluster_seed;
        if (seen("--svm-c")) base.svm_c = config.svm_c;
        if (seen("--svm-fraction")) base.svm_fraction = config.svm_fraction;
        if (seen("--svm-seed")) base.svm_seed = config.svm_seed;
        if (seen("--saturation")) base.saturation = config.saturation;
        if (seen("--lambda")) base.lambda = config.lambda;
        if (no_sphere) base.sphere_normalize = false;
        if (no_pca) base.pca_enabled = false;
        if (config.tikhonov_fallback) base.tikhonov_fallback = true;
        if (config.project_final_abundances) base.project_final_abundances = true;
        return base;
    }
};

void require_dir(const std::string& path)
{
    if (!std::filesystem::is_directory(path))
        throw std::invalid_argument("input directory not found: " + path);
}

int resolve_m(const LoadedBundle& bundle, int m_flag)
{
    if (m_flag > 0) return m_flag;
    if (bundle.ground_truth) return bundle.ground_truth->n_materials();
    throw CLI::ValidationError("--m", "number of materials required (no ground truth in bundle)");
}

void emit_png_maps(const ResultBundle& bundle, int height, int width, const std::string& dir)
{
    const long m = bundle.abundances.rows();
    for (long c = 0; c < m; ++c) {
        std::vector<std::uint8_t> img(static_cast<std::size_t>(height) * width);
        const double lo = bundle.abundances.row(c).minCoeff();
        const double hi = bundle.abundances.row(c).maxCoeff();
        const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
        for (std::size_t j = 0; j < img.size(); ++j)
            img[j] = static_cast<std::uint8_t>(
                std::lround((bundle.abundances(c, static_cast<long>(j)) - lo) * scale));
        write_grayscale_png(dir + "/abundance_" + std::to_string(c) + ".png", width, height, img);
    }
}

struct RepeatStats {
    double sad_mean = 0.0, sad_std = 0.0, rmse_mean = 0.0, rmse_std = 0.0;
};

RepeatStats aggregate(const std::vector<double>& sads, const std::vector<double>& rmses)
{
    RepeatStats s;
    const double n = static_cast<double>(sads.size());
    for (double v : sads) s.sad_mean += v;
    for (double v : rmses) s.rmse_mean += v;
    s.sad_mean /= n;
    s.rmse_mean /= n;
    for (double v : sads) s.sad_std += (v - s.sad_mean) * (v - s.sad_mean);
    for (double v : rmses) s.rmse_std += (v - s.rmse_mean) * (v - s.rmse_mean);
    s.sad_std = std::sqrt(s.sad_std / n);
    s.rmse_std = std::sqrt(s.rmse_std / n);
    return s;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Segmentation-driven blind hyperspectral unmixing"};
    app.require_subcommand(1);

    // ---- synth ----
    auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic linear-mixture bundle");
    SynthConfig synth_cfg;
    std::string synth_out;
    bool synth_overwrite = false;
    cmd_synth->add_option("--out", synth_out, "output bundle directory")->required();
    cmd_synth->add_option("--d", synth_cfg.d, "bands");
    cmd_synth->add_option("--m", synth_cfg.m, "materials");
    cmd_synth->add_option("--height", synth_cfg.height, "image height");
    cmd_synth->add_option("--width", synth_cfg.width, "image width");
    cmd_synth->add_option("--sigma", synth_cfg.noise_sigma, "noise standard deviation");
    cmd_synth->add_option("--alpha", synth_cfg.dirichlet_alpha, "Dirichlet concentration");
    cmd_synth->add_option("--seed", synth_cfg.seed, "generator seed");
    cmd_synth->add_flag("--overwrite", synth_overwrite, "allow writing into a non-empty directory");

    // ---- segment ----
    auto* cmd_segment = app.add_subcommand("segment", "cluster pixels, write a label CSV");
    std::string seg_in, seg_out;
    int seg_m = 0;
    ConfigFlags seg_flags;
    cmd_segment->add_option("--input", seg_in, "input bundle directory")->required();
    cmd_segment->add_option("--out", seg_out, "output labels CSV")->required();
    cmd_segment->add_option("--m", seg_m, "number of classes");
    seg_flags.attach(cmd_segment);

    // ---- unmix ----
    auto* cmd_unmix = app.add_subcommand("unmix", "run the full pipeline, save a result bundle");
    std::string unmix_in, unmix_out, unmix_labels;
    int unmix_m = 0, repeats = 1;
    bool labels_from_gt = false, unmix_overwrite = false, png_maps = false;
    ConfigFlags unmix_flags;
    cmd_unmix->add_option("--input", unmix_in, "input bundle directory")->required();
    cmd_unmix->add_option("--out", unmix_out, "output result directory")->required();
    cmd_unmix->add_option("--m", unmix_m, "number of materials");
    cmd_unmix->add_option("--labels", unmix_labels, "external segmentation CSV");
    cmd_unmix->add_flag("--labels-from-gt", labels_from_gt,
                        "use the bundle's ground-truth labels as the segmentation");
    cmd_unmix->add_option("--repeats", repeats, "mean/std over N runs varying the SVM seed");
    cmd_unmix->add_flag("--overwrite", unmix_overwrite, "allow writing into a non-empty directory");
    cmd_unmix->add_flag("--png-maps", png_maps, "emit per-material grayscale abundance PNGs");
    unmix_flags.attach(cmd_unmix);

    // ---- evaluate ----
    auto* cmd_eval = app.add_subcommand("evaluate", "score a result against ground truth");
    std::string eval_result, eval_truth, eval_out;
    cmd_eval->add_option("--result", eval_result, "result bundle directory")->required();
    cmd_eval->add_option("--truth", eval_truth, "ground-truth bundle directory")->required();
    cmd_eval->add_option("--out", eval_out, "metrics JSON path (default: result dir)");

    // ---- theorem-check ----
    auto* cmd_theorem = app.add_subcommand("theorem-check",
                                           "verify the cone-partition geometry on random instances");
    int th_instances = 50;
    long th_trials = 10000;
    std::uint64_t th_seed = 0;
    cmd_theorem->add_option("--instances", th_instances, "number of random instances");
    cmd_theorem->add_option("--trials", th_trials, "Monte-Carlo trials per instance");
    cmd_theorem->add_option("--seed", th_seed, "seed");

    // ---- noise-sweep ----
    auto* cmd_sweep = app.add_subcommand("noise-sweep", "label-noise robustness table");
    std::string sweep_in, sweep_out;
    std::vector<double> sweep_fractions{0.01, 0.05, 0.10, 0.25, 0.50, 0.80};
    std::vector<std::uint64_t> sweep_seeds{0, 1, 2};
    int sweep_m = 0;
    ConfigFlags sweep_flags;
    cmd_sweep->add_option("--input", sweep_in, "input bundle with ground-truth labels")->required();
    cmd_sweep->add_option("--out", sweep_out, "output CSV path")->required();
    cmd_sweep->add_option("--fractions", sweep_fractions, "noise fractions p");
    cmd_sweep->add_option("--seeds", sweep_seeds, "noise/SVM seeds");
    cmd_sweep->add_option("--m", sweep_m, "number of materials");
    sweep_flags.attach(cmd_sweep);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_synth) {
            const SynthInstance inst = generate(synth_cfg);
            save_input_bundle(inst.dataset, inst.ground_truth, synth_out, synth_overwrite);
            std::cout << "wrote " << synth_out << " (" << inst.dataset.n_pixels() << " pixels, "
                      << inst.dataset.n_bands() << " bands, " << synth_cfg.m << " materials)\n";
            return 0;
        }

        if (*cmd_segment) {
            require_dir(seg_in);
            const LoadedBundle bundle = load_bundle(seg_in);
            const int m = seg_m > 0 ? seg_m : resolve_m(bundle, seg_m);
            RunConfig config = seg_flags.resolve(cmd_segment);
            const ClassificationMap map = run_segmentation(bundle.dataset, m, config);
            save_labels_csv(map, bundle.dataset.height, bundle.dataset.width, seg_out);
            std::cout << "wrote " << seg_out << "\n";
            return 0;
        }

        if (*cmd_unmix) {
            require_dir(unmix_in);
            const LoadedBundle bundle = load_bundle(unmix_in);
            const int m = resolve_m(bundle, unmix_m);
            RunConfig config = unmix_flags.resolve(cmd_unmix);

            std::optional<ClassificationMap> ext;
            if (!unmix_labels.empty()) {
                ext = load_labels_csv(unmix_labels, m);
                config.cluster_method = "external";
            } else if (labels_from_gt) {
                if (!bundle.ground_truth || !bundle.ground_truth->labels)
                    throw std::runtime_error("--labels-from-gt: bundle has no ground-truth labels");
                ext = ClassificationMap{*bundle.ground_truth->labels, m};
                config.cluster_method = "external";
            }

            std::vector<double> sads, rmses;
            PipelineResult last;
            for (int r = 0; r < repeats; ++r) {
                RunConfig run_cfg = config;
                run_cfg.svm_seed = config.svm_seed + static_cast<std::uint64_t>(r);
                last = run_pipeline(bundle.dataset, m, run_cfg, ext);
                if (bundle.ground_truth && repeats > 1) {
                    const EvaluationReport rep = match_and_score(
                        last.bundle.endmembers, last.bundle.abundances, *bundle.ground_truth);
                    sads.push_back(rep.avg_sad);
                    rmses.push_back(rep.avg_rmse);
                }
            }
            if (bundle.ground_truth) {
                const EvaluationReport rep = match_and_score(
                    last.bundle.endmembers, last.bundle.abundances, *bundle.ground_truth);
                last.bundle.metrics = rep.to_json(config_hash(last.bundle.config));
            }
            save_bundle(last.bundle, unmix_out, unmix_overwrite);
            if (png_maps)
                emit_png_maps(last.bundle, bundle.dataset.height, bundle.dataset.width, unmix_out);
            std::printf("segmentation: %.2fs, unmixing: %.2fs\n", last.segmentation_seconds,
                        last.unmixing_seconds);
            if (repeats > 1 && !sads.empty()) {
                const RepeatStats s = aggregate(sads, rmses);
                std::printf("Avg. SAD: %.2f +/- %.1f (x1e-2)  Avg. RMSE: %.2f +/- %.1f (x1e-2)\n",
                            s.sad_mean * 100.0, s.sad_std * 100.0, s.rmse_mean * 100.0,
                            s.rmse_std * 100.0);
            }
            return 0;
        }

        if (*cmd_eval) {
            require_dir(eval_result);
            require_dir(eval_truth);
            const ResultBundle result = load_result_bundle(eval_result);
            const LoadedBundle truth = load_bundle(eval_truth);
            if (!truth.ground_truth)
                throw std::runtime_error("evaluate: no ground truth in " + eval_truth);
            const EvaluationReport rep =
                match_and_score(result.endmembers, result.abundances, *truth.ground_truth);
            const json out = rep.to_json(config_hash(result.config));
            const std::string path =
                eval_out.empty() ? eval_result + "/metrics.json" : eval_out;
            std::ofstream f(path);
            f << out.dump(2) << "\n";
            std::printf("Avg. SAD: %.2f (x1e-2)  Avg. RMSE: %.2f (x1e-2)\n", rep.avg_sad * 100.0,
                        rep.avg_rmse * 100.0);
            std::cout << "wrote " << path << "\n";
            return 0;
        }

        if (*cmd_theorem) {
            Pcg32 rng(th_seed);
            long total_convexity = 0, total_homogeneity = 0;
            for (int inst = 0; inst < th_instances; ++inst) {
                const int m = 2 + static_cast<int>(rng.bounded(5));  // m in {2..6}
                const int d = m + static_cast<int>(rng.bounded(static_cast<std::uint32_t>(13 - m)));
                Eigen::MatrixXd endmembers(d, m);
                for (int i = 0; i < d; ++i)
                    for (int c = 0; c < m; ++c) endmembers(i, c) = rng.uniform(0.1, 1.0);
                const Eigen::JacobiSVD<Eigen::MatrixXd> svd(endmembers);
                if (svd.singularValues()(m - 1) <= 0.05 * svd.singularValues()(0)) {
                    --inst;
                    continue;
                }
                const TheoremReport rep = verify_theorem(endmembers, th_trials, rng.next_u64());
                total_convexity += rep.convexity_violations;
                total_homogeneity += rep.homogeneity_violations;
                if (!rep.passed())
                    std::cout << "instance " << inst << " (m=" << m << ", d=" << d
                              << "): FAILED with " << rep.convexity_violations << " convexity / "
                              << rep.homogeneity_violations << " homogeneity counterexamples\n";
            }
            std::cout << th_instances << " instances x " << th_trials << " trials: "
                      << total_convexity << " convexity, " << total_homogeneity
                      << " homogeneity counterexamples\n";
            return (total_convexity == 0 && total_homogeneity == 0) ? 0 : 1;
        }

        if (*cmd_sweep) {
            require_dir(sweep_in);
            const LoadedBundle bundle = load_bundle(sweep_in);
            if (!bundle.ground_truth || !bundle.ground_truth->labels)
                throw std::runtime_error("noise-sweep: bundle has no ground-truth labels");
            const int m = resolve_m(bundle, sweep_m);
            RunConfig config = sweep_flags.resolve(cmd_sweep);
            const ClassificationMap clean{*bundle.ground_truth->labels, m};

            std::ofstream out(sweep_out);
            if (!out) throw std::runtime_error("cannot open " + sweep_out);
            out << "p,avg_sad_mean,avg_sad_std,avg_rmse_mean,avg_rmse_std\n";
            for (double p : sweep_fractions) {
                std::vector<double> sads, rmses;
                for (std::uint64_t seed : sweep_seeds) {
                    const ClassificationMap noisy = inject_label_noise(clean, p, seed);
                    RunConfig run_cfg = config;
                    run_cfg.cluster_method = "external";
                    run_cfg.svm_seed = seed;
                    const PipelineResult res = run_pipeline(bundle.dataset, m, run_cfg, noisy);
                    const EvaluationReport rep = match_and_score(
                        res.bundle.endmembers, res.bundle.abundances, *bundle.ground_truth);
                    sads.push_back(rep.avg_sad);
                    rmses.push_back(rep.avg_rmse);
                }
                const RepeatStats s = aggregate(sads, rmses);
                out << p << "," << s.sad_mean << "," << s.sad_std << "," << s.rmse_mean << ","
                    << s.rmse_std << "\n";
                std::printf("p=%.2f  Avg. SAD %.2f +/- %.1f  Avg. RMSE %.2f +/- %.1f (x1e-2)\n", p,
                            s.sad_mean * 100.0, s.sad_std * 100.0, s.rmse_mean * 100.0,
                            s.rmse_std * 100.0);
            }
            std::cout << "wrote " << sweep_out << "\n";
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
