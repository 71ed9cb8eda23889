// Command-line front end: synthetic data generation, single-gamma fits,
// regularization paths with automatic selection, the CPD+k-means baseline,
// clustering evaluation, and heatmap export.
//
// Exit codes: 0 success, 2 configuration/validation error, 3 numerical
// failure (solver divergence).

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coco/baseline.hpp"
#include "coco/clusterpath.hpp"
#include "coco/decomp.hpp"
#include "coco/metrics.hpp"
#include "coco/simgen.hpp"
#include "coco/solver.hpp"
#include "coco/tensor_io.hpp"
#include "coco/weights.hpp"

namespace {

using json = nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kSchemaVersion = 1;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::size_t> parse_size_list(const std::string& s, const std::string& what) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            const long long v = std::stoll(tok);
            if (v < 1) throw std::invalid_argument("");
            out.push_back(static_cast<std::size_t>(v));
        } catch (...) {
            throw ConfigError(what + ": expected comma-separated positive integers, got '" + s + "'");
        }
    }
    if (out.empty()) throw ConfigError(what + ": empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            throw ConfigError(what + ": expected comma-separated numbers, got '" + s + "'");
        }
    }
    if (out.empty()) throw ConfigError(what + ": empty list");
    return out;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw ConfigError("write failed for " + path);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("bad JSON in " + path + ": " + e.what());
    }
    return j;
}

std::vector<std::vector<int>> labels_from_json(const json& j, const std::string& path) {
    if (!j.contains("labels") || !j["labels"].is_array())
        throw ConfigError(path + ": missing 'labels' array (schema mismatch)");
    std::vector<std::vector<int>> labels;
    for (const auto& arr : j["labels"]) labels.push_back(arr.get<std::vector<int>>());
    return labels;
}

// Block means of a tensor under per-mode labels, flattened over the
// k_1 x ... x k_D grid in storage order.
std::vector<double> cocluster_means(const coco::Tensor& x,
                                    const std::vector<std::vector<int>>& labels,
                                    std::vector<std::size_t>& counts_out) {
    const std::size_t order = x.order();
    counts_out.resize(order);
    for (std::size_t d = 0; d < order; ++d) {
        int maxl = 0;
        for (int l : labels[d]) maxl = std::max(maxl, l);
        counts_out[d] = static_cast<std::size_t>(maxl) + 1;
    }
    std::size_t blocks = 1;
    for (std::size_t k : counts_out) blocks *= k;

    std::vector<double> sum(blocks, 0.0);
    std::vector<std::size_t> cnt(blocks, 0);
    std::vector<std::size_t> idx(order, 0);
    for (std::size_t flat = 0; flat < x.size(); ++flat) {
        std::size_t block = 0, bs = 1;
        for (std::size_t d = 0; d < order; ++d) {
            block += static_cast<std::size_t>(labels[d][idx[d]]) * bs;
            bs *= counts_out[d];
        }
        sum[block] += x[flat];
        cnt[block] += 1;
        for (std::size_t d = 0; d < order; ++d) {
            if (++idx[d] < x.dim(d)) break;
            idx[d] = 0;
        }
    }
    for (std::size_t b = 0; b < blocks; ++b)
        if (cnt[b] > 0) sum[b] /= static_cast<double>(cnt[b]);
    return sum;
}

std::vector<int> product_labels(const std::vector<std::vector<int>>& labels,
                                const std::vector<std::size_t>& dims) {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    std::vector<std::size_t> counts(dims.size());
    for (std::size_t d = 0; d < dims.size(); ++d) {
        int maxl = 0;
        for (int l : labels[d]) maxl = std::max(maxl, l);
        counts[d] = static_cast<std::size_t>(maxl) + 1;
    }
    std::vector<int> out(n);
    std::vector<std::size_t> idx(dims.size(), 0);
    for (std::size_t flat = 0; flat < n; ++flat) {
        std::size_t block = 0, bs = 1;
        for (std::size_t d = 0; d < dims.size(); ++d) {
            block += static_cast<std::size_t>(labels[d][idx[d]]) * bs;
            bs *= counts[d];
        }
        out[flat] = static_cast<int>(block);
        for (std::size_t d = 0; d < dims.size(); ++d) {
            if (++idx[d] < dims[d]) break;
            idx[d] = 0;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Shared fitting options (weights construction + solver knobs).

struct FitOptions {
    std::string input;
    std::size_t k_neighbors = 0;  // 0: smallest connecting k
    std::string bandwidth = "median";
    std::string tucker_ranks = "auto";  // auto | none | comma list
    double gap_tol = 0.0;               // 0: command default
    std::size_t max_iter = 200000;
    bool no_accelerate = false;
    double fuse_tol = 1e-4;
    std::size_t threads = 0;  // informational; commands are single-dataset
    std::string out;
    std::string save_estimate;
};

void add_fit_options(CLI::App* cmd, FitOptions& opt) {
    cmd->add_option("input", opt.input, "input tensor file (text or binary)")->required();
    cmd->add_option("--k-neighbors", opt.k_neighbors,
                    "starting k for the k-NN graphs (0 = smallest connecting k)");
    cmd->add_option("--bandwidth", opt.bandwidth, "kernel bandwidth rule: median | uniform")
        ->check(CLI::IsMember({"median", "uniform"}));
    cmd->add_option("--tucker-ranks", opt.tucker_ranks,
                    "denoising ranks: auto | none | comma list (one per mode)");
    cmd->add_option("--gap-tol", opt.gap_tol, "relative duality-gap tolerance");
    cmd->add_option("--max-iter", opt.max_iter, "solver iteration cap");
    cmd->add_flag("--no-accelerate", opt.no_accelerate, "plain projected gradient");
    cmd->add_option("--fuse-tol", opt.fuse_tol, "relative fusion threshold for cluster extraction");
    cmd->add_option("--threads", opt.threads,
                    "worker threads (falls back to COCO_THREADS; single runs are sequential)");
    cmd->add_option("--out", opt.out, "output JSON path")->required();
    cmd->add_option("--save-estimate", opt.save_estimate, "also write the fitted tensor here");
}

std::size_t resolve_threads(std::size_t flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("COCO_THREADS")) {
        const long v = std::atol(env);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    return 1;
}

json echo_fit_options(const FitOptions& opt) {
    return json{{"input", opt.input},
                {"k_neighbors", opt.k_neighbors},
                {"bandwidth", opt.bandwidth},
                {"tucker_ranks", opt.tucker_ranks},
                {"gap_tol", opt.gap_tol},
                {"max_iter", opt.max_iter},
                {"accelerate", !opt.no_accelerate},
                {"fuse_tol", opt.fuse_tol},
                {"threads", resolve_threads(opt.threads)}};
}

coco::Tensor denoise(const coco::Tensor& x, const std::string& ranks_spec) {
    if (ranks_spec == "none") return x;
    std::vector<std::size_t> ranks;
    if (ranks_spec == "auto") {
        ranks = coco::heuristic_ranks(x.dims());
    } else {
        ranks = parse_size_list(ranks_spec, "--tucker-ranks");
        if (ranks.size() != x.order())
            throw ConfigError("--tucker-ranks: need one rank per mode");
    }
    return coco::tucker_hooi(x, ranks).reconstruct();
}

std::vector<coco::ModeGraph> graphs_for(const coco::Tensor& x, const FitOptions& opt) {
    coco::WeightConfig wc;
    wc.k_neighbors = opt.k_neighbors == 0 ? 1 : opt.k_neighbors;
    wc.bandwidth = opt.bandwidth == "uniform" ? coco::BandwidthMode::Uniform
                                              : coco::BandwidthMode::MedianHeuristic;
    return coco::build_mode_graphs(denoise(x, opt.tucker_ranks), wc);
}

json model_json(const std::string& method, const coco::Tensor& fitted_values,
                const std::vector<coco::Partition>& partitions, const json& config_echo) {
    std::vector<std::vector<int>> labels;
    std::vector<std::size_t> counts;
    for (const auto& p : partitions) labels.push_back(p.labels);
    const auto means = cocluster_means(fitted_values, labels, counts);
    return json{{"schema_version", kSchemaVersion},
                {"method", method},
                {"dims", fitted_values.dims()},
                {"labels", labels},
                {"cluster_counts", counts},
                {"cocluster_means", means},
                {"config", config_echo}};
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
    std::string model = "checkerbox";
    std::string dims;
    std::string clusters = "";
    double sigma = 1.0;
    double sigma_ratio = 0.0;
    double imbalance = 0.0;
    double mu_sep = 6.0;
    std::string block_means;
    bool shuffle = false;
    std::uint64_t seed = 0;
    std::string out;
    std::string truth;
    std::string format = "binary";
};

int run_simulate(const SimulateOptions& opt) {
    const auto dims = parse_size_list(opt.dims, "--dims");

    coco::Tensor x;
    coco::GroundTruth truth;
    json echo{{"model", opt.model}, {"dims", dims},           {"sigma", opt.sigma},
              {"seed", opt.seed},   {"shuffle", opt.shuffle}, {"format", opt.format}};

    if (opt.model == "checkerbox") {
        coco::CheckerboxSpec spec;
        spec.dims = dims;
        spec.clusters = opt.clusters.empty() ? std::vector<std::size_t>(dims.size(), 2)
                                             : parse_size_list(opt.clusters, "--k");
        if (spec.clusters.size() != dims.size())
            throw ConfigError("--k: need one cluster count per mode");
        if (opt.imbalance > 0.0) {
            if (opt.imbalance >= 1.0) throw ConfigError("--imbalance: need a fraction in (0, 1)");
            for (std::size_t k : spec.clusters)
                if (k != 2) throw ConfigError("--imbalance: requires 2 clusters per mode");
            spec.fractions.assign(dims.size(), {1.0 - opt.imbalance, opt.imbalance});
        }
        if (!opt.block_means.empty())
            spec.block_means = parse_double_list(opt.block_means, "--block-means");
        spec.mean_separation = opt.mu_sep;
        spec.sigma = opt.sigma;
        spec.shuffle = opt.shuffle;
        spec.seed = opt.seed;
        echo["k"] = spec.clusters;
        echo["imbalance"] = opt.imbalance;
        echo["mu_sep"] = opt.mu_sep;
        echo["sigma_ratio"] = opt.sigma_ratio;
        try {
            if (opt.sigma_ratio > 0.0)
                std::tie(x, truth) = coco::gen_heteroskedastic(spec, opt.sigma_ratio);
            else
                std::tie(x, truth) = coco::gen_checkerbox(spec);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else if (opt.model == "halfmoons" || opt.model == "bullseye") {
        for (std::size_t d : dims)
            if (d != dims.front())
                throw ConfigError("--dims: " + opt.model + " generates cubic 3-way tensors");
        if (dims.size() != 3) throw ConfigError("--dims: " + opt.model + " needs three modes");
        const auto shape =
            opt.model == "halfmoons" ? coco::TwoShape::HalfMoons : coco::TwoShape::Bullseye;
        try {
            std::tie(x, truth) = coco::gen_cp_two_shape(shape, dims.front(), opt.sigma, opt.seed);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else {
        throw ConfigError("--model: unknown model '" + opt.model + "'");
    }

    if (opt.format == "binary")
        coco::write_tensor_binary(opt.out, x);
    else if (opt.format == "text")
        coco::write_tensor_text(opt.out, x);
    else
        throw ConfigError("--format: expected binary or text");

    if (!opt.truth.empty()) {
        json t{{"schema_version", kSchemaVersion},
               {"kind", "truth"},
               {"dims", dims},
               {"labels", truth.labels},
               {"cluster_counts", truth.block_means.dims()},
               {"block_means", truth.block_means.data()},
               {"config", echo}};
        write_json_file(opt.truth, t);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// fit / path

int run_fit(const FitOptions& opt, double gamma) {
    const coco::Tensor x = coco::read_tensor(opt.input);
    const auto graphs = graphs_for(x, opt);

    coco::SolverConfig sc;
    sc.gap_tol = opt.gap_tol > 0.0 ? opt.gap_tol : 1e-8;
    sc.max_iter = opt.max_iter;
    sc.accelerate = !opt.no_accelerate;
    const coco::SolveResult r = coco::solve(x, graphs, gamma, sc);

    const double scale = coco::frobenius_norm(x) / std::sqrt(static_cast<double>(x.size()));
    const auto partitions = coco::extract_clusters(r.u_hat, graphs, opt.fuse_tol, scale);

    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - r.u_hat[i];
        rss += d * d;
    }
    std::size_t df = 1;
    for (const auto& p : partitions) df *= p.n_clusters;

    json j = model_json("coco", r.u_hat, partitions, echo_fit_options(opt));
    j["gamma"] = gamma;
    j["gap"] = r.gap;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["rss"] = rss;
    j["ebic"] = coco::ebic(rss, x.size(), static_cast<double>(df));
    write_json_file(opt.out, j);
    if (!opt.save_estimate.empty()) coco::write_tensor_binary(opt.save_estimate, r.u_hat);
    return 0;
}

struct PathOptions {
    FitOptions fit;
    double gamma_min = 0.0;
    double gamma_max = 0.0;  // 0: doubling search for the coalescence budget
    std::size_t grid_points = 50;
    std::string out_csv;
};

int run_path(const PathOptions& opt) {
    const coco::Tensor x = coco::read_tensor(opt.fit.input);
    const auto graphs = graphs_for(x, opt.fit);

    coco::PathConfig pc;
    pc.solver.gap_tol = opt.fit.gap_tol > 0.0 ? opt.fit.gap_tol : 1e-12;
    pc.solver.max_iter = opt.fit.max_iter;
    pc.solver.accelerate = !opt.fit.no_accelerate;
    pc.fuse_tol = opt.fit.fuse_tol;

    std::vector<double> grid;
    if (opt.gamma_max > 0.0 && opt.gamma_min > 0.0) {
        grid = coco::gamma_grid(opt.gamma_min, opt.gamma_max, opt.grid_points);
    } else if (opt.gamma_max > 0.0) {
        // Explicit budget, default lower end: 0 plus four decades of
        // log-spaced points, the same shape as the automatic grid.
        if (opt.grid_points < 2) throw ConfigError("--grid-points: need at least 2");
        grid.push_back(0.0);
        const std::size_t k = opt.grid_points - 1;
        for (std::size_t i = 0; i < k; ++i)
            grid.push_back(opt.gamma_max *
                           std::pow(10.0, -4.0 + 4.0 * static_cast<double>(i) /
                                               static_cast<double>(std::max<std::size_t>(k - 1, 1))));
        grid.back() = opt.gamma_max;
    } else {
        grid = coco::default_gamma_grid(x, graphs, opt.grid_points, pc);
    }

    const coco::SolutionPath path = coco::solve_path(x, graphs, grid, pc);
    const coco::SolutionPoint& sel = path.points[path.selected];

    if (!opt.out_csv.empty()) {
        std::ofstream csv(opt.out_csv);
        if (!csv) throw ConfigError("cannot open " + opt.out_csv + " for writing");
        coco::write_path_csv(csv, path, x.order());
    }

    json echo = echo_fit_options(opt.fit);
    echo["gamma_min"] = opt.gamma_min;
    echo["gamma_max"] = opt.gamma_max;
    echo["grid_points"] = opt.grid_points;

    json j = model_json("coco", sel.u_hat, sel.partitions, echo);
    j["gamma"] = sel.gamma;
    j["gap"] = sel.gap;
    j["iterations"] = sel.iterations;
    j["rss"] = sel.rss;
    j["ebic"] = sel.ebic;
    j["path_points"] = path.points.size();
    write_json_file(opt.fit.out, j);
    if (!opt.fit.save_estimate.empty()) coco::write_tensor_binary(opt.fit.save_estimate, sel.u_hat);
    return 0;
}

// ---------------------------------------------------------------------------
// baseline

struct BaselineOptions {
    std::string input;
    std::string rank_candidates = "2,3,4,5";
    std::size_t k_min = 1;
    std::size_t k_max = 10;
    std::size_t b_refs = 20;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::string out;
};

int run_baseline(const BaselineOptions& opt) {
    const coco::Tensor x = coco::read_tensor(opt.input);
    const auto ranks = parse_size_list(opt.rank_candidates, "--rank-candidates");
    if (opt.k_min < 1 || opt.k_min > opt.k_max) throw ConfigError("--k-min/--k-max: bad range");
    std::vector<std::size_t> ks;
    for (std::size_t k = opt.k_min; k <= opt.k_max; ++k) ks.push_back(k);

    const coco::CpdKmeansResult r = coco::cpd_kmeans(x, ranks, ks, opt.seed);

    json echo{{"input", opt.input},     {"rank_candidates", ranks}, {"k_min", opt.k_min},
              {"k_max", opt.k_max},     {"b_refs", opt.b_refs},     {"seed", opt.seed},
              {"threads", resolve_threads(opt.threads)}};
    json j = model_json("cpd_kmeans", x, r.partitions, echo);
    j["rank"] = r.rank;
    j["rank_fits"] = r.rank_fits;
    j["k_selected"] = r.k_selected;
    write_json_file(opt.out, j);
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate

int run_evaluate(const std::string& truth_path, const std::string& result_path,
                 const std::string& out_path) {
    const json jt = read_json_file(truth_path);
    const json jr = read_json_file(result_path);
    const auto truth = labels_from_json(jt, truth_path);
    const auto result = labels_from_json(jr, result_path);
    if (truth.size() != result.size())
        throw ConfigError("evaluate: files disagree on the number of modes");
    std::vector<std::size_t> dims;
    for (const auto& l : truth) dims.push_back(l.size());
    for (std::size_t d = 0; d < truth.size(); ++d)
        if (truth[d].size() != result[d].size())
            throw ConfigError("evaluate: label length mismatch at mode " + std::to_string(d + 1));

    std::ostringstream csv;
    csv << "mode,ari,vi\n";
    for (std::size_t d = 0; d < truth.size(); ++d)
        csv << d + 1 << ',' << coco::adjusted_rand_index(truth[d], result[d]) << ','
            << coco::variation_of_information(truth[d], result[d]) << '\n';
    const auto prod_truth = product_labels(truth, dims);
    const auto prod_result = product_labels(result, dims);
    csv << "cocluster," << coco::adjusted_rand_index(prod_truth, prod_result) << ','
        << coco::variation_of_information(prod_truth, prod_result) << '\n';

    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw ConfigError("cannot open " + out_path + " for writing");
        out << csv.str();
    }
    return 0;
}

// ---------------------------------------------------------------------------
// export-heatmap

struct HeatmapOptions {
    std::string result;
    std::string tensor;
    std::size_t rows_mode = 1;  // 1-based
    std::size_t cols_mode = 2;
    std::string fix;  // "mode=index,mode=index" (1-based)
    std::string out;
};

int run_heatmap(const HeatmapOptions& opt) {
    const json jr = read_json_file(opt.result);
    const auto labels = labels_from_json(jr, opt.result);
    const coco::Tensor x = coco::read_tensor(opt.tensor);
    if (labels.size() != x.order()) throw ConfigError("export-heatmap: mode count mismatch");
    for (std::size_t d = 0; d < x.order(); ++d)
        if (labels[d].size() != x.dim(d))
            throw ConfigError("export-heatmap: label length mismatch at mode " +
                              std::to_string(d + 1));

    if (opt.rows_mode < 1 || opt.rows_mode > x.order() || opt.cols_mode < 1 ||
        opt.cols_mode > x.order() || opt.rows_mode == opt.cols_mode)
        throw ConfigError("export-heatmap: bad --rows-mode/--cols-mode");
    const std::size_t rm = opt.rows_mode - 1, cm = opt.cols_mode - 1;

    std::vector<std::size_t> fixed(x.order(), 0);
    if (!opt.fix.empty()) {
        std::stringstream ss(opt.fix);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) throw ConfigError("--fix: expected mode=index pairs");
            const auto mode = static_cast<std::size_t>(std::atoll(tok.substr(0, eq).c_str()));
            const auto index = static_cast<std::size_t>(std::atoll(tok.substr(eq + 1).c_str()));
            if (mode < 1 || mode > x.order() || index < 1 || index > x.dim(mode - 1))
                throw ConfigError("--fix: mode or index out of range in '" + tok + "'");
            fixed[mode - 1] = index - 1;
        }
    }

    auto ordering = [&](std::size_t d) {
        std::vector<std::size_t> order(x.dim(d));
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return labels[d][a] < labels[d][b];
        });
        return order;
    };
    const auto row_order = ordering(rm);
    const auto col_order = ordering(cm);

    std::ofstream out(opt.out);
    if (!out) throw ConfigError("cannot open " + opt.out + " for writing");
    out << "row";
    for (std::size_t c : col_order) out << ',' << c + 1;
    out << '\n';
    std::vector<std::size_t> idx = fixed;
    for (std::size_t r : row_order) {
        out << r + 1;
        idx[rm] = r;
        for (std::size_t c : col_order) {
            idx[cm] = c;
            out << ',' << x[x.offset(idx)];
        }
        out << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convex co-clustering of dense tensors"};
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* cmd_sim = app.add_subcommand("simulate", "generate synthetic tensors with ground truth");
    cmd_sim->add_option("--model", sim.model, "checkerbox | halfmoons | bullseye");
    cmd_sim->add_option("--dims", sim.dims, "mode sizes, e.g. 30,30,30")->required();
    cmd_sim->add_option("--k", sim.clusters, "clusters per mode (checkerbox; default 2 each)");
    cmd_sim->add_option("--sigma", sim.sigma, "noise standard deviation");
    cmd_sim->add_option("--sigma-ratio", sim.sigma_ratio,
                        "heteroskedastic class-2 noise ratio (checkerbox)");
    cmd_sim->add_option("--imbalance", sim.imbalance, "cluster-2 size fraction (checkerbox)");
    cmd_sim->add_option("--mu-sep", sim.mu_sep, "block-mean separation scale");
    cmd_sim->add_option("--block-means", sim.block_means, "explicit block means (flattened)");
    cmd_sim->add_flag("--shuffle", sim.shuffle, "shuffle slice order per mode");
    cmd_sim->add_option("--seed", sim.seed, "RNG seed");
    cmd_sim->add_option("--out", sim.out, "output tensor path")->required();
    cmd_sim->add_option("--truth", sim.truth, "ground-truth JSON path");
    cmd_sim->add_option("--format", sim.format, "binary | text");

    FitOptions fit;
    double gamma = 0.0;
    auto* cmd_fit = app.add_subcommand("fit", "solve at a single gamma");
    add_fit_options(cmd_fit, fit);
    cmd_fit->add_option("--gamma", gamma, "penalty strength")->required();

    PathOptions path;
    auto* cmd_path = app.add_subcommand("path", "warm-started gamma path with eBIC selection");
    add_fit_options(cmd_path, path.fit);
    cmd_path->add_option("--gamma-min", path.gamma_min, "grid lower endpoint");
    cmd_path->add_option("--gamma-max", path.gamma_max, "grid budget (0 = find by doubling)");
    cmd_path->add_option("--grid-points", path.grid_points, "number of grid points");
    cmd_path->add_option("--out-csv", path.out_csv, "per-point path summary CSV");

    BaselineOptions base;
    auto* cmd_base = app.add_subcommand("baseline", "CPD+k-means comparator");
    cmd_base->add_option("input", base.input, "input tensor file")->required();
    cmd_base->add_option("--rank-candidates", base.rank_candidates, "CP rank candidates");
    cmd_base->add_option("--k-min", base.k_min, "smallest k candidate");
    cmd_base->add_option("--k-max", base.k_max, "largest k candidate");
    cmd_base->add_option("--b-refs", base.b_refs, "gap-statistic reference draws");
    cmd_base->add_option("--seed", base.seed, "RNG seed");
    cmd_base->add_option("--threads", base.threads, "worker threads (see fit)");
    cmd_base->add_option("--out", base.out, "output JSON path")->required();

    std::string eval_truth, eval_result, eval_out;
    auto* cmd_eval = app.add_subcommand("evaluate", "ARI/VI between two label files");
    cmd_eval->add_option("truth", eval_truth, "truth JSON")->required();
    cmd_eval->add_option("result", eval_result, "result JSON")->required();
    cmd_eval->add_option("--out", eval_out, "output CSV (default stdout)");

    HeatmapOptions heat;
    auto* cmd_heat =
        app.add_subcommand("export-heatmap", "2-way slice reordered by cluster labels");
    cmd_heat->add_option("result", heat.result, "model JSON with labels")->required();
    cmd_heat->add_option("tensor", heat.tensor, "tensor file to slice")->required();
    cmd_heat->add_option("--rows-mode", heat.rows_mode, "mode shown as rows (1-based)");
    cmd_heat->add_option("--cols-mode", heat.cols_mode, "mode shown as columns (1-based)");
    cmd_heat->add_option("--fix", heat.fix, "fixed indices for other modes, e.g. 3=1 (1-based)");
    cmd_heat->add_option("--out", heat.out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (cmd_sim->parsed()) return run_simulate(sim);
        if (cmd_fit->parsed()) return run_fit(fit, gamma);
        if (cmd_path->parsed()) return run_path(path);
        if (cmd_base->parsed()) return run_baseline(base);
        if (cmd_eval->parsed()) return run_evaluate(eval_truth, eval_result, eval_out);
        if (cmd_heat->parsed()) return run_heatmap(heat);
    } catch (const coco::SolverDivergence& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
