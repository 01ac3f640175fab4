// Acceptance gate: one check per release criterion, one PASS/FAIL line each.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "shapeclust/shapeclust.hpp"
#include "../support/oracles.hpp"

using namespace shapeclust;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------
// gradient suite: analytic vs central finite differences, 50 seeded layers

double public_loss(const SAELayer& layer, const LayerConfig& cfg, const Matrix& data) {
    Matrix recon(data.rows, data.cols);
    for (std::size_t n = 0; n < data.rows; ++n) {
        const auto uh = decode_layer(layer, encode_layer(layer, data.row(n)));
        std::copy(uh.begin(), uh.end(), recon.row(n).begin());
    }
    const double sp =
        cfg.beta != 0.0 ? loss_sparsity(cfg.rho, average_activation(layer, data)) : 0.0;
    return loss_total(cfg, sp, loss_weights(layer), loss_mse(data, recon));
}

double group_error(const std::vector<double>& analytic, const std::vector<double>& fd) {
    double diff = 0, ma = 0, mf = 0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        diff = std::max(diff, std::fabs(analytic[i] - fd[i]));
        ma = std::max(ma, std::fabs(analytic[i]));
        mf = std::max(mf, std::fabs(fd[i]));
    }
    return diff / (ma + mf + 1e-300);
}

void criterion_gradients() {
    const auto t0 = Clock::now();
    const double eps = 1e-6;
    double worst = 0.0;
    std::mt19937_64 rng(20240601);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t kin = 2 + rng() % 7;  // dims <= 8
        const std::size_t kh = 1 + rng() % std::min<std::size_t>(kin - 1 ? kin - 1 : 1, 7);
        const std::size_t N = 1 + rng() % 5;
        const TransferKind enc = rng() % 2 ? TransferKind::Logsig : TransferKind::Purelin;
        const TransferKind dec = rng() % 2 ? TransferKind::Logsig : TransferKind::Purelin;

        SAELayer layer;
        layer.hidden = kh;
        layer.input = kin;
        layer.encoder_transfer = enc;
        layer.decoder_transfer = dec;
        layer.weights.resize(kh * kin);
        layer.encode_bias.resize(kh);
        layer.decode_bias.resize(kin);
        for (auto& w : layer.weights) w = uniform_range(rng, -0.8, 0.8);
        for (auto& b : layer.encode_bias) b = uniform_range(rng, -0.5, 0.5);
        for (auto& b : layer.decode_bias) b = uniform_range(rng, -0.5, 0.5);

        Matrix data(N, kin);
        for (auto& v : data.values) v = uniform_range(rng, 0.05, 0.95);

        LayerConfig cfg;
        cfg.hidden_units = kh;
        // the KL domain needs activations strictly inside (0,1)
        cfg.beta = enc == TransferKind::Logsig ? uniform_range(rng, 0.2, 2.0) : 0.0;
        cfg.lambda = uniform_range(rng, 0.0, 0.5);
        cfg.rho = uniform_range(rng, 0.05, 0.5);

        const LayerGradients grads = layer_gradients(layer, cfg, data);
        auto fd_group = [&](std::vector<double>& param) {
            std::vector<double> fd(param.size());
            for (std::size_t i = 0; i < param.size(); ++i) {
                const double keep = param[i];
                param[i] = keep + eps;
                const double up = public_loss(layer, cfg, data);
                param[i] = keep - eps;
                const double dn = public_loss(layer, cfg, data);
                param[i] = keep;
                fd[i] = (up - dn) / (2 * eps);
            }
            return fd;
        };
        worst = std::max(worst, group_error(grads.weights, fd_group(layer.weights)));
        worst = std::max(worst, group_error(grads.encode_bias, fd_group(layer.encode_bias)));
        worst = std::max(worst, group_error(grads.decode_bias, fd_group(layer.decode_bias)));
    }
    const double elapsed = seconds_since(t0);
    char detail[160];
    std::snprintf(detail, sizeof(detail), "max relative error %.3g over 50 layers, %.2f s",
                  worst, elapsed);
    report("gradient suite (< 1e-5, < 10 s)", worst < 1e-5 && elapsed < 10.0, detail);
}

// ---------------------------------------------------------------------------
// loss identities

void criterion_loss_identities() {
    std::mt19937_64 rng(777);
    double worst = 0.0;
    bool kl_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t kin = 2 + rng() % 6;
        const std::size_t kh = 1 + rng() % (kin - 1 ? kin - 1 : 1);
        const std::size_t N = 2 + rng() % 4;
        SAELayer layer;
        layer.hidden = kh;
        layer.input = kin;
        layer.weights.resize(kh * kin);
        layer.encode_bias.resize(kh);
        layer.decode_bias.resize(kin);
        for (auto& w : layer.weights) w = uniform_range(rng, -1.0, 1.0);
        for (auto& b : layer.encode_bias) b = uniform_range(rng, -1.0, 1.0);
        for (auto& b : layer.decode_bias) b = uniform_range(rng, -1.0, 1.0);
        Matrix data(N, kin);
        for (auto& v : data.values) v = uniform01(rng);
        LayerConfig cfg;
        cfg.beta = uniform_range(rng, 0.0, 4.0);
        cfg.lambda = uniform_range(rng, 0.0, 0.1);
        cfg.rho = uniform_range(rng, 0.05, 0.9);
        const auto ev = evaluate_layer(layer, cfg, data);
        worst = std::max(worst, std::fabs(ev.total - (cfg.beta * ev.sparsity +
                                                      cfg.lambda * ev.weight_penalty + ev.mse)));

        // KL nonnegativity with equality iff rho_hat == rho
        const double rho = uniform_range(rng, 0.05, 0.95);
        std::vector<double> rho_hat(1 + rng() % 6);
        bool all_equal = true;
        for (auto& r : rho_hat) {
            r = uniform_range(rng, 0.01, 0.99);
            if (std::fabs(r - rho) < 1e-6) r = rho;
            all_equal = all_equal && r == rho;
        }
        const double kl = loss_sparsity(rho, rho_hat);
        if (kl < 0.0) kl_ok = false;
        if (!all_equal && !(kl > 0.0)) kl_ok = false;
        if (loss_sparsity(rho, std::vector<double>(rho_hat.size(), rho)) != 0.0) kl_ok = false;
    }
    char detail[128];
    std::snprintf(detail, sizeof(detail), "max decomposition error %.3g", worst);
    report("loss identities (exact to 1e-12, KL >= 0)", worst <= 1e-12 && kl_ok, detail);
}

// ---------------------------------------------------------------------------
// clustering oracle over the full 7x7 grid

void criterion_clustering_oracle() {
    const auto t0 = Clock::now();
    const auto methods = all_methods();
    const auto metrics = all_metrics();
    double worst = 0.0;
    std::size_t mismatches = 0;
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + rng() % 8; // n <= 10
        const std::size_t k = 2 + rng() % 3;
        const auto features = oracle::random_matrix(rng, n, k, 0.05, 1.0);
        for (const auto& metric : metrics) {
            const auto dist = pairwise_distance(features, metric);
            for (const auto method : methods) {
                const auto got = linkage(dist, method, geometry_of(metric), true);
                const auto want = oracle::naive_linkage(features, method, metric);
                if (got.merges.size() != want.merges.size()) {
                    ++mismatches;
                    continue;
                }
                for (std::size_t m = 0; m < got.merges.size(); ++m) {
                    if (got.merges[m].left != want.merges[m].left ||
                        got.merges[m].right != want.merges[m].right ||
                        got.merges[m].size != want.merges[m].size)
                        ++mismatches;
                    worst = std::max(worst,
                                     std::fabs(got.merges[m].height - want.merges[m].height));
                }
            }
        }
    }
    const double elapsed = seconds_since(t0);
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "%zu structural mismatches, max height error %.3g, %.2f s", mismatches, worst,
                  elapsed);
    report("clustering oracle, 49 pairs x 100 instances (1e-9, < 60 s)",
           mismatches == 0 && worst <= 1e-9 && elapsed < 60.0, detail);
}

// ---------------------------------------------------------------------------
// cophenetic correlation vs independent Pearson; exact 1.0 on ultrametrics

DistanceMatrix random_ultrametric(std::mt19937_64& rng, std::size_t n) {
    // grow a random binary tree over the leaves with strictly increasing
    // heights, then read the induced cophenetic matrix
    std::vector<std::vector<std::size_t>> groups(n);
    for (std::size_t i = 0; i < n; ++i) groups[i] = {i};
    DistanceMatrix d;
    d.n = n;
    d.condensed.assign(n * (n - 1) / 2, 0.0);
    double height = 0.0;
    while (groups.size() > 1) {
        height += uniform_range(rng, 0.5, 1.5);
        const std::size_t a = rng() % groups.size();
        std::size_t b = rng() % (groups.size() - 1);
        if (b >= a) ++b;
        for (std::size_t i : groups[a])
            for (std::size_t j : groups[b]) d.ref(i, j) = height;
        groups[std::min(a, b)].insert(groups[std::min(a, b)].end(),
                                      groups[std::max(a, b)].begin(),
                                      groups[std::max(a, b)].end());
        groups.erase(groups.begin() + std::max(a, b));
    }
    return d;
}

void criterion_cophenet() {
    std::mt19937_64 rng(4242);
    double worst = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 4 + rng() % 7;
        const auto features = oracle::random_matrix(rng, n, 3);
        const auto dist = pairwise_distance(features, MetricId::Euclidean);
        const auto method = trial % 2 ? Method::Average : Method::Complete;
        const auto tree = linkage(dist, method);
        const auto got = cophenetic_correlation(tree, dist);
        std::vector<double> coph;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                coph.push_back(oracle::cophenetic_pair(tree, i, j));
        const double want = oracle::pearson(dist.condensed, coph);
        worst = std::max(worst, std::fabs(got.value - want));
        if (got.degenerate) ok = false;
    }
    bool exact_one = true;
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = random_ultrametric(rng, 4 + rng() % 8);
        const auto tree = linkage(d, Method::Single);
        const auto r = cophenetic_correlation(tree, d);
        if (r.value != 1.0 || r.degenerate) exact_one = false;
    }
    char detail[160];
    std::snprintf(detail, sizeof(detail), "max error vs oracle %.3g, ultrametrics exact: %s",
                  worst, exact_one ? "yes" : "no");
    report("cophenet correctness (1e-12, ultrametric == 1.0)",
           ok && worst <= 1e-12 && exact_one, detail);
}

// ---------------------------------------------------------------------------
// single linkage == MST

void criterion_single_mst() {
    std::mt19937_64 rng(5150);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 4 + rng() % 9;
        const auto features = oracle::random_matrix(rng, n, 2);
        const auto dist = pairwise_distance(features, MetricId::Euclidean);
        const auto tree = linkage(dist, Method::Single);
        std::vector<double> heights;
        for (const auto& m : tree.merges) heights.push_back(m.height);
        std::sort(heights.begin(), heights.end());
        const auto mst = oracle::mst_edge_weights(dist);
        for (std::size_t i = 0; i < heights.size(); ++i)
            worst = std::max(worst, std::fabs(heights[i] - mst[i]));
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "max multiset deviation %.3g", worst);
    report("single-linkage / MST equivalence (1e-9)", worst <= 1e-9, detail);
}

// ---------------------------------------------------------------------------
// end-to-end desk-scale run on 60 synthetic shapes

struct EndToEnd {
    fs::path out_dir;
    std::vector<std::size_t> classes; // by dataset record order
    bool ok = false;
};

EndToEnd run_end_to_end(const fs::path& base) {
    EndToEnd r;
    const fs::path input = base / "shapes";
    write_shape_pngs(input, make_shape_set(20, 2024));

    ExperimentConfig cfg;
    cfg.name = "synthetic60";
    cfg.input_dir = input;
    cfg.output_dir = base / "out";
    cfg.hidden_units = {64, 32, 16};
    cfg.epochs = 500;
    cfg.seed = 7;
    run_experiment(cfg);
    r.out_dir = cfg.output_dir;

    for (const auto& row : read_manifest_csv(r.out_dir / "manifest.csv"))
        if (row.status == "ok")
            r.classes.push_back(
                static_cast<std::size_t>(shape_class_from_catalogue(row.catalogue_id)));
    r.ok = true;
    return r;
}

void criterion_end_to_end(const EndToEnd& r, double elapsed) {
    if (!r.ok) {
        report("end-to-end desk-scale run", false, "pipeline failed");
        return;
    }
    // (a) layer-1 training halves the loss
    double first = 0.0, last = 0.0;
    {
        std::ifstream is(r.out_dir / "train_layer1.csv");
        std::string line;
        std::getline(is, line); // header
        bool got_first = false;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            const auto f = csv_split(line);
            if (!got_first) {
                first = std::stod(f[1]);
                got_first = true;
            }
            last = std::stod(f[1]);
        }
    }
    const bool halved = last < 0.5 * first;

    // (b) the full 49-cell grid completed
    std::size_t scored = 0;
    {
        std::ifstream is(r.out_dir / "grid.csv");
        std::string line;
        std::getline(is, line);
        while (std::getline(is, line))
            if (!line.empty() && line.find("skipped") == std::string::npos) ++scored;
    }
    const bool grid_complete = scored == 49;

    // (c) 3-cluster purity vs generator labels
    const auto tree = read_tree_csv(r.out_dir / "tree.csv");
    const auto cut = oracle::cut_tree(tree, 3);
    const double pur = oracle::purity(cut, r.classes);

    // (d) same-class seed fraction
    std::size_t same = 0, total = 0;
    for (const auto& seed : extract_seeds(tree)) {
        ++total;
        if (r.classes[seed.left] == r.classes[seed.right]) ++same;
    }
    const double seed_frac = total ? double(same) / double(total) : 0.0;

    char detail[240];
    std::snprintf(detail, sizeof(detail),
                  "loss %.3g -> %.3g, grid %zu/49, purity %.3f, same-class seeds %.0f%% "
                  "(%zu/%zu), %.1f s",
                  first, last, scored, pur, 100.0 * seed_frac, same, total, elapsed);
    report("end-to-end run (halved loss, full grid, purity >= 0.8, seeds >= 70%, < 300 s)",
           halved && grid_complete && pur >= 0.8 && seed_frac >= 0.7 && elapsed < 300.0,
           detail);
}

// ---------------------------------------------------------------------------
// summary schema against the golden header

void criterion_schema(const EndToEnd& r) {
    const std::string golden = slurp(fs::path(SHAPECLUST_GOLDEN_DIR) / "summary_header.golden");
    const std::string summary = slurp(r.out_dir / "summary.csv");
    const std::string header = summary.substr(0, summary.find('\n') + 1);
    bool ok = !golden.empty() && header == golden;

    std::string detail = "header matches golden";
    const auto nl = summary.find('\n');
    const auto row = csv_split(summary.substr(nl + 1, summary.find('\n', nl + 1) - nl - 1));
    if (row.size() != 7) {
        ok = false;
        detail = "row has wrong arity";
    } else {
        const long n = std::stol(row[1]);
        const long classes = std::stol(row[5]);
        const long seeds = std::stol(row[6]);
        const double coph = std::stod(row[4]);
        const bool method_ok = [&] {
            try {
                method_from_name(row[2]);
                metric_from_name(row[3]);
                return true;
            } catch (const Error&) {
                return false;
            }
        }();
        if (classes != n - 1 || seeds < 1 || coph < -1.0 || coph > 1.0 || !method_ok) {
            ok = false;
            detail = "row semantics violated";
        } else {
            detail = "n=" + row[1] + " classes=" + row[5] + " (= n-1), seeds=" + row[6];
        }
    }
    report("summary schema reproduction (golden header, classes == n-1)", ok, detail);
}

// ---------------------------------------------------------------------------
// determinism: two identical runs, byte-identical outputs

void criterion_determinism(const fs::path& base) {
    const fs::path input = base / "shapes_det";
    write_shape_pngs(input, make_shape_set(4, 99));
    ExperimentConfig cfg;
    cfg.name = "det";
    cfg.input_dir = input;
    cfg.hidden_units = {16, 8};
    cfg.epochs = 60;
    cfg.seed = 5;
    cfg.output_dir = base / "det1";
    const RunArtifacts a = run_experiment(cfg);
    cfg.output_dir = base / "det2";
    const RunArtifacts b = run_experiment(cfg);

    const bool ok = slurp(a.features) == slurp(b.features) && slurp(a.grid) == slurp(b.grid) &&
                    slurp(a.seeds) == slurp(b.seeds) && slurp(a.summary) == slurp(b.summary);
    report("determinism (features/grid/seeds/summary byte-identical)", ok);
}

} // namespace

int main() {
    const fs::path base = fs::temp_directory_path() / "shapeclust_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);

    criterion_gradients();
    criterion_loss_identities();
    criterion_clustering_oracle();
    criterion_cophenet();
    criterion_single_mst();

    EndToEnd e2e;
    double e2e_seconds = 0.0;
    try {
        const auto t0 = Clock::now();
        e2e = run_end_to_end(base);
        e2e_seconds = seconds_since(t0);
    } catch (const std::exception& ex) {
        report("end-to-end desk-scale run", false, ex.what());
        report("summary schema reproduction (golden header, classes == n-1)", false,
               "no summary to check");
        criterion_determinism(base);
        fs::remove_all(base);
        return 1;
    }
    criterion_end_to_end(e2e, e2e_seconds);
    criterion_schema(e2e);
    criterion_determinism(base);

    fs::remove_all(base);
    std::printf("%s\n", failures == 0 ? "all criteria passed" : "criteria FAILED");
    return failures == 0 ? 0 : 1;
}
