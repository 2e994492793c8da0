// banscope: quantifies how plausible shadow banning is on a platform.
// Subcommands cover the whole pipeline: ingest/stats, the uniform-bug
// hypothesis (H0), the epidemic hypothesis (H1), likelihood comparison,
// profile-feature prediction, plus the mock service, the black-box
// detector and the ego-graph sampler.

#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "banscope/binomial_test.hpp"
#include "banscope/csv.hpp"
#include "banscope/detector.hpp"
#include "banscope/features.hpp"
#include "banscope/graph_stats.hpp"
#include "banscope/ingest.hpp"
#include "banscope/likelihood.hpp"
#include "banscope/osn_sim.hpp"
#include "banscope/parallel.hpp"
#include "banscope/rng.hpp"
#include "banscope/sampler.hpp"
#include "banscope/si_model.hpp"
#include "banscope/synth.hpp"
#include "json.hpp"

namespace {

using namespace banscope;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTransport = 3;

class TransportFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Common {
    std::uint64_t seed = 1;
    int workers = default_workers();
    std::string out = ".";
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
    json config = json::object();

    void attach(CLI::App* cmd) {
        if (const char* env = std::getenv("BANSCOPE_SEED")) seed = std::strtoull(env, nullptr, 10);
        if (const char* env = std::getenv("BANSCOPE_WORKERS")) workers = std::atoi(env);
        cmd->add_option("--seed", seed, "RNG seed (env BANSCOPE_SEED)")
            ->capture_default_str();
        cmd->add_option("--workers", workers, "parallel workers (env BANSCOPE_WORKERS)")
            ->capture_default_str();
        cmd->add_option("--out", out, "output directory")->capture_default_str();
    }

    std::string path(const std::string& name) const { return out + "/" + name; }

    void write_meta(const std::string& subcommand) {
        auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - started)
                        .count();
        json meta{{"tool", "banscope"},
                  {"version", kVersion},
                  {"subcommand", subcommand},
                  {"seed", seed},
                  {"workers", workers},
                  {"config", config},
                  {"wall_ms", wall},
                  {"finished_unix",
                   std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count()}};
        std::ofstream f(path(subcommand + "_meta.json"));
        f << meta.dump(2) << '\n';
    }
};

json group_to_json(const GroupAverage& g) {
    json j;
    j["banned"] = g.banned ? json(*g.banned) : json(nullptr);
    j["not_banned"] = g.not_banned ? json(*g.not_banned) : json(nullptr);
    return j;
}

std::vector<double> make_grid(double lo, double hi, double step) {
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        double v = lo + i * step;
        if (v > hi + 1e-12) break;
        grid.push_back(v);
        if (step <= 0) break;
    }
    return grid;
}

// ----- stats -----------------------------------------------------------------

int run_stats(const std::string& input, Common& common) {
    PopulationDataset d = load_dataset(input);
    auto violations = validate_dataset(d);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "invalid: " << v << '\n';
        return kExitData;
    }

    CsvWriter csv(common.path("stats_graphs.csv"));
    csv.row("landmark", "nodes", "undirected_edges", "avg_degree", "clustering", "two_core",
            "sb_fraction");
    double cl_sum = 0, core_sum = 0, deg_sum = 0;
    for (const auto& g : d.graphs) {
        GraphTopology t = graph_topology(g);
        csv.row(t.landmark, t.nodes, t.undirected_edges, t.avg_degree, t.clustering,
                static_cast<std::int64_t>(t.two_core), t.sb_fraction);
        cl_sum += t.clustering;
        core_sum += static_cast<double>(t.two_core);
        deg_sum += t.avg_degree;
    }

    BanCooccurrence co = ban_cooccurrence(d);
    json cooc{{"totals",
               {{"typeahead", co.totals[0]}, {"search", co.totals[1]}, {"ghost", co.totals[2]}}}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = co.conditional[i][j];
            cooc["conditional"][kBanTypeNames[i]][kBanTypeNames[j]] =
                std::isnan(v) ? json(nullptr) : json(v);
        }

    std::size_t banned = 0;
    for (const auto& g : d.graphs)
        for (const auto& n : g.nodes)
            if (n.bans.banned()) ++banned;

    json summary{{"population", d.population},
                 {"graphs", d.graphs.size()},
                 {"total_nodes", d.total_nodes()},
                 {"banned_nodes", banned},
                 {"mu_hat", estimate_mu(d)},
                 {"degree_by_ban_status", group_to_json(degree_by_ban_status(d))},
                 {"neighbor_sb_fraction", group_to_json(neighbor_sb_fraction(d))},
                 {"avg_degree_mean", d.graphs.empty() ? 0.0 : deg_sum / d.graphs.size()},
                 {"clustering_mean", d.graphs.empty() ? 0.0 : cl_sum / d.graphs.size()},
                 {"two_core_mean", d.graphs.empty() ? 0.0 : core_sum / d.graphs.size()},
                 {"cooccurrence", cooc}};
    std::ofstream f(common.path("stats_summary.json"));
    f << summary.dump(2) << '\n';
    common.write_meta("stats");
    return kExitOk;
}

// ----- h0-test ---------------------------------------------------------------

int run_h0(const std::string& input, double mu_flag, std::size_t top, Common& common) {
    PopulationDataset d = load_dataset(input);
    double mu = mu_flag >= 0 ? mu_flag : estimate_mu(d);

    std::vector<GraphTestResult> results(d.graphs.size());
    parallel_for(d.graphs.size(), common.workers,
                 [&](std::size_t i) { results[i] = test_graph(d.graphs[i], mu); });

    CsvWriter csv(common.path("h0_results.csv"));
    csv.row("landmark", "n", "s", "point_prob_log10", "p_value");
    std::size_t below1 = 0, below5 = 0;
    for (const auto& r : results) {
        csv.row(r.landmark, r.n, r.s, r.point_prob_log10, r.p_two_sided);
        if (r.p_two_sided < 0.01) ++below1;
        if (r.p_two_sided < 0.05) ++below5;
    }

    CsvWriter topcsv(common.path("h0_top.csv"));
    topcsv.row("landmark", "n", "s", "sb_ratio", "point_prob_log10", "p_value");
    for (const auto& r : rank_unlikely(d, mu, top))
        topcsv.row(r.landmark, r.n, r.s,
                   r.n > 0 ? static_cast<double>(r.s) / static_cast<double>(r.n) : 0.0,
                   r.point_prob_log10, r.p_two_sided);

    json summary{{"mu_hat", mu},
                 {"graphs", d.graphs.size()},
                 {"below_1pct", below1},
                 {"below_5pct", below5}};
    std::ofstream f(common.path("h0_summary.json"));
    f << summary.dump(2) << '\n';
    common.write_meta("h0-test");
    return kExitOk;
}

// ----- fit-h1 / select-beta ----------------------------------------------------

struct GridFlags {
    double p0_min = 0.0, p0_max = 0.025, p0_step = 0.0025;
    double beta_min = 0.0, beta_max = 0.25, beta_step = 0.01;
    int trials = 100;
    int k = 0;  // 0 = rounded dataset mean degree

    void attach(CLI::App* cmd) {
        cmd->add_option("--p0-min", p0_min)->capture_default_str();
        cmd->add_option("--p0-max", p0_max)->capture_default_str();
        cmd->add_option("--p0-step", p0_step)->capture_default_str();
        cmd->add_option("--beta-min", beta_min)->capture_default_str();
        cmd->add_option("--beta-max", beta_max)->capture_default_str();
        cmd->add_option("--beta-step", beta_step)->capture_default_str();
        cmd->add_option("--trials", trials, "simulation trials per grid point and graph")
            ->capture_default_str();
        cmd->add_option("--k", k, "degree of the analytic reference model (0 = data mean)")
            ->capture_default_str();
    }
};

int dataset_mean_degree(const PopulationDataset& d) {
    double deg = 0;
    std::size_t nodes = 0;
    for (const auto& g : d.graphs) {
        deg += 2.0 * static_cast<double>(undirected_view(g).edge_count());
        nodes += g.node_count();
    }
    int k = nodes == 0 ? 1 : static_cast<int>(std::lround(deg / static_cast<double>(nodes)));
    return std::max(1, k);
}

int run_fit_h1(const std::string& input, const GridFlags& flags, bool select, Common& common) {
    PopulationDataset d = load_dataset(input);
    double mu_hat = estimate_mu(d);
    int k = flags.k > 0 ? flags.k : dataset_mean_degree(d);

    SimOptions options{flags.trials, common.seed, common.workers};
    auto p0_grid = make_grid(flags.p0_min, flags.p0_max, flags.p0_step);
    auto beta_grid = make_grid(flags.beta_min, flags.beta_max, flags.beta_step);
    std::vector<RidgePoint> ridge = fit_ridge(d, p0_grid, beta_grid, options);

    CsvWriter csv(common.path("ridge.csv"));
    csv.row("p0", "beta", "simulated_mu", "distance");
    for (const auto& p : ridge) csv.row(p.params.p0, p.params.beta, p.simulated_mu, p.distance);

    // The analytic ridge line: beta solving analytic_mu(p0, beta, k) = mu-hat.
    CsvWriter line(common.path("analytic_line.csv"));
    line.row("p0", "beta_analytic");
    for (double p0 : p0_grid)
        if (p0 <= mu_hat) line.row(p0, analytic_beta_for_mu(p0, mu_hat, k));

    json summary{{"mu_hat", mu_hat}, {"k", k}, {"grid_points", ridge.size()}};

    if (select) {
        BetaSelection sel = select_beta(d, ridge, options);
        CsvWriter cand(common.path("conditional_curve.csv"));
        cand.row("p0", "beta", "simulated_mu", "distance", "simulated_conditional",
                 "analytic_conditional", "empirical_conditional");
        for (const auto& c : sel.candidates)
            cand.row(c.point.params.p0, c.point.params.beta, c.point.simulated_mu,
                     c.point.distance, c.simulated_conditional,
                     neighbor_conditional_analytic(c.point.params), sel.empirical_conditional);
        summary["selected"] = {{"p0", sel.params.p0},
                               {"beta", sel.params.beta},
                               {"simulated_mu", sel.simulated_mu},
                               {"simulated_conditional", sel.simulated_conditional},
                               {"empirical_conditional", sel.empirical_conditional},
                               {"beta_to_p0_ratio",
                                sel.params.p0 > 0 ? sel.params.beta / sel.params.p0 : 0.0}};
    }

    std::ofstream f(common.path(select ? "select_beta_summary.json" : "fit_h1_summary.json"));
    f << summary.dump(2) << '\n';
    common.write_meta(select ? "select-beta" : "fit-h1");
    return kExitOk;
}

// ----- likelihood --------------------------------------------------------------

int run_likelihood(const std::string& input, double p0, double beta, int trials,
                   std::vector<double> edges, Common& common) {
    PopulationDataset d = load_dataset(input);
    BinSpec bins;
    if (!edges.empty()) bins.edges = std::move(edges);
    HypothesisComparison cmp =
        bin_and_compare(d, SIParams{p0, beta}, trials, bins, common.seed, common.workers);

    CsvWriter csv(common.path("likelihood.csv"));
    csv.row("landmark", "n", "s", "L_h0_log10", "L_h1", "trials", "bin_h0", "bin_h1");
    for (const auto& r : cmp.reports)
        csv.row(r.landmark, r.n, r.observed_s, r.l_h0_log10, r.l_h1, r.trials,
                bin_label(r.bin_h0, bins), bin_label(r.bin_h1, bins));

    json per_bin = json::array();
    for (std::size_t b = 0; b < bins.bin_count(); ++b)
        per_bin.push_back({{"bin", bin_label(static_cast<int>(b), bins)},
                           {"h0", cmp.h0_bin_counts[b]},
                           {"h1", cmp.h1_bin_counts[b]}});
    json summary{{"mu_hat", cmp.mu_hat},
                 {"p0", p0},
                 {"beta", beta},
                 {"trials", trials},
                 {"bins", per_bin},
                 {"likely_ratio_h1_over_h0", cmp.likely_ratio},
                 {"unlikely_ratio_h0_over_h1", cmp.unlikely_ratio}};
    std::ofstream f(common.path("likelihood_summary.json"));
    f << summary.dump(2) << '\n';
    common.write_meta("likelihood");
    return kExitOk;
}

// ----- features ------------------------------------------------------------------

int run_features(const std::string& input, TreeParams params, double train_fraction,
                 int repeats, Common& common) {
    PopulationDataset d = load_dataset(input);
    SampleMatrix samples = samples_from_dataset(d);
    if (samples.rows.empty()) {
        std::cerr << "no profiles with the complete feature set\n";
        return kExitData;
    }
    SampleMatrix balanced = balance(samples, common.seed);
    auto [train, test] = train_test_split(balanced, train_fraction, common.seed);
    TreeModel model = fit_tree(train, params, common.seed);

    std::vector<double> gini_imp = impurity_importance(model);
    std::vector<double> perm_imp =
        test.rows.empty() ? std::vector<double>(gini_imp.size(), 0.0)
                          : permutation_importance(model, test, common.seed, repeats);

    // Ranked by impurity importance, descending; name breaks ties.
    std::vector<std::size_t> order(gini_imp.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (gini_imp[a] != gini_imp[b]) return gini_imp[a] > gini_imp[b];
        return model.feature_names[a] < model.feature_names[b];
    });
    CsvWriter csv(common.path("importance.csv"));
    csv.row("feature", "impurity_importance", "permutation_importance");
    for (std::size_t f : order) csv.row(model.feature_names[f], gini_imp[f], perm_imp[f]);

    std::ofstream mf(common.path("model.json"));
    mf << model_to_json(model) << '\n';

    json summary{{"profiles_with_features", samples.rows.size()},
                 {"balanced_size", balanced.rows.size()},
                 {"train_size", train.rows.size()},
                 {"test_size", test.rows.size()},
                 {"train_accuracy", accuracy(model, train)},
                 {"test_accuracy", test.rows.empty() ? json(nullptr)
                                                     : json(accuracy(model, test))}};
    std::ofstream f(common.path("features_summary.json"));
    f << summary.dump(2) << '\n';
    common.write_meta("features");
    return kExitOk;
}

// ----- synth ------------------------------------------------------------------

int run_synth(int graphs, double p0, double beta, double mean_degree, double calibrate_mu,
              const std::string& output, Common& common) {
    PopulationDataset topo;
    SIParams params{p0, beta};
    if (calibrate_mu > 0) {
        topo = calibrated_topology_population(graphs, params, calibrate_mu, common.seed);
    } else {
        SynthOptions opt;
        opt.graphs = graphs;
        opt.target_avg_degree = mean_degree;
        opt.seed = common.seed;
        topo = make_topology_population(opt);
    }
    PopulationDataset planted = plant_synthetic(topo, params, derive_seed(common.seed, 0x9a9));
    save_dataset(planted, output);

    json summary{{"graphs", planted.graphs.size()},
                 {"total_nodes", planted.total_nodes()},
                 {"p0", p0},
                 {"beta", beta},
                 {"planted_fraction", estimate_mu(planted)},
                 {"expected_fraction", expected_banned_fraction(topo, params)},
                 {"output", output}};
    std::ofstream f(common.path("synth_summary.json"));
    f << summary.dump(2) << '\n';
    common.write_meta("synth");
    return kExitOk;
}

// ----- serve-mock ----------------------------------------------------------------

MockServer* g_server = nullptr;

int run_serve_mock(const std::string& scenario_path, const std::string& host, int port,
                   const std::string& write_scenario, Common& common) {
    Scenario scenario = load_scenario(scenario_path);
    bool any_tweets = false;
    for (const auto& u : scenario.users)
        if (!u.tweets.empty()) any_tweets = true;
    if (!any_tweets) {
        std::cerr << "scenario has no tweets; planting synthetic ones\n";
        scenario = plant_scenario(load_dataset(scenario_path));
    }
    if (!write_scenario.empty())
        save_scenario(load_dataset(scenario_path), scenario, write_scenario);
    std::cerr << "serving " << scenario.users.size() << " users on " << host << ":" << port
              << '\n';
    common.write_meta("serve-mock");
    MockServer server(std::move(scenario));
    g_server = &server;
    std::signal(SIGINT, [](int) {
        if (g_server != nullptr) g_server->stop();
    });
    std::signal(SIGTERM, [](int) {
        if (g_server != nullptr) g_server->stop();
    });
    if (!server.serve(host, port)) throw TransportFailure("cannot bind " + host);
    return kExitOk;
}

// ----- detect ------------------------------------------------------------------

int run_detect(const std::string& endpoint, std::vector<std::string> users,
               const std::string& scenario_path, std::int64_t since, bool full_scan,
               Common& common) {
    if (!scenario_path.empty()) {
        Scenario s = load_scenario(scenario_path);
        for (const auto& u : s.users) users.push_back(u.screen_name);
    }
    if (users.empty()) {
        std::cerr << "nothing to test: pass --user or --scenario\n";
        return kExitUsage;
    }
    DetectorOptions opts;
    opts.ghost_full_scan = full_scan;

    std::vector<DetectReport> reports(users.size());
    parallel_for(users.size(), common.workers, [&](std::size_t i) {
        Detector detector(endpoint, opts);  // one client per work item
        reports[i] = detector.detect(users[i], since);
    });

    CsvWriter csv(common.path("detection_results.csv"));
    csv.row("screen_name", "typeahead", "search", "ghost", "banned", "complete", "inactive");
    json evidence = json::array();
    std::size_t failures = 0;
    auto verdict = [](const std::optional<bool>& v) { return v ? (*v ? 1 : 0) : -1; };
    for (std::size_t i = 0; i < users.size(); ++i) {
        const DetectReport& r = reports[i];
        csv.row(users[i], verdict(r.typeahead), verdict(r.search), verdict(r.ghost),
                r.banned() ? 1 : 0, r.complete ? 1 : 0, r.ghost_inactive ? 1 : 0);
        json entry{{"screen_name", users[i]}, {"banned", r.banned()}, {"complete", r.complete}};
        for (const auto& e : r.evidence)
            entry["evidence"].push_back({{"test", e.test},
                                         {"request", e.request},
                                         {"response_digest", e.response_digest},
                                         {"verdict", e.verdict}});
        for (const auto& err : r.errors) entry["errors"].push_back(err);
        if (!r.errors.empty()) ++failures;
        evidence.push_back(std::move(entry));
    }
    std::ofstream f(common.path("detection_evidence.json"));
    f << evidence.dump(2) << '\n';
    common.write_meta("detect");
    if (failures == users.size()) throw TransportFailure("every probe failed against " + endpoint);
    return kExitOk;
}

// ----- sample ------------------------------------------------------------------

int run_sample(const std::string& endpoint, std::vector<std::string> landmarks,
               const std::string& landmarks_file, int fanout, int depth,
               const std::string& output, Common& common) {
    if (!landmarks_file.empty())
        for_each_line(landmarks_file, [&](const std::string& line, std::size_t) {
            if (!line.empty()) landmarks.push_back(line);
        });
    if (landmarks.empty()) {
        std::cerr << "nothing to sample: pass --landmark or --landmarks-file\n";
        return kExitUsage;
    }
    MockOsnSource source(endpoint);
    CrawlReport report = crawl_population(source, landmarks, fanout, depth);
    report.dataset.population = "SAMPLED";
    save_dataset(report.dataset, output);

    json failures = json::array();
    for (const auto& [landmark, error] : report.failures)
        failures.push_back({{"landmark", landmark}, {"error", error}});
    json summary{{"graphs", report.dataset.graphs.size()},
                 {"total_nodes", report.dataset.total_nodes()},
                 {"singletons", report.singletons},
                 {"failures", failures},
                 {"output", output}};
    std::ofstream f(common.path("sample_summary.json"));
    f << summary.dump(2) << '\n';
    common.write_meta("sample");
    if (!report.failures.empty() && report.dataset.graphs.empty())
        throw TransportFailure("no landmark could be sampled from " + endpoint);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shadow-ban plausibility toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("banscope ") + kVersion);

    Common common;
    std::string input, output, endpoint, scenario, host = "127.0.0.1", landmarks_file;
    std::string write_scenario;
    double mu = -1.0;
    std::size_t top = 5;
    GridFlags grid;
    double p0 = 0.015, beta = 0.0955, mean_degree = 6.0, calibrate_mu = 0.0,
           train_fraction = 0.8;
    int trials = 10000, graphs = 500, port = 8787, fanout = 33, depth = 2, repeats = 5;
    std::vector<double> bin_edges;
    std::vector<std::string> users, landmarks;
    std::int64_t since = 0;
    bool full_scan = false;
    TreeParams tree_params;
    std::string max_features = "all";

    auto* stats = app.add_subcommand("stats", "descriptive statistics of a dataset");
    stats->add_option("input", input, "dataset JSONL ('-' = stdin)")->required();
    common.attach(stats);

    auto* h0 = app.add_subcommand("h0-test", "binomial test of the uniform-bug hypothesis");
    h0->add_option("input", input)->required();
    h0->add_option("--mu", mu, "override the estimated banned fraction");
    h0->add_option("--top", top, "rows in the most-unlikely table")->capture_default_str();
    common.attach(h0);

    auto* fit = app.add_subcommand("fit-h1", "SI parameter ridge over a (p0, beta) grid");
    fit->add_option("input", input)->required();
    grid.attach(fit);
    common.attach(fit);

    auto* select =
        app.add_subcommand("select-beta", "pick SI parameters via the neighbor conditional");
    select->add_option("input", input)->required();
    grid.attach(select);
    common.attach(select);

    auto* lik = app.add_subcommand("likelihood", "binned H0 vs H1 likelihood comparison");
    lik->add_option("input", input)->required();
    lik->add_option("--p0", p0, "SI initial infection probability")->capture_default_str();
    lik->add_option("--beta", beta, "SI contamination probability")->capture_default_str();
    lik->add_option("--trials", trials, "simulations per graph")->capture_default_str();
    lik->add_option("--bin-edges", bin_edges, "descending bin edges");
    common.attach(lik);

    auto* feat = app.add_subcommand("features", "decision-tree prediction of ban status");
    feat->add_option("input", input)->required();
    feat->add_option("--min-split", tree_params.min_samples_split)->capture_default_str();
    feat->add_option("--min-leaf", tree_params.min_samples_leaf)->capture_default_str();
    feat->add_option("--max-features", max_features, "all|sqrt|log2")->capture_default_str();
    feat->add_option("--train-fraction", train_fraction)->capture_default_str();
    feat->add_option("--importance-repeats", repeats)->capture_default_str();
    common.attach(feat);

    auto* synth = app.add_subcommand("synth", "generate a planted synthetic dataset");
    synth->add_option("--graphs", graphs)->capture_default_str();
    synth->add_option("--p0", p0)->capture_default_str();
    synth->add_option("--beta", beta)->capture_default_str();
    synth->add_option("--mean-degree", mean_degree)->capture_default_str();
    synth->add_option("--calibrate-mu", calibrate_mu,
                      "tune topology so the expected banned fraction hits this value");
    synth->add_option("--output", output, "dataset file to write")->required();
    common.attach(synth);

    auto* serve = app.add_subcommand("serve-mock", "serve a scenario as a mock OSN");
    serve->add_option("scenario", scenario, "scenario or dataset JSONL")->required();
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->capture_default_str();
    serve->add_option("--write-scenario", write_scenario,
                      "also write the (possibly planted) scenario to this file");
    common.attach(serve);

    auto* detect = app.add_subcommand("detect", "run the three ban tests against an endpoint");
    detect->add_option("--endpoint", endpoint, "base URL, e.g. http://127.0.0.1:8787")
        ->required();
    detect->add_option("--user", users, "screen name(s) to test");
    detect->add_option("--scenario", scenario, "test every user of this scenario file");
    detect->add_option("--since", since, "activity window start (unix)")->capture_default_str();
    detect->add_flag("--full-scan", full_scan, "ghost test probes the whole timeline");
    common.attach(detect);

    auto* sample = app.add_subcommand("sample", "snowball-sample ego-graphs from an endpoint");
    sample->add_option("--endpoint", endpoint)->required();
    sample->add_option("--landmark", landmarks, "landmark id(s)");
    sample->add_option("--landmarks-file", landmarks_file, "file with one landmark per line");
    sample->add_option("--fanout", fanout)->capture_default_str();
    sample->add_option("--depth", depth, "expansion depth")->capture_default_str();
    sample->add_option("--output", output, "dataset file to write")->required();
    common.attach(sample);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        std::filesystem::create_directories(common.out);
        CLI::App* active = app.get_subcommands().front();
        for (const auto* opt : active->get_options()) {
            if (opt->get_name().empty()) continue;
            auto results = opt->results();
            if (!results.empty())
                common.config[opt->get_name()] = results.size() == 1 ? json(results.front())
                                                                     : json(results);
            else if (!opt->get_default_str().empty())
                common.config[opt->get_name()] = opt->get_default_str();
        }
        if (stats->parsed()) return run_stats(input, common);
        if (h0->parsed()) return run_h0(input, mu, top, common);
        if (fit->parsed()) return run_fit_h1(input, grid, false, common);
        if (select->parsed()) return run_fit_h1(input, grid, true, common);
        if (lik->parsed()) return run_likelihood(input, p0, beta, trials, bin_edges, common);
        if (feat->parsed()) {
            tree_params.max_features = max_features_rule_from(max_features);
            return run_features(input, tree_params, train_fraction, repeats, common);
        }
        if (synth->parsed())
            return run_synth(graphs, p0, beta, mean_degree, calibrate_mu, output, common);
        if (serve->parsed()) return run_serve_mock(scenario, host, port, write_scenario, common);
        if (detect->parsed())
            return run_detect(endpoint, users, scenario, since, full_scan, common);
        if (sample->parsed())
            return run_sample(endpoint, landmarks, landmarks_file, fanout, depth, output,
                              common);
    } catch (const TransportFailure& e) {
        std::cerr << "transport error: " << e.what() << '\n';
        return kExitTransport;
    } catch (const IngestError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
