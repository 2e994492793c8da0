#pragma once

#include <cstdint>
#include <vector>

#include "banscope/graph.hpp"

namespace banscope {

/// One-step SI contamination parameters: p0 is the initial infection
/// probability, beta the per-edge contamination probability. beta = 0
/// degenerates to the uniform H0(p0) model.
struct SIParams {
    double p0 = 0.0;
    double beta = 0.0;
    bool operator==(const SIParams&) const = default;
};

/// Simulates one SI draw on the undirected view: every node is
/// initially infected with probability p0, then each initially infected
/// node contaminates each neighbor independently with probability beta.
/// Secondarily infected nodes do not propagate. Returns one flag per
/// node index. A fixed seed fixes the outcome exactly. The initial set
/// depends only on (seed, p0), never on beta.
std::vector<char> si_simulate(const UndirectedView& view, SIParams params, std::uint64_t seed);
std::vector<char> si_simulate(const EgoGraph& g, SIParams params, std::uint64_t seed);

/// Expected banned fraction of the SI process on a regular random graph
/// of degree k: p0 + (1-p0) p1 with
/// p1 = sum_{v=1..k} C(k,v) p0^v (1-p0)^(k-v) (1-(1-beta)^v).
double analytic_mu(SIParams params, int k);

/// The contamination term p1 alone.
double analytic_contamination(SIParams params, int k);

/// beta solving analytic_mu(p0, beta, k) = mu, or the largest
/// representable value when even beta = 1 cannot reach mu. Used to draw
/// the analytic ridge line.
double analytic_beta_for_mu(double p0, double mu, int k);

/// Exact expected banned fraction of the SI process on the graphs of a
/// dataset, from per-node degrees: mean over nodes of
/// p0 + (1-p0)(1-(1-p0 beta)^deg).
double expected_banned_fraction(const PopulationDataset& d, SIParams params);

struct RidgePoint {
    SIParams params;
    double simulated_mu = 0.0;  // node-weighted banned fraction over graphs x trials
    double distance = 0.0;      // |simulated_mu - mu_hat|
    int trials = 0;
};

struct SimOptions {
    int trials = 100;
    std::uint64_t seed = 1;
    int workers = 1;
};

std::vector<double> default_p0_grid();    // 0 .. 0.025 step 0.0025
std::vector<double> default_beta_grid();  // 0 .. 0.25  step 0.01

/// Simulates the SI model on every graph for each (p0, beta) grid point
/// and records the distance of the simulated banned fraction to the
/// dataset's mu-hat. Deterministic for a fixed seed at any worker count.
std::vector<RidgePoint> fit_ridge(const PopulationDataset& d,
                                  const std::vector<double>& p0_grid,
                                  const std::vector<double>& beta_grid,
                                  const SimOptions& options);

/// P(neighbor banned | node banned) measured on the data: over all
/// undirected edges, the fraction of (banned endpoint, neighbor) pairs
/// whose neighbor is banned too.
double neighbor_conditional_empirical(const PopulationDataset& d);

/// The mean-field approximation p0 + (1-p0) beta of the same quantity.
double neighbor_conditional_analytic(SIParams params);

/// The same conditional measured on SI simulations of the dataset's
/// topologies, pair counts pooled over trials.
double neighbor_conditional_simulated(const PopulationDataset& d, SIParams params,
                                      const SimOptions& options);

struct BetaSelection {
    SIParams params;
    double simulated_mu = 0.0;
    double simulated_conditional = 0.0;
    double empirical_conditional = 0.0;
    struct Candidate {
        RidgePoint point;                    // a per-p0 ridge minimum
        double simulated_conditional = 0.0;
    };
    std::vector<Candidate> candidates;
};

/// Picks, among the per-p0 distance minima of the ridge, the parameter
/// pair whose simulated neighbor conditional is closest to the
/// empirical one.
BetaSelection select_beta(const PopulationDataset& d, const std::vector<RidgePoint>& ridge,
                          const SimOptions& options);

/// Copies the dataset's topologies and replaces every ban status with
/// one SI draw per graph. Ground truth parameters are recorded in the
/// crawl_campaign field.
PopulationDataset plant_synthetic(const PopulationDataset& topologies, SIParams params,
                                  std::uint64_t seed);

}  // namespace banscope
