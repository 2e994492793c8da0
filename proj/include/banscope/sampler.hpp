#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "banscope/graph.hpp"

namespace banscope {

/// Where interactions come from. Implementations return, newest first,
/// up to `fanout` distinct partners a user interacted with (replied to
/// or retweeted), never including the user itself.
class InteractionSource {
public:
    virtual ~InteractionSource() = default;
    virtual bool has_user(const std::string& id) = 0;
    virtual std::vector<std::string> neighbors_of(const std::string& id, int fanout) = 0;
};

/// In-memory source backed by explicit per-user partner lists.
class SyntheticGraphSource : public InteractionSource {
public:
    void set_interactions(const std::string& id, std::vector<std::string> partners);
    bool has_user(const std::string& id) override;
    std::vector<std::string> neighbors_of(const std::string& id, int fanout) override;

private:
    std::unordered_map<std::string, std::vector<std::string>> interactions_;
};

/// Source that crawls a mock OSN endpoint through its timeline and
/// tweet lookups.
class MockOsnSource : public InteractionSource {
public:
    explicit MockOsnSource(std::string base_url, int timeline_depth = 1000);
    ~MockOsnSource() override;
    bool has_user(const std::string& id) override;
    std::vector<std::string> neighbors_of(const std::string& id, int fanout) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Maximum node count of a depth-limited crawl.
std::size_t sample_node_bound(int fanout, int expand_depth);

/// Maximum recorded edge count of a depth-limited crawl (the crawl
/// stops recording once the budget is reached).
std::size_t sample_edge_budget(int fanout, int expand_depth);

/// Depth-limited snowball sample around a landmark. Nodes at depth
/// below expand_depth contribute their partners as new nodes; nodes at
/// the final depth are still queried, but only edges into the already
/// discovered node set are recorded. Deterministic for a fixed source.
EgoGraph sample_ego(InteractionSource& source, const std::string& landmark, int fanout = 33,
                    int expand_depth = 2);

struct CrawlReport {
    PopulationDataset dataset;
    std::vector<std::pair<std::string, std::string>> failures;  // landmark, error
    std::vector<std::string> singletons;  // landmarks whose graph has one node
};

/// Batch sampling; per-landmark failures are recorded and the crawl
/// continues.
CrawlReport crawl_population(InteractionSource& source,
                             const std::vector<std::string>& landmarks, int fanout = 33,
                             int expand_depth = 2);

}  // namespace banscope
