#include "banscope/sampler.hpp"

#include <deque>
#include <stdexcept>

#include "httplib.h"
#include "json.hpp"

namespace banscope {

using nlohmann::json;

void SyntheticGraphSource::set_interactions(const std::string& id,
                                            std::vector<std::string> partners) {
    interactions_[id] = std::move(partners);
}

bool SyntheticGraphSource::has_user(const std::string& id) {
    return interactions_.contains(id);
}

std::vector<std::string> SyntheticGraphSource::neighbors_of(const std::string& id, int fanout) {
    std::vector<std::string> out;
    auto it = interactions_.find(id);
    if (it == interactions_.end()) return out;
    for (const auto& p : it->second) {
        if (p == id) continue;
        if (std::find(out.begin(), out.end(), p) != out.end()) continue;
        out.push_back(p);
        if (static_cast<int>(out.size()) >= fanout) break;
    }
    return out;
}

namespace {

std::string url_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 15];
        }
    }
    return out;
}

}  // namespace

struct MockOsnSource::Impl {
    httplib::Client client;
    int timeline_depth;
    std::unordered_map<std::int64_t, std::string> tweet_author;

    Impl(const std::string& base_url, int depth) : client(base_url), timeline_depth(depth) {
        client.set_keep_alive(true);
    }

    std::string author_of(std::int64_t tweet_id) {
        auto it = tweet_author.find(tweet_id);
        if (it != tweet_author.end()) return it->second;
        auto res = client.Get("/tweet/" + std::to_string(tweet_id));
        std::string author;
        if (res && res->status == 200) {
            json j = json::parse(res->body, nullptr, false);
            if (j.is_object() && j.contains("author")) author = j["author"].get<std::string>();
        }
        tweet_author.emplace(tweet_id, author);
        return author;
    }
};

MockOsnSource::MockOsnSource(std::string base_url, int timeline_depth)
    : impl_(std::make_unique<Impl>(base_url, timeline_depth)) {}

MockOsnSource::~MockOsnSource() = default;

bool MockOsnSource::has_user(const std::string& id) {
    auto res = impl_->client.Get("/user/" + url_encode(id) + "/timeline?n=1");
    return res && res->status == 200;
}

std::vector<std::string> MockOsnSource::neighbors_of(const std::string& id, int fanout) {
    std::vector<std::string> out;
    auto res = impl_->client.Get("/user/" + url_encode(id) + "/timeline?n=" +
                                 std::to_string(impl_->timeline_depth));
    if (!res || res->status != 200) return out;
    json j = json::parse(res->body, nullptr, false);
    if (!j.is_object() || !j.contains("tweets")) return out;
    for (const auto& tj : j["tweets"]) {
        std::string kind = tj.value("kind", std::string{});
        if (kind != "reply" && kind != "retweet") continue;
        if (!tj.contains("ref")) continue;
        std::string partner = impl_->author_of(tj["ref"].get<std::int64_t>());
        if (partner.empty() || partner == id) continue;
        if (std::find(out.begin(), out.end(), partner) != out.end()) continue;
        out.push_back(partner);
        if (static_cast<int>(out.size()) >= fanout) break;
    }
    return out;
}

std::size_t sample_node_bound(int fanout, int expand_depth) {
    std::size_t bound = 1, level = 1;
    for (int d = 0; d < expand_depth; ++d) {
        level *= static_cast<std::size_t>(fanout);
        bound += level;
    }
    return bound;
}

std::size_t sample_edge_budget(int fanout, int expand_depth) {
    // fanout for the landmark, a full fanout for every node queried at
    // depth < expand_depth, one slot per final-depth node.
    std::size_t inner = 0, level = 1;
    for (int d = 0; d < expand_depth; ++d) {
        inner += level;
        level *= static_cast<std::size_t>(fanout);
    }
    return static_cast<std::size_t>(fanout) + inner * static_cast<std::size_t>(fanout) + level;
}

EgoGraph sample_ego(InteractionSource& source, const std::string& landmark, int fanout,
                    int expand_depth) {
    if (fanout < 1) throw std::invalid_argument("sample_ego needs fanout >= 1");
    if (expand_depth < 1) throw std::invalid_argument("sample_ego needs expand_depth >= 1");
    if (!source.has_user(landmark))
        throw std::invalid_argument("landmark not resolvable: " + landmark);

    EgoGraph g(landmark);
    const std::size_t edge_budget = sample_edge_budget(fanout, expand_depth);
    std::deque<std::pair<int, int>> queue;  // node index, depth
    queue.emplace_back(0, 0);
    std::vector<int> depth_of{0};

    while (!queue.empty()) {
        auto [v, depth] = queue.front();
        queue.pop_front();
        std::vector<std::string> partners = source.neighbors_of(g.nodes[v].id, fanout);
        for (const auto& pid : partners) {
            if (pid == g.nodes[v].id) continue;
            int p = g.find(pid);
            if (p < 0) {
                if (depth >= expand_depth) continue;  // final depth adds no nodes
                p = g.add_node(Node{pid, {}, {}});
                depth_of.push_back(depth + 1);
                if (depth + 1 <= expand_depth) queue.emplace_back(p, depth + 1);
            }
            // v interacted with p, so p is the edge source.
            if (g.edges.size() < edge_budget) g.add_edge(p, v);
        }
    }
    return g;
}

CrawlReport crawl_population(InteractionSource& source,
                             const std::vector<std::string>& landmarks, int fanout,
                             int expand_depth) {
    CrawlReport report;
    report.dataset.population = "CRAWL";
    for (const auto& landmark : landmarks) {
        try {
            EgoGraph g = sample_ego(source, landmark, fanout, expand_depth);
            if (g.node_count() == 1) report.singletons.push_back(landmark);
            report.dataset.graphs.push_back(std::move(g));
        } catch (const std::exception& e) {
            report.failures.emplace_back(landmark, e.what());
        }
    }
    return report;
}

}  // namespace banscope
