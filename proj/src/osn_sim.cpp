#include "banscope/osn_sim.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "banscope/ingest.hpp"
#include "httplib.h"
#include "json.hpp"

namespace banscope {

using nlohmann::json;

const char* tweet_kind_name(TweetKind k) {
    switch (k) {
        case TweetKind::thread: return "thread";
        case TweetKind::reply: return "reply";
        case TweetKind::retweet: return "retweet";
    }
    return "thread";
}

std::optional<TweetKind> tweet_kind_from(const std::string& name) {
    if (name == "thread") return TweetKind::thread;
    if (name == "reply") return TweetKind::reply;
    if (name == "retweet") return TweetKind::retweet;
    return std::nullopt;
}

const SimUser* Scenario::by_name(const std::string& screen_name) const {
    auto it = name_index_.find(screen_name);
    return it == name_index_.end() ? nullptr : &users[it->second];
}

const SimTweet* Scenario::by_tweet_id(std::int64_t id) const {
    auto it = tweet_index_.find(id);
    return it == tweet_index_.end() ? nullptr : &users[it->second.first].tweets[it->second.second];
}

void Scenario::reindex() {
    name_index_.clear();
    tweet_index_.clear();
    for (std::size_t u = 0; u < users.size(); ++u) {
        name_index_.emplace(users[u].screen_name, u);
        for (std::size_t t = 0; t < users[u].tweets.size(); ++t)
            tweet_index_.emplace(users[u].tweets[t].id, std::make_pair(u, t));
    }
}

Scenario plant_scenario(const PopulationDataset& d, std::int64_t epoch) {
    Scenario s;
    std::unordered_map<std::string, std::size_t> index;
    std::unordered_map<std::string, std::vector<std::string>> partners;

    for (const auto& g : d.graphs) {
        for (const auto& n : g.nodes) {
            if (index.contains(n.id)) continue;
            index.emplace(n.id, s.users.size());
            s.users.push_back(SimUser{n.id, n.id, n.bans, {}});
        }
        for (auto [src, dst] : g.edges) {
            // dst interacted with src, so src is dst's partner.
            auto& list = partners[g.nodes[dst].id];
            const std::string& pid = g.nodes[src].id;
            if (std::find(list.begin(), list.end(), pid) == list.end()) list.push_back(pid);
        }
    }

    // Thread tweets first so replies and retweets have referents.
    std::int64_t next_id = 1;
    std::unordered_map<std::string, std::int64_t> thread_of;
    for (auto& u : s.users) {
        std::int64_t tid = next_id++;
        thread_of.emplace(u.id, tid);
        u.tweets.push_back(SimTweet{tid, u.id, TweetKind::thread, std::nullopt, epoch + 1});
    }
    for (auto& u : s.users) {
        auto& my = partners[u.id];
        std::int64_t when = epoch + 2;
        bool have_reply = false, have_retweet = false;
        for (std::size_t i = 0; i < my.size(); ++i) {
            TweetKind kind = (i % 2 == 0) ? TweetKind::reply : TweetKind::retweet;
            (kind == TweetKind::reply ? have_reply : have_retweet) = true;
            u.tweets.push_back(SimTweet{next_id++, u.id, kind, thread_of[my[i]], when++});
        }
        // Every user carries all three kinds; isolated users reference
        // their own thread (sources skip self-references).
        std::int64_t fallback = my.empty() ? thread_of[u.id] : thread_of[my[0]];
        if (!have_reply)
            u.tweets.push_back(SimTweet{next_id++, u.id, TweetKind::reply, fallback, when++});
        if (!have_retweet)
            u.tweets.push_back(SimTweet{next_id++, u.id, TweetKind::retweet, fallback, when++});
        std::reverse(u.tweets.begin(), u.tweets.end());  // newest first
    }
    s.reindex();
    return s;
}

namespace {

json tweet_to_json(const SimTweet& t) {
    json j{{"id", t.id}, {"kind", tweet_kind_name(t.kind)}, {"posted", t.posted}};
    if (t.ref) j["ref"] = *t.ref;
    return j;
}

SimTweet tweet_from_json(const json& j, const std::string& author) {
    SimTweet t;
    t.id = j.at("id").get<std::int64_t>();
    t.author = author;
    auto kind = tweet_kind_from(j.value("kind", std::string{"thread"}));
    if (!kind) throw IngestError("unknown tweet kind in scenario");
    t.kind = *kind;
    if (j.contains("ref")) t.ref = j["ref"].get<std::int64_t>();
    t.posted = j.value("posted", std::int64_t{0});
    return t;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

void save_scenario(const PopulationDataset& d, const Scenario& s, const std::string& path) {
    std::unordered_map<std::string, const SimUser*> users;
    for (const auto& u : s.users) users.emplace(u.id, &u);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot open " + path + " for writing");
    json header{{"format_version", kDatasetFormatVersion},
                {"population", d.population},
                {"crawl_campaign", d.crawl_campaign},
                {"created", d.created},
                {"scenario", true}};
    out << header.dump() << '\n';
    for (const auto& g : d.graphs) {
        json nodes = json::array();
        for (const auto& n : g.nodes) {
            json nj{{"id", n.id},
                    {"bans",
                     {{"typeahead", n.bans.typeahead},
                      {"search", n.bans.search},
                      {"ghost", n.bans.ghost}}}};
            auto it = users.find(n.id);
            if (it != users.end()) {
                json tweets = json::array();
                for (const auto& t : it->second->tweets) tweets.push_back(tweet_to_json(t));
                nj["tweets"] = std::move(tweets);
            }
            nodes.push_back(std::move(nj));
        }
        json edges = json::array();
        for (auto [src, dst] : g.edges)
            edges.push_back(json::array({g.nodes[src].id, g.nodes[dst].id}));
        out << json{{"landmark", g.landmark},
                    {"crawl_time", g.crawl_time},
                    {"nodes", std::move(nodes)},
                    {"edges", std::move(edges)}}
                   .dump()
            << '\n';
    }
}

Scenario load_scenario(const std::string& path) {
    Scenario s;
    std::unordered_set<std::string> seen;
    for_each_line(path, [&](const std::string& line, std::size_t lineno) {
        if (lineno == 1 || line.empty()) return;  // header
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw IngestError(path + " line " + std::to_string(lineno) + ": bad JSON");
        if (!j.contains("nodes")) return;
        for (const auto& nj : j["nodes"]) {
            std::string id = nj.at("id").get<std::string>();
            if (!seen.insert(id).second) continue;
            SimUser u;
            u.id = id;
            u.screen_name = nj.value("screen_name", id);
            if (nj.contains("bans")) {
                const auto& bj = nj["bans"];
                u.bans.typeahead = bj.value("typeahead", false);
                u.bans.search = bj.value("search", false);
                u.bans.ghost = bj.value("ghost", false);
            }
            if (nj.contains("tweets"))
                for (const auto& tj : nj["tweets"]) u.tweets.push_back(tweet_from_json(tj, id));
            s.users.push_back(std::move(u));
        }
    });
    s.reindex();
    return s;
}

struct MockServer::Impl {
    Scenario scenario;
    httplib::Server server;
    std::thread worker;

    explicit Impl(Scenario s) : scenario(std::move(s)) {
        scenario.reindex();
        wire();
    }

    void wire() {
        server.Get("/typeahead", [this](const httplib::Request& req, httplib::Response& res) {
            std::string prefix = lower(req.get_param_value("q"));
            std::vector<std::string> names;
            for (const auto& u : scenario.users) {
                if (u.bans.typeahead) continue;  // suggestion-banned users never surface
                if (lower(u.screen_name).starts_with(prefix)) names.push_back(u.screen_name);
            }
            std::sort(names.begin(), names.end());
            if (names.size() > 10) names.resize(10);
            res.set_content(json{{"suggestions", names}}.dump(), "application/json");
        });

        server.Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
            std::string query = lower(req.get_param_value("q"));
            std::vector<std::string> names;
            for (const auto& u : scenario.users) {
                if (u.bans.search) continue;  // search-banned users never surface
                if (lower(u.screen_name) == query) names.push_back(u.screen_name);
            }
            std::sort(names.begin(), names.end());
            res.set_content(json{{"users", names}}.dump(), "application/json");
        });

        server.Get(R"(/user/([^/]+)/timeline)",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       const SimUser* u = scenario.by_name(req.matches[1]);
                       if (u == nullptr) {
                           res.status = 404;
                           res.set_content(json{{"error", "unknown user"}}.dump(),
                                           "application/json");
                           return;
                       }
                       std::size_t limit = u->tweets.size();
                       if (req.has_param("n"))
                           limit = std::stoull(req.get_param_value("n"));
                       std::int64_t since = 0;
                       if (req.has_param("since"))
                           since = std::stoll(req.get_param_value("since"));
                       json tweets = json::array();
                       for (const auto& t : u->tweets) {
                           if (tweets.size() >= limit) break;
                           if (t.posted < since) continue;
                           json tj = tweet_to_json(t);
                           tj["status"] = u->bans.ghost ? "unavailable" : "ok";
                           tweets.push_back(std::move(tj));
                       }
                       res.set_content(json{{"tweets", std::move(tweets)}}.dump(),
                                       "application/json");
                   });

        server.Get(R"(/tweet/(\d+))", [this](const httplib::Request& req,
                                             httplib::Response& res) {
            const SimTweet* t = scenario.by_tweet_id(std::stoll(req.matches[1]));
            if (t == nullptr) {
                res.status = 404;
                res.set_content(json{{"error", "unknown tweet"}}.dump(), "application/json");
                return;
            }
            const SimUser* author = scenario.by_name(t->author);
            bool ghost = author != nullptr && author->bans.ghost;
            res.set_content(json{{"status", ghost ? "unavailable" : "ok"},
                                 {"author", t->author}}
                                .dump(),
                            "application/json");
        });
    }
};

MockServer::MockServer(Scenario scenario) : impl_(std::make_unique<Impl>(std::move(scenario))) {}

MockServer::~MockServer() { stop(); }

int MockServer::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) throw std::runtime_error("mock server failed to bind on " + host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        throw std::runtime_error("mock server failed to bind " + host + ":" +
                                 std::to_string(port));
    }
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

bool MockServer::serve(const std::string& host, int port) {
    return impl_->server.listen(host, port);
}

void MockServer::stop() {
    if (impl_ == nullptr) return;
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace banscope
