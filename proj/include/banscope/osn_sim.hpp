#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "banscope/graph.hpp"

namespace banscope {

enum class TweetKind { thread, reply, retweet };

const char* tweet_kind_name(TweetKind k);
std::optional<TweetKind> tweet_kind_from(const std::string& name);

struct SimTweet {
    std::int64_t id = 0;
    std::string author;                // user id
    TweetKind kind = TweetKind::thread;
    std::optional<std::int64_t> ref;   // referent tweet for replies/retweets
    std::int64_t posted = 0;
};

struct SimUser {
    std::string id;
    std::string screen_name;
    BanProfile bans;
    std::vector<SimTweet> tweets;  // newest first
};

struct Scenario {
    std::vector<SimUser> users;

    const SimUser* by_name(const std::string& screen_name) const;
    const SimTweet* by_tweet_id(std::int64_t id) const;
    void reindex();

private:
    std::unordered_map<std::string, std::size_t> name_index_;
    std::unordered_map<std::int64_t, std::pair<std::size_t, std::size_t>> tweet_index_;
};

/// Turns every unique node of a dataset into a SimUser carrying its ban
/// profile and synthetic tweets of all three kinds. Replies/retweets
/// reference the thread tweets of the node's interaction partners
/// (users with no partners self-reference). All tweets are stamped
/// newer than `epoch`.
Scenario plant_scenario(const PopulationDataset& d, std::int64_t epoch = 1577836800 /* 2020 */);

/// Scenario files are the dataset JSONL with a per-node "tweets" array.
void save_scenario(const PopulationDataset& d, const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

/// Blocking HTTP mock of the OSN surface the ban tests probe:
///   GET /typeahead?q=PREFIX            -> {"suggestions": [...]}
///   GET /search?q=NAME                 -> {"users": [...]}
///   GET /user/NAME/timeline?n=K&since=TS -> {"tweets": [{id,kind,status,...}]}
///   GET /tweet/ID                      -> {"status", "author"}
/// Responses are deterministic functions of (scenario, query); no
/// banned behavior ever appears without the corresponding planted flag.
class MockServer {
public:
    explicit MockServer(Scenario scenario);
    ~MockServer();
    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    /// Binds and serves on a background thread; port 0 picks a free
    /// port. Returns the bound port.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    /// Serves on the calling thread (CLI mode). Returns on stop().
    bool serve(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace banscope
