#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "banscope/graph.hpp"

namespace banscope {

enum class ProbeStatus {
    ok,               // test ran, verdict is meaningful
    transport_error,  // endpoint unreachable or malformed reply; no verdict
    inactive,         // no tweets in the probed window; ghost test undecidable
};

const char* probe_status_name(ProbeStatus s);

/// Machine-checkable trace of one probe: the query sent, a stable hash
/// of the raw response, and the verdict it supports.
struct BanEvidence {
    std::string test;
    std::string request;
    std::string response_digest;
    bool verdict = false;
};

struct TestOutcome {
    ProbeStatus status = ProbeStatus::transport_error;
    bool verdict = false;
    std::vector<BanEvidence> evidence;
    std::string error;
};

struct DetectReport {
    std::optional<bool> typeahead;
    std::optional<bool> search;
    std::optional<bool> ghost;
    bool ghost_inactive = false;
    bool complete = false;  // all three tests produced verdicts
    std::vector<BanEvidence> evidence;
    std::vector<std::string> errors;

    /// Verdicts folded into a profile; missing verdicts count as false.
    BanProfile profile() const;
    bool banned() const { return profile().banned(); }
};

struct DetectorOptions {
    int ghost_sample = 33;        // most recent tweets probed by the ghost test
    bool ghost_full_scan = false; // probe the whole window instead
    int timeout_ms = 5000;
};

/// FNV-1a 64 over a response body; evidence digests use it.
std::string response_digest(const std::string& body);

/// Client for the three visibility tests against anything that speaks
/// the mock-OSN HTTP surface. Transport failures are reported as such
/// and never count as verdicts.
class Detector {
public:
    explicit Detector(std::string base_url, DetectorOptions options = {});
    ~Detector();
    Detector(Detector&&) noexcept;
    Detector& operator=(Detector&&) noexcept;

    /// True when the user is absent from the suggestions for its own
    /// full screen name.
    TestOutcome test_typeahead(const std::string& screen_name);

    /// True when an exact screen-name search omits the user.
    TestOutcome test_search(const std::string& screen_name);

    /// True when a sampled tweet resolves unavailable while the account
    /// itself resolves. Users with no tweets since `since` are inactive.
    TestOutcome test_ghost(const std::string& screen_name, std::int64_t since);

    /// All three tests; banned = at least one verdict true.
    DetectReport detect(const std::string& screen_name, std::int64_t since);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace banscope
