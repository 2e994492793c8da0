#include "banscope/detector.hpp"

#include <algorithm>
#include <cctype>

#include "httplib.h"
#include "json.hpp"

namespace banscope {

using nlohmann::json;

const char* probe_status_name(ProbeStatus s) {
    switch (s) {
        case ProbeStatus::ok: return "ok";
        case ProbeStatus::transport_error: return "transport_error";
        case ProbeStatus::inactive: return "inactive";
    }
    return "transport_error";
}

BanProfile DetectReport::profile() const {
    return BanProfile{typeahead.value_or(false), search.value_or(false), ghost.value_or(false)};
}

std::string response_digest(const std::string& body) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : body) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

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

bool contains_name(const json& arr, const std::string& name) {
    std::string needle = lower(name);
    for (const auto& v : arr)
        if (v.is_string() && lower(v.get<std::string>()) == needle) return true;
    return false;
}

}  // namespace

struct Detector::Impl {
    std::string base_url;
    DetectorOptions options;
    httplib::Client client;

    Impl(std::string url, DetectorOptions opts)
        : base_url(std::move(url)), options(opts), client(base_url) {
        client.set_connection_timeout(0, options.timeout_ms * 1000);
        client.set_read_timeout(0, options.timeout_ms * 1000);
        client.set_keep_alive(true);
    }

    struct Response {
        bool ok = false;
        int status = 0;
        std::string body;
    };

    Response get(const std::string& path) {
        auto res = client.Get(path);
        if (!res) return {};
        return {true, res->status, res->body};
    }
};

Detector::Detector(std::string base_url, DetectorOptions options)
    : impl_(std::make_unique<Impl>(std::move(base_url), options)) {}

Detector::~Detector() = default;
Detector::Detector(Detector&&) noexcept = default;
Detector& Detector::operator=(Detector&&) noexcept = default;

TestOutcome Detector::test_typeahead(const std::string& screen_name) {
    TestOutcome out;
    std::string request = "/typeahead?q=" + url_encode(screen_name);
    auto res = impl_->get(request);
    if (!res.ok || res.status != 200) {
        out.error = "typeahead probe failed: " + (res.ok ? "http " + std::to_string(res.status)
                                                         : "unreachable endpoint");
        return out;
    }
    json j = json::parse(res.body, nullptr, false);
    if (!j.is_object() || !j.contains("suggestions")) {
        out.error = "typeahead probe: malformed response";
        return out;
    }
    out.status = ProbeStatus::ok;
    out.verdict = !contains_name(j["suggestions"], screen_name);
    out.evidence.push_back(
        BanEvidence{"typeahead", request, response_digest(res.body), out.verdict});
    return out;
}

TestOutcome Detector::test_search(const std::string& screen_name) {
    TestOutcome out;
    std::string request = "/search?q=" + url_encode(screen_name);
    auto res = impl_->get(request);
    if (!res.ok || res.status != 200) {
        out.error = "search probe failed: " + (res.ok ? "http " + std::to_string(res.status)
                                                      : "unreachable endpoint");
        return out;
    }
    json j = json::parse(res.body, nullptr, false);
    if (!j.is_object() || !j.contains("users")) {
        out.error = "search probe: malformed response";
        return out;
    }
    out.status = ProbeStatus::ok;
    out.verdict = !contains_name(j["users"], screen_name);
    out.evidence.push_back(BanEvidence{"search", request, response_digest(res.body), out.verdict});
    return out;
}

TestOutcome Detector::test_ghost(const std::string& screen_name, std::int64_t since) {
    TestOutcome out;
    std::string request = "/user/" + url_encode(screen_name) + "/timeline?since=" +
                          std::to_string(since);
    if (!impl_->options.ghost_full_scan)
        request += "&n=" + std::to_string(impl_->options.ghost_sample);
    auto res = impl_->get(request);
    if (!res.ok || res.status != 200) {
        out.error = "timeline probe failed: " + (res.ok ? "http " + std::to_string(res.status)
                                                        : "unreachable endpoint");
        return out;
    }
    json j = json::parse(res.body, nullptr, false);
    if (!j.is_object() || !j.contains("tweets") || !j["tweets"].is_array()) {
        out.error = "timeline probe: malformed response";
        return out;
    }
    if (j["tweets"].empty()) {
        out.status = ProbeStatus::inactive;
        out.evidence.push_back(BanEvidence{"ghost", request, response_digest(res.body), false});
        return out;
    }
    // The timeline resolved, so the account exists; the verdict needs a
    // tweet that resolves unavailable on direct lookup.
    for (const auto& tj : j["tweets"]) {
        if (!tj.contains("id")) continue;
        std::string tweet_req = "/tweet/" + std::to_string(tj["id"].get<std::int64_t>());
        auto tres = impl_->get(tweet_req);
        if (!tres.ok || tres.status != 200) {
            out.error = "tweet probe failed on " + tweet_req;
            out.evidence.clear();
            return out;
        }
        json t = json::parse(tres.body, nullptr, false);
        bool unavailable = t.is_object() && t.value("status", std::string{}) == "unavailable";
        if (unavailable) {
            out.status = ProbeStatus::ok;
            out.verdict = true;
            out.evidence.push_back(
                BanEvidence{"ghost", tweet_req, response_digest(tres.body), true});
            return out;
        }
    }
    out.status = ProbeStatus::ok;
    out.verdict = false;
    out.evidence.push_back(BanEvidence{"ghost", request, response_digest(res.body), false});
    return out;
}

DetectReport Detector::detect(const std::string& screen_name, std::int64_t since) {
    DetectReport report;
    auto fold = [&](const char* name, const TestOutcome& o, std::optional<bool>& verdict) {
        for (const auto& e : o.evidence) report.evidence.push_back(e);
        if (o.status == ProbeStatus::ok) {
            verdict = o.verdict;
        } else if (o.status == ProbeStatus::inactive) {
            report.ghost_inactive = true;
        } else {
            report.errors.push_back(std::string(name) + ": " + o.error);
        }
    };
    fold("typeahead", test_typeahead(screen_name), report.typeahead);
    fold("search", test_search(screen_name), report.search);
    fold("ghost", test_ghost(screen_name, since), report.ghost);
    report.complete =
        report.typeahead.has_value() && report.search.has_value() && report.ghost.has_value();
    return report;
}

}  // namespace banscope
