#include "banscope/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace banscope {

using nlohmann::json;

namespace {

// Line source over either an istream or a gzFile. gzread handles plain
// files transparently, which doubles as content-based gzip sniffing.
class LineSource {
public:
    explicit LineSource(std::istream& in) : stream_(&in) {}
    explicit LineSource(const std::string& path) {
        file_ = gzopen(path.c_str(), "rb");
        if (file_ == nullptr) throw IngestError("cannot open " + path);
    }
    ~LineSource() {
        if (file_ != nullptr) gzclose(file_);
    }
    LineSource(const LineSource&) = delete;
    LineSource& operator=(const LineSource&) = delete;

    bool next(std::string& line) {
        if (stream_ != nullptr) return static_cast<bool>(std::getline(*stream_, line));
        line.clear();
        char buf[1 << 16];
        for (;;) {
            if (gzgets(file_, buf, sizeof buf) == nullptr)
                return !line.empty();
            line += buf;
            if (!line.empty() && line.back() == '\n') {
                line.pop_back();
                return true;
            }
        }
    }

private:
    std::istream* stream_ = nullptr;
    gzFile file_ = nullptr;
};

json parse_line(const std::string& line, std::size_t lineno, const std::string& origin) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw IngestError(origin + " line " + std::to_string(lineno) + ": " + e.what());
    }
}

BanProfile bans_from_json(const json& j) {
    BanProfile b;
    if (!j.is_object()) return b;
    b.typeahead = j.value("typeahead", false);
    b.search = j.value("search", false);
    b.ghost = j.value("ghost", false);
    return b;
}

json bans_to_json(const BanProfile& b) {
    return json{{"typeahead", b.typeahead}, {"search", b.search}, {"ghost", b.ghost}};
}

EgoGraph graph_from_json(const json& j, std::size_t lineno, const std::string& origin) {
    auto fail = [&](const std::string& msg) -> IngestError {
        std::string landmark = j.contains("landmark") && j["landmark"].is_string()
                                   ? j["landmark"].get<std::string>()
                                   : "<unknown>";
        return IngestError(origin + " line " + std::to_string(lineno) + ", graph " + landmark +
                           ": " + msg);
    };
    if (!j.is_object() || !j.contains("landmark") || !j.contains("nodes"))
        throw fail("graph record needs landmark and nodes");

    EgoGraph g;
    g.landmark = j["landmark"].get<std::string>();
    g.crawl_time = j.value("crawl_time", std::int64_t{0});
    try {
        for (const auto& nj : j["nodes"]) {
            Node node;
            node.id = nj.at("id").get<std::string>();
            if (nj.contains("bans")) node.bans = bans_from_json(nj["bans"]);
            if (nj.contains("features") && nj["features"].is_object()) {
                FeatureVector fv;
                for (const auto& [key, value] : nj["features"].items()) {
                    double v = value.is_boolean() ? (value.get<bool>() ? 1.0 : 0.0)
                                                  : value.get<double>();
                    fv[canonical_feature_name(key)] = v;
                }
                node.features = std::move(fv);
            }
            g.add_node(std::move(node));
        }
    } catch (const std::exception& e) {
        throw fail(e.what());
    }
    if (g.find(g.landmark) < 0) throw fail("landmark not among nodes");

    if (j.contains("edges")) {
        for (const auto& ej : j["edges"]) {
            if (!ej.is_array() || ej.size() != 2) throw fail("edge must be a [src, dst] pair");
            int src = g.find(ej[0].get<std::string>());
            int dst = g.find(ej[1].get<std::string>());
            if (src < 0 || dst < 0)
                throw fail("edge references unknown node " +
                           (src < 0 ? ej[0] : ej[1]).get<std::string>());
            try {
                g.add_edge(src, dst);
            } catch (const std::exception& e) {
                throw fail(e.what());
            }
        }
    }
    return g;
}

json graph_to_json(const EgoGraph& g) {
    json nodes = json::array();
    for (const auto& n : g.nodes) {
        json nj{{"id", n.id}, {"bans", bans_to_json(n.bans)}};
        if (n.features) {
            json fv = json::object();
            for (const auto& [key, value] : *n.features) fv[key] = value;
            nj["features"] = std::move(fv);
        }
        nodes.push_back(std::move(nj));
    }
    json edges = json::array();
    for (auto [src, dst] : g.edges)
        edges.push_back(json::array({g.nodes[src].id, g.nodes[dst].id}));
    return json{{"landmark", g.landmark},
                {"crawl_time", g.crawl_time},
                {"nodes", std::move(nodes)},
                {"edges", std::move(edges)}};
}

PopulationDataset load_from_source(LineSource& src, const std::string& origin) {
    PopulationDataset d;
    std::string line;
    if (!src.next(line)) throw IngestError(origin + ": empty input, header line expected");
    json header = parse_line(line, 1, origin);
    int version = header.value("format_version", -1);
    if (version != kDatasetFormatVersion)
        throw IngestError(origin + " line 1: unsupported format_version " +
                          std::to_string(version));
    d.population = header.value("population", std::string{});
    d.crawl_campaign = header.value("crawl_campaign", std::string{});
    d.created = header.value("created", std::int64_t{0});

    std::size_t lineno = 1;
    while (src.next(line)) {
        ++lineno;
        if (line.empty()) continue;
        d.graphs.push_back(graph_from_json(parse_line(line, lineno, origin), lineno, origin));
    }
    return d;
}

std::string header_line(const PopulationDataset& d) {
    json header{{"format_version", kDatasetFormatVersion},
                {"population", d.population},
                {"crawl_campaign", d.crawl_campaign},
                {"created", d.created}};
    return header.dump();
}

}  // namespace

PopulationDataset load_dataset(const std::string& path) {
    if (path == "-") return load_dataset_stream(std::cin, "<stdin>");
    LineSource src(path);
    return load_from_source(src, path);
}

void for_each_line(const std::string& path,
                   const std::function<void(const std::string&, std::size_t)>& fn) {
    std::string line;
    std::size_t lineno = 0;
    if (path == "-") {
        LineSource src(std::cin);
        while (src.next(line)) fn(line, ++lineno);
        return;
    }
    LineSource src(path);
    while (src.next(line)) fn(line, ++lineno);
}

PopulationDataset load_dataset_stream(std::istream& in, const std::string& origin) {
    LineSource src(in);
    return load_from_source(src, origin);
}

void save_dataset_stream(const PopulationDataset& d, std::ostream& out) {
    out << header_line(d) << '\n';
    for (const auto& g : d.graphs) out << graph_to_json(g).dump() << '\n';
}

void save_dataset(const PopulationDataset& d, const std::string& path) {
    if (path == "-") {
        save_dataset_stream(d, std::cout);
        return;
    }
    if (path.size() > 3 && path.ends_with(".gz")) {
        gzFile f = gzopen(path.c_str(), "wb");
        if (f == nullptr) throw IngestError("cannot open " + path + " for writing");
        auto put = [&](const std::string& s) {
            if (gzwrite(f, s.data(), static_cast<unsigned>(s.size())) !=
                static_cast<int>(s.size())) {
                gzclose(f);
                throw IngestError("short write to " + path);
            }
        };
        put(header_line(d) + "\n");
        for (const auto& g : d.graphs) put(graph_to_json(g).dump() + "\n");
        gzclose(f);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot open " + path + " for writing");
    save_dataset_stream(d, out);
    if (!out) throw IngestError("write failure on " + path);
}

std::vector<std::string> validate_dataset(const PopulationDataset& d) {
    std::vector<std::string> violations;
    std::unordered_set<std::string> landmarks;
    for (const auto& g : d.graphs) {
        const std::string tag = "graph " + g.landmark + ": ";
        if (!landmarks.insert(g.landmark).second)
            violations.push_back("duplicate landmark " + g.landmark + " in dataset");
        if (g.nodes.empty()) {
            violations.push_back(tag + "graph has no nodes");
            continue;
        }
        std::unordered_set<std::string> ids;
        bool landmark_present = false;
        for (const auto& n : g.nodes) {
            if (n.id.empty()) violations.push_back(tag + "empty node id");
            if (!ids.insert(n.id).second) violations.push_back(tag + "duplicate node id " + n.id);
            if (n.id == g.landmark) landmark_present = true;
            if (n.features) {
                for (const auto& [key, value] : *n.features)
                    if (key.ends_with("_count") && value < 0)
                        violations.push_back(tag + "negative count feature " + key + " on node " +
                                             n.id);
            }
        }
        if (!landmark_present) violations.push_back(tag + "landmark not among nodes");
        const int n = static_cast<int>(g.nodes.size());
        for (auto [src, dst] : g.edges) {
            if (src < 0 || src >= n || dst < 0 || dst >= n) {
                violations.push_back(tag + "edge endpoint out of range");
                continue;
            }
            if (src == dst)
                violations.push_back(tag + "self-loop on node " + g.nodes[src].id);
        }
    }
    return violations;
}

FilterResult filter_suitable(const PopulationDataset& d, std::size_t min_nodes) {
    FilterResult result;
    result.dataset.population = d.population;
    result.dataset.crawl_campaign = d.crawl_campaign;
    result.dataset.created = d.created;
    for (const auto& g : d.graphs) {
        if (g.node_count() >= min_nodes)
            result.dataset.graphs.push_back(g);
        else
            ++result.removed;
    }
    return result;
}

const std::vector<std::string>& canonical_feature_names() {
    static const std::vector<std::string> names = {
        "media_count",
        "friends_count",
        "statuses_count",
        "favorite_count",
        "listed_count",
        "normal_followers_count",
        "followers_count",
        "fast_followers_count",
        "possibly_sensitive_editable",
        "possibly_sensitive",
        "protected",
        "verified",
        "geo_enabled",
        "default_profile",
        "default_profile_image",
        "has_custom_timelines",
        "is_translator",
        "profile_use_background_image",
    };
    return names;
}

std::string canonical_feature_name(const std::string& raw) {
    // Aliases seen in public profile dumps; the canonical spelling wins.
    static const std::unordered_map<std::string, std::string> aliases = {
        {"favourites_count", "favorite_count"},
        {"favorites_count", "favorite_count"},
        {"following_count", "friends_count"},
        {"is_protected", "protected"},
        {"is_verified", "verified"},
    };
    auto it = aliases.find(raw);
    return it == aliases.end() ? raw : it->second;
}

}  // namespace banscope
