#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "banscope/graph_stats.hpp"
#include "banscope/ingest.hpp"
#include "banscope/rng.hpp"
#include "banscope/synth.hpp"
#include "oracles.hpp"

using namespace banscope;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("banscope_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

bool same_structure(const PopulationDataset& a, const PopulationDataset& b) {
    if (a.population != b.population || a.crawl_campaign != b.crawl_campaign ||
        a.created != b.created || a.graphs.size() != b.graphs.size())
        return false;
    for (std::size_t i = 0; i < a.graphs.size(); ++i) {
        const EgoGraph& x = a.graphs[i];
        const EgoGraph& y = b.graphs[i];
        if (x.landmark != y.landmark || x.crawl_time != y.crawl_time ||
            x.node_count() != y.node_count() || x.edges.size() != y.edges.size())
            return false;
        for (std::size_t v = 0; v < x.nodes.size(); ++v) {
            if (x.nodes[v].id != y.nodes[v].id) return false;
            if (!(x.nodes[v].bans == y.nodes[v].bans)) return false;
            if (x.nodes[v].features != y.nodes[v].features) return false;
        }
        for (std::size_t e = 0; e < x.edges.size(); ++e)
            if (x.edges[e] != y.edges[e]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("load a minimal two-node dataset") {
    TempFile f("mini.jsonl");
    write_file(f.path,
               R"({"format_version":1,"population":"RANDOM","crawl_campaign":"c1","created":7}
{"landmark":"alice","nodes":[{"id":"alice","bans":{"typeahead":false,"search":false,"ghost":false}},{"id":"bob","bans":{"typeahead":true,"search":false,"ghost":false}}],"edges":[["alice","bob"]]}
)");
    PopulationDataset d = load_dataset(f.path);
    CHECK(d.population == "RANDOM");
    REQUIRE(d.graphs.size() == 1);
    CHECK(d.graphs[0].node_count() == 2);
    CHECK(d.graphs[0].edges.size() == 1);
    CHECK(d.graphs[0].nodes[1].bans.typeahead);
    CHECK(validate_dataset(d).empty());
}

TEST_CASE("edge referencing an unknown node names the landmark") {
    TempFile f("badedge.jsonl");
    write_file(f.path,
               R"({"format_version":1,"population":"T"}
{"landmark":"alice","nodes":[{"id":"alice"}],"edges":[["alice","ghostly"]]}
)");
    CHECK_THROWS_WITH_AS(load_dataset(f.path),
                         doctest::Contains("graph alice"), IngestError);
    try {
        load_dataset(f.path);
    } catch (const IngestError& e) {
        CHECK(std::string(e.what()).find("ghostly") != std::string::npos);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("parse errors carry the line number") {
    TempFile f("badjson.jsonl");
    write_file(f.path, "{\"format_version\":1}\nnot json at all\n");
    CHECK_THROWS_WITH_AS(load_dataset(f.path), doctest::Contains("line 2"), IngestError);
}

TEST_CASE("wrong format version is rejected") {
    TempFile f("badver.jsonl");
    write_file(f.path, "{\"format_version\":9}\n");
    CHECK_THROWS_AS(load_dataset(f.path), IngestError);
}

TEST_CASE("save-load round trip is structurally identical on a big synthetic dataset") {
    SynthOptions opt;
    opt.graphs = 1000;
    opt.target_avg_degree = 5.0;
    opt.seed = 31;
    PopulationDataset d = make_topology_population(opt);
    // Sprinkle bans and features so every field shape round-trips.
    Rng rng(5);
    for (auto& g : d.graphs) {
        for (auto& n : g.nodes) {
            n.bans.typeahead = next_bernoulli(rng, 0.05);
            n.bans.ghost = next_bernoulli(rng, 0.02);
            if (next_bernoulli(rng, 0.2)) {
                FeatureVector fv;
                fv["followers_count"] = static_cast<double>(next_below(rng, 10000));
                fv["verified"] = next_bernoulli(rng, 0.1) ? 1.0 : 0.0;
                n.features = std::move(fv);
            }
        }
    }
    d.population = "SYNTH";
    d.crawl_campaign = "round trip";
    d.created = 1234;

    TempFile f("roundtrip.jsonl");
    save_dataset(d, f.path);
    PopulationDataset back = load_dataset(f.path);
    CHECK(same_structure(d, back));
}

TEST_CASE("gzip round trip via extension") {
    SynthOptions opt;
    opt.graphs = 20;
    opt.seed = 9;
    PopulationDataset d = make_topology_population(opt);
    TempFile f("zipped.jsonl.gz");
    save_dataset(d, f.path);
    // The file really is gzip: magic bytes 1f 8b.
    std::ifstream raw(f.path, std::ios::binary);
    unsigned char magic[2] = {0, 0};
    raw.read(reinterpret_cast<char*>(magic), 2);
    CHECK(magic[0] == 0x1f);
    CHECK(magic[1] == 0x8b);
    PopulationDataset back = load_dataset(f.path);
    CHECK(same_structure(d, back));
}

TEST_CASE("stream loading (stdin path equivalent)") {
    std::stringstream ss;
    ss << R"({"format_version":1,"population":"P"})" << "\n"
       << R"({"landmark":"a","nodes":[{"id":"a"}],"edges":[]})" << "\n";
    PopulationDataset d = load_dataset_stream(ss, "<test>");
    CHECK(d.graphs.size() == 1);
}

TEST_CASE("validate_dataset flags the named violations") {
    PopulationDataset d{"T", "", 0, {}};
    SUBCASE("clean dataset") {
        d.graphs.push_back(oracles::make_graph(3, {{0, 1}, {1, 2}}));
        CHECK(validate_dataset(d).empty());
    }
    SUBCASE("self-loop names the node") {
        EgoGraph g = oracles::make_graph(2, {{0, 1}});
        g.edges.emplace_back(1, 1);  // bypass add_edge
        d.graphs.push_back(g);
        auto v = validate_dataset(d);
        REQUIRE(v.size() == 1);
        CHECK(v[0].find("self-loop") != std::string::npos);
        CHECK(v[0].find("n1") != std::string::npos);
    }
    SUBCASE("duplicate landmark across graphs") {
        d.graphs.push_back(oracles::make_graph(2, {{0, 1}}));
        d.graphs.push_back(oracles::make_graph(2, {{0, 1}}));
        auto v = validate_dataset(d);
        REQUIRE(v.size() == 1);
        CHECK(v[0].find("duplicate landmark") != std::string::npos);
    }
    SUBCASE("landmark must be present") {
        EgoGraph g = oracles::make_graph(2, {});
        g.landmark = "absent";
        d.graphs.push_back(g);
        CHECK(validate_dataset(d).size() == 1);
    }
    SUBCASE("negative count feature") {
        EgoGraph g = oracles::make_graph(1, {});
        FeatureVector fv;
        fv["media_count"] = -3.0;
        g.nodes[0].features = fv;
        d.graphs.push_back(g);
        CHECK(validate_dataset(d).size() == 1);
    }
}

TEST_CASE("filter_suitable") {
    PopulationDataset d{"T", "", 0, {}};
    d.graphs.push_back(oracles::make_graph(1, {}));
    EgoGraph two = oracles::make_graph(2, {{0, 1}});
    two.landmark = "n0";
    two.nodes[1].id = "other";
    two.reindex();
    d.graphs.push_back(two);

    SUBCASE("default keeps graphs with at least two nodes") {
        FilterResult r = filter_suitable(d);
        CHECK(r.removed == 1);
        REQUIRE(r.dataset.graphs.size() == 1);
        CHECK(r.dataset.graphs[0].node_count() == 2);
    }
    SUBCASE("min_nodes=1 is the identity") {
        FilterResult r = filter_suitable(d, 1);
        CHECK(r.removed == 0);
        CHECK(r.dataset.graphs.size() == 2);
    }
    SUBCASE("idempotent") {
        FilterResult once = filter_suitable(d);
        FilterResult twice = filter_suitable(once.dataset);
        CHECK(twice.removed == 0);
        CHECK(twice.dataset.graphs.size() == once.dataset.graphs.size());
    }
    SUBCASE("dataset of singletons filters to nothing") {
        PopulationDataset singles{"S", "", 0, {}};
        singles.graphs.push_back(oracles::make_graph(1, {}));
        FilterResult r = filter_suitable(singles);
        CHECK(r.dataset.graphs.empty());
        CHECK(r.removed == 1);
    }
}

TEST_CASE("canonical feature schema") {
    CHECK(canonical_feature_names().size() == 18);
    CHECK(canonical_feature_name("favourites_count") == "favorite_count");
    CHECK(canonical_feature_name("media_count") == "media_count");
    CHECK(canonical_feature_name("something_custom") == "something_custom");
}
