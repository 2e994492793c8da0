#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "banscope/graph.hpp"

namespace banscope {

inline constexpr int kDatasetFormatVersion = 1;

class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads a dataset from a JSONL file: line 1 is the header object, every
/// following line one complete ego-graph. "-" reads standard input;
/// gzip-compressed files are detected by content, whatever the extension.
/// Throws IngestError with a line number on parse failures and with the
/// offending landmark on invariant violations.
PopulationDataset load_dataset(const std::string& path);
PopulationDataset load_dataset_stream(std::istream& in, const std::string& origin = "<stream>");

/// Writes the JSONL form; a ".gz" suffix selects gzip compression.
void save_dataset(const PopulationDataset& d, const std::string& path);
void save_dataset_stream(const PopulationDataset& d, std::ostream& out);

/// Invariant check. Violations are data, not faults: returns one message
/// per problem, empty when the dataset is clean.
std::vector<std::string> validate_dataset(const PopulationDataset& d);

struct FilterResult {
    PopulationDataset dataset;
    std::size_t removed = 0;
};

/// Keeps only graphs with at least `min_nodes` nodes.
FilterResult filter_suitable(const PopulationDataset& d, std::size_t min_nodes = 2);

/// The canonical profile-feature schema (18 names). Loading maps known
/// aliases onto these; unknown names pass through untouched.
const std::vector<std::string>& canonical_feature_names();
std::string canonical_feature_name(const std::string& raw);

/// Streams the lines of a plain or gzip-compressed file; "-" reads
/// standard input. fn receives (line, 1-based line number).
void for_each_line(const std::string& path,
                   const std::function<void(const std::string&, std::size_t)>& fn);

}  // namespace banscope
