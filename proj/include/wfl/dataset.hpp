#pragma once

// Desk-scale datasets: seeded Gaussian blobs and a numeric CSV loader,
// with an 80/20 train/test split and IID or label-sorted client
// partitions.

#include <cstdint>
#include <string>
#include <vector>

namespace wfl::data {

struct Dataset {
    int feature_dim = 0;
    int classes = 0;
    std::vector<double> features;  // row-major, one row per sample
    std::vector<int> labels;
    std::vector<int> train_idx;
    std::vector<int> test_idx;

    std::int64_t size() const { return static_cast<std::int64_t>(labels.size()); }
    const double* row(int i) const {
        return features.data() + static_cast<std::size_t>(i) * feature_dim;
    }
};

struct BlobsParams {
    int classes = 2;
    int dim = 20;
    int per_class = 600;
    double spread = 1.0;  // within-cluster standard deviation
    std::uint64_t seed = 0;
};

// Cluster centers drawn uniformly in [-1, 1]^dim, samples N(center,
// spread^2 I); deterministic in the seed, including the 80/20 split.
Dataset make_blobs(const BlobsParams& params);

// Numeric features with an integer label in the last column. Malformed
// rows are reported with their line numbers.
Dataset load_csv(const std::string& path, std::uint64_t seed);

enum class Partition { Iid, LabelSorted };

// Client shards over the training split. IID deals a seeded shuffle
// round-robin; LabelSorted sorts by label, cuts 2K contiguous blocks, and
// deals two blocks per client (so each client sees at most two label
// groups).
std::vector<std::vector<int>> partition_clients(const Dataset& data,
                                                int clients, Partition kind,
                                                std::uint64_t seed);

}  // namespace wfl::data
