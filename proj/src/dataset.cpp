#include "wfl/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "wfl/rng.hpp"

namespace wfl::data {

namespace {

void shuffle_indices(std::vector<int>& idx, std::uint64_t seed,
                     std::uint64_t stream) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        std::uint64_t j = draw_below(seed, stream, i, i);
        std::swap(idx[i - 1], idx[j]);
    }
}

void split_train_test(Dataset& d, std::uint64_t seed) {
    std::vector<int> idx(static_cast<std::size_t>(d.size()));
    std::iota(idx.begin(), idx.end(), 0);
    shuffle_indices(idx, seed, make_stream(StreamPurpose::DatasetShuffle));
    std::size_t train_count = idx.size() * 8 / 10;
    d.train_idx.assign(idx.begin(), idx.begin() + train_count);
    d.test_idx.assign(idx.begin() + train_count, idx.end());
}

}  // namespace

Dataset make_blobs(const BlobsParams& p) {
    if (p.classes < 2 || p.dim < 1 || p.per_class < 2)
        throw std::invalid_argument("make_blobs: bad parameters");
    Dataset d;
    d.feature_dim = p.dim;
    d.classes = p.classes;

    std::vector<double> centers(static_cast<std::size_t>(p.classes) * p.dim);
    for (int c = 0; c < p.classes; ++c)
        for (int j = 0; j < p.dim; ++j) {
            double u = draw_unit(p.seed,
                                 make_stream(StreamPurpose::DatasetCenters,
                                             static_cast<std::uint64_t>(c)),
                                 static_cast<std::uint64_t>(j));
            centers[static_cast<std::size_t>(c) * p.dim + j] = 2.0 * u - 1.0;
        }

    for (int c = 0; c < p.classes; ++c) {
        const std::uint64_t stream = make_stream(
            StreamPurpose::DatasetSamples, static_cast<std::uint64_t>(c));
        for (int s = 0; s < p.per_class; ++s) {
            for (int j = 0; j < p.dim; ++j) {
                double z = draw_normal(
                    p.seed, stream,
                    static_cast<std::uint64_t>(s) * p.dim + j);
                d.features.push_back(
                    centers[static_cast<std::size_t>(c) * p.dim + j] +
                    p.spread * z);
            }
            d.labels.push_back(c);
        }
    }
    split_train_test(d, p.seed);
    return d;
}

Dataset load_csv(const std::string& path, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);
    Dataset d;
    std::string line;
    int line_no = 0;
    int max_label = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string cell;
        bool bad = false;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                double v = std::stod(cell, &pos);
                while (pos < cell.size() && std::isspace(cell[pos])) ++pos;
                if (pos != cell.size()) bad = true;
                cells.push_back(v);
            } catch (const std::exception&) {
                bad = true;
                break;
            }
        }
        if (bad || cells.size() < 2)
            throw std::runtime_error("load_csv: malformed row at line " +
                                     std::to_string(line_no));
        int label = static_cast<int>(cells.back());
        if (label < 0 || label != cells.back())
            throw std::runtime_error(
                "load_csv: label must be a non-negative integer at line " +
                std::to_string(line_no));
        cells.pop_back();
        if (d.feature_dim == 0)
            d.feature_dim = static_cast<int>(cells.size());
        else if (static_cast<int>(cells.size()) != d.feature_dim)
            throw std::runtime_error("load_csv: inconsistent column count at line " +
                                     std::to_string(line_no));
        d.features.insert(d.features.end(), cells.begin(), cells.end());
        d.labels.push_back(label);
        max_label = std::max(max_label, label);
    }
    if (d.labels.empty()) throw std::runtime_error("load_csv: empty dataset");
    d.classes = max_label + 1;
    if (d.classes < 2) throw std::runtime_error("load_csv: need at least 2 classes");
    split_train_test(d, seed);
    return d;
}

std::vector<std::vector<int>> partition_clients(const Dataset& d, int clients,
                                                Partition kind,
                                                std::uint64_t seed) {
    if (clients < 1) throw std::invalid_argument("partition_clients: clients >= 1");
    if (static_cast<int>(d.train_idx.size()) < 2 * clients)
        throw std::invalid_argument("partition_clients: too few training samples");
    std::vector<std::vector<int>> shards(static_cast<std::size_t>(clients));

    if (kind == Partition::Iid) {
        std::vector<int> idx = d.train_idx;
        shuffle_indices(idx, seed,
                        make_stream(StreamPurpose::PartitionShuffle, 0));
        for (std::size_t i = 0; i < idx.size(); ++i)
            shards[i % clients].push_back(idx[i]);
        return shards;
    }

    // Label-sorted: stable sort keeps determinism, 2K blocks, a seeded
    // permutation deals two blocks to each client.
    std::vector<int> idx = d.train_idx;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return d.labels[static_cast<std::size_t>(a)] <
               d.labels[static_cast<std::size_t>(b)];
    });
    const int blocks = 2 * clients;
    std::vector<int> block_order(static_cast<std::size_t>(blocks));
    std::iota(block_order.begin(), block_order.end(), 0);
    shuffle_indices(block_order, seed,
                    make_stream(StreamPurpose::PartitionShuffle, 1));
    const std::size_t total = idx.size();
    for (int c = 0; c < clients; ++c) {
        for (int t = 0; t < 2; ++t) {
            int b = block_order[static_cast<std::size_t>(2 * c + t)];
            std::size_t lo = total * b / blocks;
            std::size_t hi = total * (b + 1) / blocks;
            for (std::size_t i = lo; i < hi; ++i)
                shards[static_cast<std::size_t>(c)].push_back(idx[i]);
        }
        if (shards[static_cast<std::size_t>(c)].empty())
            throw std::runtime_error("partition_clients: empty shard");
    }
    return shards;
}

}  // namespace wfl::data
