#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>

#include "wfl/dataset.hpp"
#include "wfl/model.hpp"
#include "wfl/rng.hpp"

using namespace wfl;
using namespace wfl::data;
using namespace wfl::fl;

TEST_CASE("blobs: shape, split, determinism") {
    BlobsParams p;
    p.classes = 3;
    p.dim = 5;
    p.per_class = 50;
    p.spread = 0.4;
    p.seed = 12;
    Dataset a = make_blobs(p);
    CHECK(a.size() == 150);
    CHECK(a.feature_dim == 5);
    CHECK(a.classes == 3);
    CHECK(a.train_idx.size() == 120);
    CHECK(a.test_idx.size() == 30);

    Dataset b = make_blobs(p);
    CHECK(a.features == b.features);
    CHECK(a.train_idx == b.train_idx);

    p.seed = 13;
    Dataset c = make_blobs(p);
    CHECK(a.features != c.features);

    std::set<int> seen(a.train_idx.begin(), a.train_idx.end());
    for (int i : a.test_idx) CHECK(seen.count(i) == 0);
}

TEST_CASE("csv loading and error reporting") {
    const std::string good = "/tmp/wfl_test_good.csv";
    {
        std::ofstream out(good);
        out << "1.5,2.0,0\n0.5,-1.0,1\n2.5,0.25,1\n-1,0,0\n0,1,1\n1,1,0\n"
               "2,2,1\n3,1,0\n1,3,1\n0,0,0\n";
    }
    Dataset d = load_csv(good, 5);
    CHECK(d.size() == 10);
    CHECK(d.feature_dim == 2);
    CHECK(d.classes == 2);

    const std::string bad = "/tmp/wfl_test_bad.csv";
    {
        std::ofstream out(bad);
        out << "1.0,2.0,0\nnot,a,row\n";
    }
    CHECK_THROWS_WITH_AS(load_csv(bad, 1),
                         doctest::Contains("line 2"), std::runtime_error);

    const std::string empty = "/tmp/wfl_test_empty.csv";
    { std::ofstream out(empty); }
    CHECK_THROWS_AS(load_csv(empty, 1), std::runtime_error);
}

TEST_CASE("IID partition spreads samples evenly and disjointly") {
    BlobsParams p;
    p.classes = 2;
    p.dim = 3;
    p.per_class = 100;
    p.seed = 3;
    Dataset d = make_blobs(p);
    auto shards = partition_clients(d, 8, Partition::Iid, 3);
    CHECK(shards.size() == 8);
    std::set<int> all;
    std::size_t total = 0;
    for (const auto& s : shards) {
        CHECK(s.size() >= 19);
        total += s.size();
        for (int i : s) all.insert(i);
    }
    CHECK(total == d.train_idx.size());
    CHECK(all.size() == total);
}

TEST_CASE("label-sorted partition gives each client at most two labels") {
    BlobsParams p;
    p.classes = 4;
    p.dim = 3;
    p.per_class = 80;
    p.seed = 9;
    Dataset d = make_blobs(p);
    auto shards = partition_clients(d, 10, Partition::LabelSorted, 9);
    for (const auto& s : shards) {
        std::set<int> labels;
        for (int i : s) labels.insert(d.labels[static_cast<std::size_t>(i)]);
        CHECK(labels.size() <= 2);
        CHECK(!s.empty());
    }
    auto again = partition_clients(d, 10, Partition::LabelSorted, 9);
    CHECK(shards == again);
}

TEST_CASE("parameter counts") {
    ModelSpec lr{ModelKind::LogisticRegression, 20, 0, 2};
    CHECK(lr.param_count() == 42);
    ModelSpec mlp{ModelKind::MlpOneHidden, 6, 4, 3};
    CHECK(mlp.param_count() == 7 * 4 + 5 * 3);
    ModelSpec bad{ModelKind::MlpOneHidden, 6, 0, 3};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("analytic gradients match central differences to 1e-5") {
    for (auto kind : {ModelKind::LogisticRegression, ModelKind::MlpOneHidden}) {
        ModelSpec spec{kind, 6, 4, 3};
        auto model = make_model(spec);

        BlobsParams p;
        p.classes = 3;
        p.dim = 6;
        p.per_class = 12;
        p.seed = 31;
        Dataset d = make_blobs(p);
        std::vector<int> batch(d.train_idx.begin(), d.train_idx.begin() + 10);

        const int params = spec.param_count();
        std::vector<double> w(static_cast<std::size_t>(params));
        std::vector<double> grad(w.size());
        double worst = 0.0;
        for (int inst = 0; inst < 100; ++inst) {
            for (std::size_t i = 0; i < w.size(); ++i)
                w[i] = 2.0 * draw_unit(500 + inst, static_cast<std::uint64_t>(kind),
                                       i) -
                       1.0;
            model->loss_grad(w, d, batch, grad);
            for (int probe = inst % params, reps = 0; reps < 3;
                 ++reps, probe = (probe + params / 3 + 1) % params) {
                const double eps = 1e-6;
                std::vector<double> wp = w, wm = w;
                wp[static_cast<std::size_t>(probe)] += eps;
                wm[static_cast<std::size_t>(probe)] -= eps;
                double fd =
                    (model->loss(wp, d, batch) - model->loss(wm, d, batch)) /
                    (2 * eps);
                double denom = std::max(
                    {std::fabs(fd), std::fabs(grad[static_cast<std::size_t>(probe)]),
                     1e-8});
                worst = std::max(
                    worst, std::fabs(fd - grad[static_cast<std::size_t>(probe)]) /
                               denom);
            }
        }
        CHECK(worst <= 1e-5);
    }
}

TEST_CASE("accuracy is perfect on widely separated blobs with a good model") {
    ModelSpec spec{ModelKind::LogisticRegression, 2, 0, 2};
    // hand-made separable set on the x axis
    Dataset d;
    d.feature_dim = 2;
    d.classes = 2;
    for (int i = 0; i < 20; ++i) {
        double x = i < 10 ? -2.0 - 0.1 * i : 2.0 + 0.1 * (i - 10);
        d.features.push_back(x);
        d.features.push_back(0.5);
        d.labels.push_back(i < 10 ? 0 : 1);
        d.train_idx.push_back(i);
    }
    d.test_idx = d.train_idx;
    // class-1 score grows with x
    std::vector<double> w{-1.0, 0.0, 1.0, 0.0, 0.0, 0.0};
    auto model = make_model(spec);
    CHECK(accuracy(*model, spec, w, d, d.test_idx) == 1.0);
}
