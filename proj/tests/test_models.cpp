#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "txadv/errors.hpp"
#include "txadv/models.hpp"
#include "txadv/rng.hpp"

using namespace txadv;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = rows[r][c];
    return m;
}

// Brute-force nearest-neighbor oracle with the same tie rule: everything
// inside the k-th distance votes.
std::vector<int> naive_knn(const Matrix& train, const std::vector<int>& y, int k,
                           std::size_t n_classes, const Matrix& queries) {
    std::vector<int> out;
    for (std::size_t q = 0; q < queries.rows; ++q) {
        std::vector<double> dists(train.rows);
        for (std::size_t t = 0; t < train.rows; ++t) {
            double d = 0.0;
            for (std::size_t c = 0; c < train.cols; ++c) {
                const double diff = queries.at(q, c) - train.at(t, c);
                d += diff * diff;
            }
            dists[t] = d;
        }
        auto sorted = dists;
        std::sort(sorted.begin(), sorted.end());
        const double radius = sorted[static_cast<std::size_t>(k) - 1];
        std::vector<double> votes(n_classes, 0.0);
        for (std::size_t t = 0; t < train.rows; ++t)
            if (dists[t] <= radius) votes[static_cast<std::size_t>(y[t])] += 1.0;
        out.push_back(static_cast<int>(
            std::max_element(votes.begin(), votes.end()) - votes.begin()));
    }
    return out;
}

double gini_of(const std::vector<int>& labels, std::size_t n_classes) {
    std::vector<double> counts(n_classes, 0.0);
    for (int l : labels) counts[static_cast<std::size_t>(l)] += 1.0;
    double s = 0.0;
    for (double c : counts) {
        const double p = c / static_cast<double>(labels.size());
        s += p * p;
    }
    return 1.0 - s;
}

}  // namespace

TEST_CASE("decision tree separates the 4-point fixture at depth <= 2") {
    const Matrix x = from_rows({{0.0}, {0.1}, {1.0}, {1.1}});
    const std::vector<int> y = {0, 0, 1, 1};
    const auto tree = DecisionTreeModel::fit(x, y, 2, {});
    CHECK(tree.depth() <= 2);
    CHECK(tree.predict(x) == y);
}

TEST_CASE("single-tree forest without bootstrap equals the plain tree") {
    Rng rng(5);
    Matrix x(40, 3);
    std::vector<int> y(40);
    for (std::size_t r = 0; r < 40; ++r) {
        y[r] = static_cast<int>(r % 2);
        for (std::size_t c = 0; c < 3; ++c)
            x.at(r, c) = rng.normal(y[r] == 0 ? 0.0 : 1.5, 1.0);
    }
    RfParams params;
    params.n_trees = 1;
    params.bootstrap = false;
    params.features_per_split = 3;  // all features, no subsampling
    const auto forest = RandomForestModel::fit(x, y, 2, params);
    const auto tree = DecisionTreeModel::fit(x, y, 2, params.tree);
    CHECK(forest.predict(x) == tree.predict(x));
}

TEST_CASE("knn k=1 memorizes distinct training points") {
    const Matrix x = from_rows({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {2.0, 2.0}});
    const std::vector<int> y = {0, 1, 1, 0};
    const auto knn = KnnModel::fit(x, y, 2, {.k = 1});
    CHECK(knn.predict(x) == y);

    SUBCASE("single stored point answers itself") {
        const auto one = KnnModel::fit(from_rows({{3.0}, {4.0}}), {0, 1}, 2, {.k = 1});
        CHECK(one.predict(from_rows({{3.0}})) == std::vector<int>{0});
    }
}

TEST_CASE("predict on an empty matrix returns an empty vector") {
    const Matrix x = from_rows({{0.0}, {1.0}});
    const std::vector<int> y = {0, 1};
    const auto tree = DecisionTreeModel::fit(x, y, 2, {});
    const Matrix empty(0, 1);
    CHECK(tree.predict(empty).empty());
}

TEST_CASE("knn matches the brute-force oracle on a 6-point fixture") {
    const Matrix train = from_rows(
        {{0.0, 0.0}, {0.5, 0.1}, {1.0, 1.0}, {1.2, 0.9}, {0.1, 0.4}, {0.9, 1.3}});
    const std::vector<int> y = {0, 0, 1, 1, 0, 1};
    const auto knn = KnnModel::fit(train, y, 2, {.k = 3});

    const Matrix queries =
        from_rows({{0.2, 0.2}, {1.1, 1.1}, {0.6, 0.6}, {0.0, 1.0}, {1.0, 0.0}, {0.5, 0.5}});
    CHECK(knn.predict(queries) == naive_knn(train, y, 3, 2, queries));
}

TEST_CASE("knn predictions are invariant under training-row permutation") {
    Rng rng(11);
    Matrix x(30, 2);
    std::vector<int> y(30);
    for (std::size_t r = 0; r < 30; ++r) {
        // Duplicated grid points force exact distance ties.
        x.at(r, 0) = static_cast<double>(r % 5);
        x.at(r, 1) = static_cast<double>((r / 5) % 3);
        y[r] = static_cast<int>(rng.below(2));
    }
    const auto knn = KnnModel::fit(x, y, 2, {.k = 5});

    std::vector<std::size_t> perm(30);
    for (std::size_t i = 0; i < 30; ++i) perm[i] = i;
    rng.shuffle(perm);
    Matrix xp(30, 2);
    std::vector<int> yp(30);
    for (std::size_t i = 0; i < 30; ++i) {
        xp.at(i, 0) = x.at(perm[i], 0);
        xp.at(i, 1) = x.at(perm[i], 1);
        yp[i] = y[perm[i]];
    }
    const auto knn_perm = KnnModel::fit(xp, yp, 2, {.k = 5});

    Matrix queries(50, 2);
    for (std::size_t r = 0; r < 50; ++r) {
        queries.at(r, 0) = rng.uniform(-1.0, 5.0);
        queries.at(r, 1) = rng.uniform(-1.0, 3.0);
    }
    CHECK(knn.predict(queries) == knn_perm.predict(queries));
}

TEST_CASE("predict_proba contracts") {
    SUBCASE("zero surrogate gives uniform probabilities") {
        const auto s = SoftmaxSurrogate::from_parts(Matrix(3, 4), std::vector<double>(3, 0.0), {});
        const auto p = s.predict_proba(from_rows({{1.0, -2.0, 0.5, 3.0}}));
        for (std::size_t c = 0; c < 3; ++c) CHECK(p.at(0, c) == doctest::Approx(1.0 / 3));
    }
    SUBCASE("tree leaf frequencies: 3 benign / 1 phishing -> [0.75, 0.25]") {
        const Matrix x = from_rows({{1.0}, {1.0}, {1.0}, {1.0}});
        const std::vector<int> y = {0, 0, 0, 1};
        const auto tree = DecisionTreeModel::fit(x, y, 2, {});
        const auto p = tree.predict_proba(from_rows({{1.0}}));
        CHECK(p.at(0, 0) == doctest::Approx(0.75));
        CHECK(p.at(0, 1) == doctest::Approx(0.25));
    }
    SUBCASE("forest averages its trees: [1,0] and [0.5,0.5] -> [0.75,0.25]") {
        using Node = DecisionTreeModel::Node;
        Node leaf_a;
        leaf_a.probs = {1.0, 0.0};
        Node leaf_b;
        leaf_b.probs = {0.5, 0.5};
        auto t1 = DecisionTreeModel::from_parts({leaf_a}, 1, 2, {});
        auto t2 = DecisionTreeModel::from_parts({leaf_b}, 1, 2, {});
        std::vector<DecisionTreeModel> trees;
        trees.push_back(t1);
        trees.push_back(t2);
        const auto forest = RandomForestModel::from_parts(std::move(trees), 1, 2, {});
        const auto p = forest.predict_proba(from_rows({{0.0}}));
        CHECK(p.at(0, 0) == doctest::Approx(0.75));
        CHECK(p.at(0, 1) == doctest::Approx(0.25));
    }
    SUBCASE("probability rows sum to one") {
        Rng rng(3);
        Matrix x(60, 4);
        std::vector<int> y(60);
        for (std::size_t r = 0; r < 60; ++r) {
            y[r] = static_cast<int>(r % 3);
            for (std::size_t c = 0; c < 4; ++c) x.at(r, c) = rng.normal(y[r], 1.0);
        }
        for (const auto kind : {ModelKind::DecisionTree, ModelKind::RandomForest, ModelKind::Knn,
                                ModelKind::Surrogate}) {
            ModelSpec spec;
            spec.kind = kind;
            spec.rf.n_trees = 10;
            spec.surrogate.epochs = 30;
            const auto model = fit(spec, x, y, 3);
            const auto p = model->predict_proba(x);
            for (std::size_t r = 0; r < p.rows; ++r) {
                double sum = 0.0;
                for (std::size_t c = 0; c < p.cols; ++c) sum += p.at(r, c);
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("input gradient matches the closed-form binary example") {
    // Two classes, one feature, logit margin 2x: W = [[-1], [1]].
    Matrix w(2, 1);
    w.at(0, 0) = -1.0;
    w.at(1, 0) = 1.0;
    const auto s = SoftmaxSurrogate::from_parts(std::move(w), {0.0, 0.0}, {});

    const std::vector<double> x = {0.5};
    const auto grad = s.input_gradient(x, 1);

    // Independent sigmoid oracle: (sigma(w x) - 1) * w with w = 2.
    const double sigmoid = 1.0 / (1.0 + std::exp(-2.0 * 0.5));
    const double expected = (sigmoid - 1.0) * 2.0;
    CHECK(grad[0] == doctest::Approx(expected).epsilon(1e-9));
    CHECK(grad[0] == doctest::Approx(-0.5379).epsilon(1e-3));
}

TEST_CASE("perfect confidence yields a zero gradient") {
    Matrix w(2, 1);
    w.at(0, 0) = -500.0;
    w.at(1, 0) = 500.0;
    const auto s = SoftmaxSurrogate::from_parts(std::move(w), {0.0, 0.0}, {});
    const std::vector<double> x = {1.0};
    const auto grad = s.input_gradient(x, 1);  // p == onehot(1) numerically
    CHECK(grad[0] == 0.0);
}

TEST_CASE("input gradient matches central finite differences") {
    Rng rng(17);
    Matrix w(3, 5);
    for (double& v : w.data) v = rng.normal(0.0, 1.0);
    std::vector<double> b = {0.1, -0.2, 0.3};
    const auto s = SoftmaxSurrogate::from_parts(std::move(w), std::move(b), {});

    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(5);
        for (double& v : x) v = rng.normal(0.0, 2.0);
        const int y = static_cast<int>(rng.below(3));
        const auto grad = s.input_gradient(x, y);

        // Per-instance gradient check against the vector scale.
        std::vector<double> fd(5);
        double scale = 1e-12;
        for (std::size_t f = 0; f < 5; ++f) {
            auto xp = x, xm = x;
            xp[f] += h;
            xm[f] -= h;
            Matrix mp(1, 5), mm(1, 5);
            for (std::size_t c = 0; c < 5; ++c) {
                mp.at(0, c) = xp[c];
                mm.at(0, c) = xm[c];
            }
            fd[f] = (s.loss(mp, {y}) - s.loss(mm, {y})) / (2.0 * h);
            scale = std::max({scale, std::abs(grad[f]), std::abs(fd[f])});
        }
        double rel = 0.0;
        for (std::size_t f = 0; f < 5; ++f)
            rel = std::max(rel, std::abs(grad[f] - fd[f]) / scale);
        CHECK(rel < 1e-4);
    }
}

TEST_CASE("surrogate training loss is non-increasing") {
    Rng rng(23);
    Matrix x(120, 4);
    std::vector<int> y(120);
    for (std::size_t r = 0; r < 120; ++r) {
        y[r] = static_cast<int>(r % 3);
        for (std::size_t c = 0; c < 4; ++c) x.at(r, c) = rng.normal(0.5 * y[r], 1.0);
    }
    const auto s = SoftmaxSurrogate::fit(x, y, 3, {.epochs = 100});
    const auto& hist = s.loss_history();
    REQUIRE(hist.size() == 101);
    for (std::size_t i = 1; i < hist.size(); ++i) CHECK(hist[i] <= hist[i - 1] + 1e-6);
    CHECK(hist.back() < hist.front());
}

TEST_CASE("internal thresholds stay inside the train range of their feature") {
    Rng rng(59);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix x(60, 4);
        std::vector<int> y(60);
        for (std::size_t r = 0; r < 60; ++r) {
            y[r] = static_cast<int>(rng.below(2));
            for (std::size_t c = 0; c < 4; ++c) x.at(r, c) = rng.uniform(-3.0, 3.0);
        }
        const auto tree = DecisionTreeModel::fit(x, y, 2, {});
        for (const auto& node : tree.nodes()) {
            if (node.feature < 0) continue;
            double lo = x.at(0, static_cast<std::size_t>(node.feature));
            double hi = lo;
            for (std::size_t r = 1; r < 60; ++r) {
                lo = std::min(lo, x.at(r, static_cast<std::size_t>(node.feature)));
                hi = std::max(hi, x.at(r, static_cast<std::size_t>(node.feature)));
            }
            CHECK(node.threshold > lo);
            CHECK(node.threshold < hi);
        }
    }
}

TEST_CASE("every chosen split strictly reduces gini impurity") {
    Rng rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix x(50, 3);
        std::vector<int> y(50);
        for (std::size_t r = 0; r < 50; ++r) {
            y[r] = static_cast<int>(rng.below(3));
            for (std::size_t c = 0; c < 3; ++c) x.at(r, c) = rng.uniform(0.0, 4.0);
        }
        const auto tree = DecisionTreeModel::fit(x, y, 3, {.max_depth = 6});

        // Walk the tree with the training rows and recompute impurities.
        struct Item {
            std::size_t node;
            std::vector<std::size_t> rows;
        };
        std::vector<std::size_t> all(50);
        for (std::size_t i = 0; i < 50; ++i) all[i] = i;
        std::vector<Item> stack{{0, all}};
        while (!stack.empty()) {
            auto [node, rows] = stack.back();
            stack.pop_back();
            const auto& n = tree.nodes()[node];
            if (n.feature < 0) continue;
            std::vector<std::size_t> left, right;
            std::vector<int> yl, yr, yall;
            for (std::size_t r : rows) {
                yall.push_back(y[r]);
                if (x.at(r, static_cast<std::size_t>(n.feature)) <= n.threshold) {
                    left.push_back(r);
                    yl.push_back(y[r]);
                } else {
                    right.push_back(r);
                    yr.push_back(y[r]);
                }
            }
            REQUIRE(!left.empty());
            REQUIRE(!right.empty());
            const double parent = gini_of(yall, 3);
            const double child =
                (yl.size() * gini_of(yl, 3) + yr.size() * gini_of(yr, 3)) / yall.size();
            CHECK(child < parent);
            stack.push_back({static_cast<std::size_t>(n.left), std::move(left)});
            stack.push_back({static_cast<std::size_t>(n.right), std::move(right)});
        }
    }
}

TEST_CASE("forest beats or ties the single tree on held-out separable data") {
    Rng rng(31);
    Matrix x(300, 6);
    std::vector<int> y(300);
    for (std::size_t r = 0; r < 300; ++r) {
        y[r] = static_cast<int>(r % 2);
        for (std::size_t c = 0; c < 6; ++c)
            x.at(r, c) = rng.normal(y[r] == 0 ? 0.0 : 0.8, 1.0);
    }
    Matrix train(200, 6), test(100, 6);
    std::vector<int> ytr, yte;
    for (std::size_t r = 0; r < 300; ++r) {
        if (r < 200) {
            for (std::size_t c = 0; c < 6; ++c) train.at(r, c) = x.at(r, c);
            ytr.push_back(y[r]);
        } else {
            for (std::size_t c = 0; c < 6; ++c) test.at(r - 200, c) = x.at(r, c);
            yte.push_back(y[r]);
        }
    }
    auto accuracy = [&](const std::vector<int>& preds) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < preds.size(); ++i) hits += (preds[i] == yte[i]);
        return static_cast<double>(hits) / static_cast<double>(preds.size());
    };
    const auto tree = DecisionTreeModel::fit(train, ytr, 2, {});
    RfParams params;
    params.n_trees = 60;
    params.seed = 31;
    const auto forest = RandomForestModel::fit(train, ytr, 2, params);
    CHECK(accuracy(forest.predict(test)) >= accuracy(tree.predict(test)) - 1e-9);
}

TEST_CASE("tree-parallel forest fitting equals the serial forest") {
    Rng rng(53);
    Matrix x(200, 5);
    std::vector<int> y(200);
    for (std::size_t r = 0; r < 200; ++r) {
        y[r] = static_cast<int>(r % 3);
        for (std::size_t c = 0; c < 5; ++c) x.at(r, c) = rng.normal(0.4 * y[r], 1.0);
    }
    RfParams serial;
    serial.n_trees = 24;
    serial.seed = 53;
    RfParams parallel = serial;
    parallel.threads = 4;

    const auto a = RandomForestModel::fit(x, y, 3, serial);
    const auto b = RandomForestModel::fit(x, y, 3, parallel);
    CHECK(a.predict_proba(x) == b.predict_proba(x));
    REQUIRE(a.trees().size() == b.trees().size());
    for (std::size_t t = 0; t < a.trees().size(); ++t)
        CHECK(a.trees()[t].nodes().size() == b.trees()[t].nodes().size());
}

TEST_CASE("model fitting errors") {
    const Matrix x = from_rows({{0.0}, {1.0}});
    CHECK_THROWS_AS(DecisionTreeModel::fit(x, {0, 0}, 2, {}), SingleClassDatasetError);
    CHECK_THROWS_AS(KnnModel::fit(x, {0, 1}, 2, {.k = 3}), DegenerateKError);
    CHECK_THROWS_AS(DecisionTreeModel::fit(x, {0, 5}, 2, {}), BadLabelError);

    const auto tree = DecisionTreeModel::fit(x, {0, 1}, 2, {});
    const Matrix wide = from_rows({{1.0, 2.0}});
    CHECK_THROWS_AS(tree.predict(wide), WidthMismatchError);
}

TEST_CASE("model json round-trips") {
    Rng rng(37);
    Matrix x(80, 4);
    std::vector<int> y(80);
    for (std::size_t r = 0; r < 80; ++r) {
        y[r] = static_cast<int>(r % 2);
        for (std::size_t c = 0; c < 4; ++c) x.at(r, c) = rng.normal(y[r], 1.0);
    }
    Matrix probe(20, 4);
    for (std::size_t r = 0; r < 20; ++r)
        for (std::size_t c = 0; c < 4; ++c) probe.at(r, c) = rng.normal(0.5, 1.5);

    SUBCASE("decision tree") {
        const auto tree = DecisionTreeModel::fit(x, y, 2, {});
        const auto loaded = model_from_json(model_to_json(tree));
        CHECK(loaded->predict(probe) == tree.predict(probe));
    }
    SUBCASE("random forest") {
        RfParams params;
        params.n_trees = 8;
        params.seed = 37;
        const auto forest = RandomForestModel::fit(x, y, 2, params);
        const auto loaded = model_from_json(model_to_json(forest));
        CHECK(loaded->predict(probe) == forest.predict(probe));
    }
    SUBCASE("surrogate") {
        const auto s = SoftmaxSurrogate::fit(x, y, 2, {.epochs = 40});
        const auto loaded = model_from_json(model_to_json(s));
        const auto p1 = s.predict_proba(probe);
        const auto p2 = loaded->predict_proba(probe);
        CHECK(p1 == p2);
    }
    SUBCASE("knn stores a data reference and verifies it on load") {
        const auto knn = KnnModel::fit(x, y, 2, {.k = 3});
        const auto doc = model_to_json(knn);
        CHECK_THROWS_AS(model_from_json(doc), ConfigError);  // data required
        const auto loaded = model_from_json(doc, &x, &y);
        CHECK(loaded->predict(probe) == knn.predict(probe));

        auto wrong_labels = y;
        wrong_labels[0] ^= 1;
        CHECK_THROWS_AS(model_from_json(doc, &x, &wrong_labels), ConfigError);
    }
}
