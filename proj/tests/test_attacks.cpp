#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "support.hpp"
#include "txadv/attacks.hpp"
#include "txadv/hexutil.hpp"
#include "txadv/preprocess.hpp"

using namespace txadv;
using testsupport::check_isolation;

namespace {

struct Fixture {
    DatasetHandle dataset;   // imputed + engineered multi data
    EncodedDataset encoded;
};

Fixture multi_fixture(std::size_t n = 120, std::uint64_t seed = 51) {
    Fixture f;
    f.dataset = engineer_features(impute(synthesize(
        Schema::Multi, n, {{"Benign", 0.7}, {"Phishing", 0.15}, {"Scamming", 0.15}}, 0.8, seed)));
    f.encoded = fit_transform(f.dataset, seed);
    return f;
}

}  // namespace

TEST_CASE("timestamp shift adds the interval on selected rows") {
    auto f = multi_fixture();
    const auto before = f.dataset.multi_rows[0].block_timestamp;
    const auto res = timestamp_shift(f.dataset, 86400, RowSelection{});
    CHECK(res.perturbed.multi_rows[0].block_timestamp == before + 86400);
    CHECK(res.touched_features == std::vector<std::string>{"block_timestamp"});
    CHECK(check_isolation(f.dataset, res).ok);

    SUBCASE("documented preset intervals") {
        CHECK(kAllowedTimestampShifts ==
              std::array<std::int64_t, 5>{86400, 3600, 1800, 900, 300});
    }
    SUBCASE("a straightforward arithmetic check") {
        DatasetHandle d;
        d.schema = Schema::Binary;
        BinaryTxRecord rec;
        rec.tx_hash = "0xa";
        rec.timestamp = 1'600'000'000;
        d.binary_rows = {rec};
        d.labels = {0};
        d.recount_classes();
        const auto shifted = timestamp_shift(d, 86400, RowSelection{});
        CHECK(shifted.perturbed.binary_rows[0].timestamp == 1'600'086'400);
    }
    SUBCASE("empty selection is the identity") {
        RowSelection none{RowSelection::Kind::FirstN, 0, 0};
        const auto res2 = timestamp_shift(f.dataset, 86400, none);
        CHECK(res2.perturbed.multi_rows == f.dataset.multi_rows);
        CHECK(res2.touched_rows.empty());
    }
}

TEST_CASE("value manipulation") {
    auto f = multi_fixture();
    DatasetHandle d = f.dataset;
    d.multi_rows[0].value = 100.0;
    d.multi_rows[1].value = 0.0;

    SUBCASE("uniform adds the fixed percentage") {
        const auto res = value_manipulate(d, ValueMode::Uniform, 0.01, RowSelection{}, 0);
        CHECK(res.perturbed.multi_rows[0].value == doctest::Approx(101.0).epsilon(1e-12));
        CHECK(res.perturbed.multi_rows[1].value == 0.0);
        CHECK(check_isolation(d, res).ok);
    }
    SUBCASE("proportional stays inside the band over many draws") {
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            const auto res = value_manipulate(d, ValueMode::Proportional, 0.01,
                                              RowSelection{RowSelection::Kind::FirstN, 1, 0}, seed);
            const double v = res.perturbed.multi_rows[0].value;
            CHECK(v >= 99.0);
            CHECK(v <= 101.0);
        }
    }
    SUBCASE("zero value is fixed under both modes") {
        const auto u = value_manipulate(d, ValueMode::Uniform, 0.05, RowSelection{}, 0);
        const auto p = value_manipulate(d, ValueMode::Proportional, 0.05, RowSelection{}, 9);
        CHECK(u.perturbed.multi_rows[1].value == 0.0);
        CHECK(p.perturbed.multi_rows[1].value == 0.0);
    }
    SUBCASE("non-positive percentage is rejected") {
        CHECK_THROWS_AS(value_manipulate(d, ValueMode::Uniform, 0.0, RowSelection{}, 0),
                        NegativePctError);
        CHECK_THROWS_AS(value_manipulate(d, ValueMode::Proportional, -0.1, RowSelection{}, 0),
                        NegativePctError);
    }
}

TEST_CASE("address substitution") {
    auto f = multi_fixture();

    SUBCASE("unseen mode never collides with the dataset vocabulary") {
        const auto res = address_substitute(f.dataset, AddressField::To, f.dataset.size(),
                                            AddressMode::UnseenRandomHex, 7);
        std::set<std::string> originals;
        for (const auto& r : f.dataset.multi_rows) {
            originals.insert(r.from_address);
            if (r.to_address) originals.insert(*r.to_address);
        }
        for (const auto& r : res.perturbed.multi_rows) {
            REQUIRE(r.to_address.has_value());
            CHECK(originals.count(*r.to_address) == 0);
        }
        CHECK(check_isolation(f.dataset, res).ok);
    }
    SUBCASE("shuffle mode draws a different existing address") {
        const auto res = address_substitute(f.dataset, AddressField::From, 50,
                                            AddressMode::ShuffleWithin, 8);
        std::set<std::string> pool;
        for (const auto& r : f.dataset.multi_rows) pool.insert(r.from_address);
        for (std::size_t r : res.touched_rows) {
            CHECK(pool.count(res.perturbed.multi_rows[r].from_address) == 1);
            CHECK(res.perturbed.multi_rows[r].from_address != f.dataset.multi_rows[r].from_address);
        }
        CHECK(check_isolation(f.dataset, res).ok);
    }
    SUBCASE("zero rows is the identity") {
        const auto res = address_substitute(f.dataset, AddressField::To, 0,
                                            AddressMode::UnseenRandomHex, 7);
        CHECK(res.perturbed.multi_rows == f.dataset.multi_rows);
    }
    SUBCASE("oversized request is rejected") {
        CHECK_THROWS_AS(address_substitute(f.dataset, AddressField::To, f.dataset.size() + 1,
                                           AddressMode::ShuffleWithin, 7),
                        NRowsTooLargeError);
    }
}

TEST_CASE("untargeted group perturbations") {
    auto f = multi_fixture();

    SUBCASE("temporal group leaves value untouched") {
        const auto res = untargeted_group(f.dataset, FeatureGroup::Temporal, 0.5, f.encoded.codec, 3);
        for (std::size_t r = 0; r < f.dataset.size(); ++r)
            CHECK(res.perturbed.multi_rows[r].value == f.dataset.multi_rows[r].value);
        CHECK(check_isolation(f.dataset, res).ok);
        CHECK(std::find(res.touched_features.begin(), res.touched_features.end(), "value") ==
              res.touched_features.end());
    }
    SUBCASE("financial group is exactly value, gas, gas_price") {
        const auto res = untargeted_group(f.dataset, FeatureGroup::Financial, 0.5, f.encoded.codec, 3);
        CHECK(res.touched_features == std::vector<std::string>{"value", "gas", "gas_price"});
        CHECK(check_isolation(f.dataset, res).ok);
    }
    SUBCASE("address group redraws both endpoints as unseen hex") {
        const auto res = untargeted_group(f.dataset, FeatureGroup::Address, 0.5, f.encoded.codec, 3);
        std::set<std::string> originals;
        for (const auto& r : f.dataset.multi_rows) {
            originals.insert(r.from_address);
            if (r.to_address) originals.insert(*r.to_address);
        }
        for (const auto& r : res.perturbed.multi_rows) {
            CHECK(originals.count(r.from_address) == 0);
            CHECK(originals.count(r.to_address.value()) == 0);
        }
    }
    SUBCASE("all group also rewrites the input payload") {
        const auto res = untargeted_group(f.dataset, FeatureGroup::All, 0.5, f.encoded.codec, 3);
        CHECK(std::find(res.touched_features.begin(), res.touched_features.end(), "input") !=
              res.touched_features.end());
        CHECK(check_isolation(f.dataset, res).ok);
        // Rewritten payloads keep the engineered numerics in step.
        for (const auto& r : res.perturbed.multi_rows) {
            CHECK(r.input_len == hex_byte_length(*r.input));
            CHECK(r.input_prefix == hex_prefix_value(*r.input));
        }
    }
    SUBCASE("seeded noise is reproducible bit for bit") {
        const auto a = untargeted_group(f.dataset, FeatureGroup::All, 0.5, f.encoded.codec, 3);
        const auto b = untargeted_group(f.dataset, FeatureGroup::All, 0.5, f.encoded.codec, 3);
        CHECK(to_csv_text(a.perturbed) == to_csv_text(b.perturbed));
        const auto c = untargeted_group(f.dataset, FeatureGroup::All, 0.5, f.encoded.codec, 4);
        CHECK(to_csv_text(a.perturbed) != to_csv_text(c.perturbed));
    }
    SUBCASE("row selection scopes the noise") {
        RowSelection first{RowSelection::Kind::FirstN, 30, 0};
        const auto res =
            untargeted_group(f.dataset, FeatureGroup::Financial, 0.5, f.encoded.codec, 3, first);
        CHECK(res.touched_rows.size() == 30);
        for (std::size_t r = 30; r < f.dataset.size(); ++r)
            CHECK(res.perturbed.multi_rows[r] == f.dataset.multi_rows[r]);
        CHECK(check_isolation(f.dataset, res).ok);
    }
}

TEST_CASE("rule-based targeted plans") {
    auto f = multi_fixture(200);

    SUBCASE("scamming plan touches exactly gas and gas_price") {
        const auto res = rule_based_targeted(f.dataset, kScamming, {}, 5);
        CHECK(res.touched_features == std::vector<std::string>{"gas", "gas_price"});
        CHECK(check_isolation(f.dataset, res).ok);
        for (std::size_t r : res.touched_rows) CHECK(f.dataset.labels[r] == kScamming);
    }
    SUBCASE("benign plan leaves phishing rows untouched") {
        const auto res = rule_based_targeted(f.dataset, kBenign, {}, 5);
        for (std::size_t r = 0; r < f.dataset.size(); ++r) {
            if (f.dataset.labels[r] != kBenign)
                CHECK(f.dataset.multi_rows[r] == res.perturbed.multi_rows[r]);
        }
        CHECK(check_isolation(f.dataset, res).ok);
    }
    SUBCASE("default 1% magnitude keeps value within the band") {
        DatasetHandle d = f.dataset;
        for (auto& r : d.multi_rows) r.value = 200.0;
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const auto res = rule_based_targeted(d, kBenign, {}, seed);
            for (std::size_t r : res.touched_rows) {
                CHECK(res.perturbed.multi_rows[r].value >= 198.0);
                CHECK(res.perturbed.multi_rows[r].value <= 202.0);
            }
        }
    }
    SUBCASE("phishing plan rewrites endpoints with unseen addresses") {
        const auto res = rule_based_targeted(f.dataset, kPhishing, {}, 5);
        CHECK(res.touched_features ==
              std::vector<std::string>{"from_address", "to_address", "value"});
        std::set<std::string> originals;
        for (const auto& r : f.dataset.multi_rows) {
            originals.insert(r.from_address);
            if (r.to_address) originals.insert(*r.to_address);
        }
        for (std::size_t r : res.touched_rows)
            CHECK(originals.count(res.perturbed.multi_rows[r].from_address) == 0);
    }
    SUBCASE("absent class is rejected") {
        const auto binary = synthesize(Schema::Binary, 50, {{"Benign", 1.0}}, 0.5, 1);
        CHECK_THROWS_AS(rule_based_targeted(binary, kPhishing, {}, 1), ClassAbsentError);
    }
}

TEST_CASE("fgsm") {
    SUBCASE("one-feature binary case moves against the gradient") {
        // Same construction as the gradient example: sign is negative, so
        // x' = x - epsilon.
        Matrix w(2, 1);
        w.at(0, 0) = -1.0;
        w.at(1, 0) = 1.0;
        const auto s = SoftmaxSurrogate::from_parts(std::move(w), {0.0, 0.0}, {});
        Matrix x(1, 1);
        x.at(0, 0) = 0.5;
        const auto out = fgsm(x, {1}, s, 0.1, {0}, {-10.0}, {10.0});
        CHECK(out.at(0, 0) == doctest::Approx(0.4).epsilon(1e-12));
    }

    auto f = multi_fixture();
    const auto train_idx = f.encoded.train_indices();
    const auto surrogate =
        SoftmaxSurrogate::fit(f.encoded.train_matrix(), f.encoded.labels_at(train_idx),
                              f.encoded.n_classes(), {.epochs = 60});

    AttackPlan plan;
    plan.family = AttackFamily::Fgsm;
    plan.epsilon = 0.1;

    SUBCASE("masked-out columns are bit-identical") {
        const auto res =
            apply_fgsm_plan(f.encoded.matrix, f.encoded.labels, plan, f.encoded.codec, surrogate);
        const auto mask = resolve_feature_mask(f.encoded.codec, default_fgsm_mask(Schema::Multi));
        for (std::size_t r = 0; r < f.encoded.matrix.rows; ++r) {
            for (std::size_t c = 0; c < f.encoded.matrix.cols; ++c) {
                if (std::find(mask.begin(), mask.end(), c) == mask.end())
                    CHECK(res.rows.at(r, c) == f.encoded.matrix.at(r, c));
            }
        }
    }
    SUBCASE("perturbation is bounded by epsilon and the train range") {
        const auto res =
            apply_fgsm_plan(f.encoded.matrix, f.encoded.labels, plan, f.encoded.codec, surrogate);
        const auto mask = resolve_feature_mask(f.encoded.codec, default_fgsm_mask(Schema::Multi));
        for (std::size_t r = 0; r < f.encoded.matrix.rows; ++r) {
            for (std::size_t c : mask) {
                const auto& feat = f.encoded.codec.features[c];
                const double before = f.encoded.matrix.at(r, c);
                const double after = res.rows.at(r, c);
                const bool in_range = before >= feat.train_min && before <= feat.train_max;
                if (in_range) CHECK(std::abs(after - before) <= 0.1 + 1e-12);
                CHECK(after >= feat.train_min - 1e-12);
                CHECK(after <= feat.train_max + 1e-12);
            }
        }
    }
    SUBCASE("epsilon to zero approaches the identity") {
        AttackPlan tiny = plan;
        tiny.epsilon = 1e-9;
        const auto res =
            apply_fgsm_plan(f.encoded.matrix, f.encoded.labels, tiny, f.encoded.codec, surrogate);
        for (std::size_t i = 0; i < res.rows.data.size(); ++i) {
            const double before = f.encoded.matrix.data[i];
            // clipping can only pull values toward the train range
            if (std::abs(res.rows.data[i] - before) > 2e-9) {
                const std::size_t c = i % f.encoded.matrix.cols;
                const auto& feat = f.encoded.codec.features[c];
                CHECK((before < feat.train_min || before > feat.train_max));
            }
        }
    }
    SUBCASE("small-step attack does not reduce surrogate loss on most rows") {
        const Matrix rows = f.encoded.train_matrix();
        const auto labels = f.encoded.labels_at(train_idx);
        std::vector<double> wide_min(rows.cols, -1e9), wide_max(rows.cols, 1e9);
        const auto mask = resolve_feature_mask(f.encoded.codec, default_fgsm_mask(Schema::Multi));
        const Matrix moved = fgsm(rows, labels, surrogate, 0.01, mask, wide_min, wide_max);
        std::size_t ascended = 0;
        for (std::size_t r = 0; r < rows.rows; ++r) {
            Matrix a(1, rows.cols), b(1, rows.cols);
            for (std::size_t c = 0; c < rows.cols; ++c) {
                a.at(0, c) = rows.at(r, c);
                b.at(0, c) = moved.at(r, c);
            }
            const std::vector<int> y = {labels[r]};
            if (surrogate.loss(b, y) >= surrogate.loss(a, y) - 1e-9) ++ascended;
        }
        CHECK(static_cast<double>(ascended) >= 0.95 * static_cast<double>(rows.rows));
    }
    SUBCASE("errors") {
        Matrix x(1, 2);
        CHECK_THROWS_AS(fgsm(x, {0}, surrogate, 0.1, {}, {0, 0}, {1, 1}), EmptyMaskError);
        CHECK_THROWS_AS(
            fgsm(f.encoded.matrix, f.encoded.labels, surrogate, -1.0,
                 resolve_feature_mask(f.encoded.codec, default_fgsm_mask(Schema::Multi)),
                 std::vector<double>(18, 0.0), std::vector<double>(18, 1.0)),
            PreconditionError);
        CHECK_THROWS_AS(resolve_feature_mask(f.encoded.codec, {"value", "nope"}),
                        SchemaMismatchError);
    }
}

TEST_CASE("every raw family isolates rows and features, serial or parallel") {
    auto f = multi_fixture(150, 77);

    std::vector<AttackPlan> plans;
    {
        AttackPlan p;
        p.family = AttackFamily::TimestampShift;
        p.shift_seconds = 3600;
        p.selection = {RowSelection::Kind::FirstN, 60, 0};
        plans.push_back(p);
        p = {};
        p.family = AttackFamily::ValueProportional;
        p.max_pct = 0.02;
        p.seed = 5;
        plans.push_back(p);
        p = {};
        p.family = AttackFamily::AddressSubstitute;
        p.field = AddressField::From;
        p.n_rows = 40;
        p.mode = AddressMode::UnseenRandomHex;
        p.seed = 6;
        plans.push_back(p);
        p = {};
        p.family = AttackFamily::UntargetedGroup;
        p.group = FeatureGroup::All;
        p.noise_scale = 0.5;
        p.seed = 7;
        plans.push_back(p);
        p = {};
        p.family = AttackFamily::RuleBasedTargeted;
        p.target_class = kPhishing;
        p.seed = 8;
        plans.push_back(p);
    }

    for (const auto& plan : plans) {
        CAPTURE(family_name(plan.family));
        const auto serial = apply_plan(f.dataset, plan, &f.encoded.codec, ExecPolicy{1});
        const auto check = check_isolation(f.dataset, serial);
        INFO(check.detail);
        CHECK(check.ok);

        const auto parallel = apply_plan(f.dataset, plan, &f.encoded.codec, ExecPolicy{4});
        CHECK(to_csv_text(serial.perturbed) == to_csv_text(parallel.perturbed));

        const auto rerun = apply_plan(f.dataset, plan, &f.encoded.codec, ExecPolicy{1});
        CHECK(to_csv_text(serial.perturbed) == to_csv_text(rerun.perturbed));
    }
}

TEST_CASE("attack plan json round-trip and validation") {
    AttackPlan plan;
    plan.family = AttackFamily::RuleBasedTargeted;
    plan.target_class = kScamming;
    plan.seed = 9;
    const auto text = plan_to_json(plan, Schema::Multi);
    const auto back = plan_from_json(text, Schema::Multi);
    CHECK(back.family == plan.family);
    CHECK(back.target_class == kScamming);
    CHECK(back.seed == 9);

    SUBCASE("unknown keys are named") {
        try {
            plan_from_json(R"({"family":"fgsm","epsilonn":0.1})", Schema::Multi);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("epsilonn") != std::string::npos);
        }
    }
    SUBCASE("non-preset shift requires the custom flag") {
        CHECK_THROWS_AS(
            plan_from_json(R"({"family":"timestamp_shift","shift_seconds":123})", Schema::Multi),
            ConfigError);
        const auto ok = plan_from_json(
            R"({"family":"timestamp_shift","shift_seconds":123,"custom":true})", Schema::Multi);
        CHECK(ok.shift_seconds == 123);
    }
}
