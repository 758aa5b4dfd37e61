#include "txadv/attacks.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_set>

#include "txadv/csv.hpp"
#include "txadv/hexutil.hpp"
#include "txadv/rng.hpp"

namespace txadv {

namespace {

using nlohmann::json;

const char* ts_feature(Schema s) { return s == Schema::Binary ? "timestamp" : "block_timestamp"; }
const char* from_feature(Schema s) { return s == Schema::Binary ? "from" : "from_address"; }
const char* to_feature(Schema s) { return s == Schema::Binary ? "to" : "to_address"; }
const char* block_feature(Schema s) { return s == Schema::Binary ? "block_height" : "block_number"; }

std::int64_t& timestamp_ref(DatasetHandle& d, std::size_t row) {
    return d.schema == Schema::Binary ? d.binary_rows[row].timestamp
                                      : d.multi_rows[row].block_timestamp;
}

double& value_ref(DatasetHandle& d, std::size_t row) {
    return d.schema == Schema::Binary ? d.binary_rows[row].value : d.multi_rows[row].value;
}

// Applies fn to every selected row, optionally sharded across threads.
// Per-row RNG streams make the sharded result equal the serial one.
template <typename Fn>
void for_each_selected(const std::vector<std::size_t>& rows, const ExecPolicy& exec, Fn&& fn) {
    if (exec.threads <= 1 || rows.size() < 2) {
        for (std::size_t r : rows) fn(r);
        return;
    }
    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(exec.threads), rows.size());
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    const std::size_t chunk = (rows.size() + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(rows.size(), begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&rows, begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i) fn(rows[i]);
        });
    }
    for (auto& w : workers) w.join();
}

void regenerate_input(DatasetHandle& d, std::size_t row, Rng& rng) {
    const std::string payload = random_hex(rng, 2 * rng.below(21));  // 0..20 bytes
    if (d.schema == Schema::Binary) {
        d.binary_rows[row].input = payload;
    } else {
        auto& rec = d.multi_rows[row];
        rec.input = payload;
        if (d.engineered) {  // keep derived numerics in step with the payload
            rec.input_len = hex_byte_length(payload);
            rec.input_prefix = hex_prefix_value(payload);
        }
    }
}

std::unordered_set<std::string> collect_addresses(const DatasetHandle& d) {
    std::unordered_set<std::string> all;
    if (d.schema == Schema::Binary) {
        for (const auto& r : d.binary_rows) {
            all.insert(r.from_addr);
            if (r.to_addr) all.insert(*r.to_addr);
            if (r.contract_address) all.insert(*r.contract_address);
        }
    } else {
        for (const auto& r : d.multi_rows) {
            all.insert(r.from_address);
            if (r.to_address) all.insert(*r.to_address);
        }
    }
    return all;
}

std::string unseen_address(Rng& rng, const std::unordered_set<std::string>& known) {
    std::string candidate = random_hex_address(rng);
    while (known.count(candidate) != 0) candidate = random_hex_address(rng);
    return candidate;
}

void set_address(DatasetHandle& d, std::size_t row, AddressField field, std::string addr) {
    if (d.schema == Schema::Binary) {
        if (field == AddressField::From)
            d.binary_rows[row].from_addr = std::move(addr);
        else
            d.binary_rows[row].to_addr = std::move(addr);
    } else {
        if (field == AddressField::From)
            d.multi_rows[row].from_address = std::move(addr);
        else
            d.multi_rows[row].to_address = std::move(addr);
    }
}

std::optional<std::string> get_address(const DatasetHandle& d, std::size_t row, AddressField field) {
    if (d.schema == Schema::Binary) {
        if (field == AddressField::From) return d.binary_rows[row].from_addr;
        return d.binary_rows[row].to_addr;
    }
    if (field == AddressField::From) return d.multi_rows[row].from_address;
    return d.multi_rows[row].to_address;
}

}  // namespace

std::string family_name(AttackFamily f) {
    switch (f) {
        case AttackFamily::TimestampShift: return "timestamp_shift";
        case AttackFamily::ValueUniform: return "value_uniform";
        case AttackFamily::ValueProportional: return "value_proportional";
        case AttackFamily::AddressSubstitute: return "address_substitute";
        case AttackFamily::UntargetedGroup: return "untargeted_group";
        case AttackFamily::RuleBasedTargeted: return "rule_targeted";
        case AttackFamily::Fgsm: return "fgsm";
    }
    return "timestamp_shift";
}

AttackFamily family_from_name(const std::string& name) {
    if (name == "timestamp_shift") return AttackFamily::TimestampShift;
    if (name == "value_uniform") return AttackFamily::ValueUniform;
    if (name == "value_proportional") return AttackFamily::ValueProportional;
    if (name == "address_substitute") return AttackFamily::AddressSubstitute;
    if (name == "untargeted_group") return AttackFamily::UntargetedGroup;
    if (name == "rule_targeted") return AttackFamily::RuleBasedTargeted;
    if (name == "fgsm") return AttackFamily::Fgsm;
    throw ConfigError("unknown attack family '" + name + "'");
}

std::string group_name(FeatureGroup g) {
    switch (g) {
        case FeatureGroup::All: return "all";
        case FeatureGroup::Address: return "address";
        case FeatureGroup::Financial: return "financial";
        case FeatureGroup::Temporal: return "temporal";
    }
    return "all";
}

FeatureGroup group_from_name(const std::string& name) {
    if (name == "all") return FeatureGroup::All;
    if (name == "address") return FeatureGroup::Address;
    if (name == "financial") return FeatureGroup::Financial;
    if (name == "temporal") return FeatureGroup::Temporal;
    throw UnknownGroupError("unknown feature group '" + name + "'");
}

std::vector<std::size_t> resolve_selection(const DatasetHandle& dataset,
                                           const RowSelection& selection) {
    std::vector<std::size_t> rows;
    const std::size_t n = dataset.size();
    switch (selection.kind) {
        case RowSelection::Kind::All:
            rows.resize(n);
            for (std::size_t i = 0; i < n; ++i) rows[i] = i;
            break;
        case RowSelection::Kind::FirstN:
            rows.resize(std::min(selection.n, n));
            for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
            break;
        case RowSelection::Kind::ByClass:
            for (std::size_t i = 0; i < n; ++i)
                if (dataset.labels[i] == selection.label) rows.push_back(i);
            break;
    }
    return rows;
}

PerturbationResult timestamp_shift(const DatasetHandle& dataset, std::int64_t shift_seconds,
                                   const RowSelection& selection, const ExecPolicy& exec) {
    PerturbationResult result;
    result.perturbed = dataset;
    result.touched_rows = resolve_selection(dataset, selection);
    result.touched_features = {ts_feature(dataset.schema)};
    result.plan.family = AttackFamily::TimestampShift;
    result.plan.shift_seconds = shift_seconds;
    result.plan.selection = selection;

    auto& out = result.perturbed;
    for_each_selected(result.touched_rows, exec,
                      [&](std::size_t r) { timestamp_ref(out, r) += shift_seconds; });
    return result;
}

PerturbationResult value_manipulate(const DatasetHandle& dataset, ValueMode mode, double pct,
                                    const RowSelection& selection, std::uint64_t seed,
                                    const ExecPolicy& exec) {
    if (pct <= 0.0) throw NegativePctError("value percentage must be > 0");

    PerturbationResult result;
    result.perturbed = dataset;
    result.touched_rows = resolve_selection(dataset, selection);
    result.touched_features = {"value"};
    result.plan.family =
        mode == ValueMode::Uniform ? AttackFamily::ValueUniform : AttackFamily::ValueProportional;
    result.plan.pct = pct;
    result.plan.max_pct = pct;
    result.plan.selection = selection;
    result.plan.seed = seed;

    auto& out = result.perturbed;
    if (mode == ValueMode::Uniform) {
        for_each_selected(result.touched_rows, exec,
                          [&](std::size_t r) { value_ref(out, r) *= (1.0 + pct); });
    } else {
        for_each_selected(result.touched_rows, exec, [&](std::size_t r) {
            Rng rng = Rng::for_row(seed, r);
            value_ref(out, r) *= (1.0 + rng.uniform(-pct, pct));
        });
    }
    return result;
}

PerturbationResult address_substitute(const DatasetHandle& dataset, AddressField field,
                                      std::size_t n_rows, AddressMode mode, std::uint64_t seed,
                                      const ExecPolicy& exec) {
    if (n_rows > dataset.size()) throw NRowsTooLargeError(n_rows, dataset.size());

    // Seeded draw of n_rows distinct rows.
    std::vector<std::size_t> all(dataset.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    Rng pick(seed ^ 0xadd2e55ULL);
    pick.shuffle(all);
    all.resize(n_rows);
    std::sort(all.begin(), all.end());

    PerturbationResult result;
    result.perturbed = dataset;
    result.touched_rows = std::move(all);
    result.touched_features = {field == AddressField::From ? from_feature(dataset.schema)
                                                           : to_feature(dataset.schema)};
    result.plan.family = AttackFamily::AddressSubstitute;
    result.plan.field = field;
    result.plan.n_rows = n_rows;
    result.plan.mode = mode;
    result.plan.seed = seed;

    auto& out = result.perturbed;
    if (mode == AddressMode::ShuffleWithin) {
        // Pool of existing addresses in first-appearance order.
        std::vector<std::string> pool;
        std::unordered_set<std::string> seen;
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            const auto addr = get_address(dataset, i, field);
            if (addr && seen.insert(*addr).second) pool.push_back(*addr);
        }
        if (pool.empty()) throw EmptyDatasetError("no addresses available for reassignment");
        if (pool.size() < 2) {
            // A single distinct address leaves nothing to reassign for
            // rows that already carry it; checked up front, never inside
            // a worker thread.
            for (std::size_t r : result.touched_rows) {
                const auto own = get_address(dataset, r, field);
                if (own && *own == pool.front()) throw NRowsTooLargeError(n_rows, pool.size());
            }
        }

        for_each_selected(result.touched_rows, exec, [&](std::size_t r) {
            const auto own = get_address(dataset, r, field);
            Rng rng = Rng::for_row(seed, r);
            std::string draw = pool[rng.below(pool.size())];
            while (own && draw == *own) draw = pool[rng.below(pool.size())];
            set_address(out, r, field, std::move(draw));
        });
    } else {
        const auto known = collect_addresses(dataset);
        for_each_selected(result.touched_rows, exec, [&](std::size_t r) {
            Rng rng = Rng::for_row(seed, r);
            set_address(out, r, field, unseen_address(rng, known));
        });
    }
    return result;
}

PerturbationResult untargeted_group(const DatasetHandle& dataset, FeatureGroup group,
                                    double noise_scale, const FeatureCodec& codec,
                                    std::uint64_t seed, const RowSelection& selection,
                                    const ExecPolicy& exec) {
    if (noise_scale <= 0.0) throw NegativePctError("noise_scale must be > 0");
    if (codec.schema != dataset.schema)
        throw SchemaMismatchError("codec schema does not match dataset schema");

    const Schema schema = dataset.schema;
    const bool multi = schema == Schema::Multi;
    const bool do_financial = group == FeatureGroup::Financial || group == FeatureGroup::All;
    const bool do_temporal = group == FeatureGroup::Temporal || group == FeatureGroup::All;
    const bool do_address = group == FeatureGroup::Address || group == FeatureGroup::All;
    const bool do_input = group == FeatureGroup::All;

    PerturbationResult result;
    result.perturbed = dataset;
    result.touched_rows = resolve_selection(dataset, selection);
    result.plan.family = AttackFamily::UntargetedGroup;
    result.plan.group = group;
    result.plan.noise_scale = noise_scale;
    result.plan.seed = seed;
    result.plan.selection = selection;

    if (do_financial) {
        result.touched_features.push_back("value");
        if (multi) {
            result.touched_features.push_back("gas");
            result.touched_features.push_back("gas_price");
        }
    }
    if (do_temporal) {
        result.touched_features.push_back(ts_feature(schema));
        result.touched_features.push_back(block_feature(schema));
    }
    if (do_address) {
        result.touched_features.push_back(from_feature(schema));
        result.touched_features.push_back(to_feature(schema));
    }
    if (do_input) result.touched_features.push_back("input");

    const double value_sigma = noise_scale * codec.raw_std("value");
    const double gas_sigma = multi ? noise_scale * codec.raw_std("gas") : 0.0;
    const double gas_price_sigma = multi ? noise_scale * codec.raw_std("gas_price") : 0.0;
    const double ts_sigma = noise_scale * codec.raw_std(ts_feature(schema));
    const double block_sigma = noise_scale * codec.raw_std(block_feature(schema));
    const auto known = do_address ? collect_addresses(dataset) : std::unordered_set<std::string>{};

    auto noisy_u64 = [](std::uint64_t v, double noise) {
        const double moved = static_cast<double>(v) + noise;
        return moved <= 0.0 ? std::uint64_t{0} : static_cast<std::uint64_t>(std::llround(moved));
    };

    auto& out = result.perturbed;
    for_each_selected(result.touched_rows, exec, [&](std::size_t r) {
        Rng rng = Rng::for_row(seed, r);
        if (do_financial) {
            double& v = value_ref(out, r);
            v = std::max(0.0, v + rng.normal(0.0, value_sigma));
            if (multi) {
                auto& rec = out.multi_rows[r];
                rec.gas = noisy_u64(rec.gas, rng.normal(0.0, gas_sigma));
                rec.gas_price = noisy_u64(rec.gas_price, rng.normal(0.0, gas_price_sigma));
            }
        }
        if (do_temporal) {
            std::int64_t& ts = timestamp_ref(out, r);
            ts = std::max<std::int64_t>(
                0, ts + static_cast<std::int64_t>(std::llround(rng.normal(0.0, ts_sigma))));
            if (multi) {
                auto& rec = out.multi_rows[r];
                rec.block_number = noisy_u64(rec.block_number, rng.normal(0.0, block_sigma));
            } else {
                auto& rec = out.binary_rows[r];
                rec.block_height = noisy_u64(rec.block_height, rng.normal(0.0, block_sigma));
            }
        }
        if (do_address) {
            set_address(out, r, AddressField::From, unseen_address(rng, known));
            set_address(out, r, AddressField::To, unseen_address(rng, known));
        }
        if (do_input) regenerate_input(out, r, rng);
    });
    return result;
}

PerturbationResult rule_based_targeted(const DatasetHandle& dataset, int target_class,
                                       const RuleMagnitudes& magnitudes, std::uint64_t seed,
                                       const RowSelection& selection, const ExecPolicy& exec) {
    if (dataset.class_counts.find(target_class) == dataset.class_counts.end() ||
        dataset.class_counts.at(target_class) == 0) {
        throw ClassAbsentError("target class " + std::to_string(target_class) +
                               " is absent from the dataset");
    }
    const Schema schema = dataset.schema;
    if (schema == Schema::Binary && target_class == kScamming)
        throw ClassAbsentError("binary datasets have no scamming class");

    PerturbationResult result;
    result.perturbed = dataset;
    result.plan.family = AttackFamily::RuleBasedTargeted;
    result.plan.target_class = target_class;
    result.plan.magnitudes = magnitudes;
    result.plan.seed = seed;
    result.plan.selection = selection;

    // Target-class scoping composes with the caller's selection.
    for (std::size_t r : resolve_selection(dataset, selection)) {
        if (dataset.labels[r] == target_class) result.touched_rows.push_back(r);
    }

    auto& out = result.perturbed;
    const auto known =
        target_class == kPhishing ? collect_addresses(dataset) : std::unordered_set<std::string>{};

    switch (target_class) {
        case kBenign:
            // Disguise-style tweaks: slight value and timestamp changes.
            result.touched_features = {"value", ts_feature(schema)};
            for_each_selected(result.touched_rows, exec, [&](std::size_t r) {
                Rng rng = Rng::for_row(seed, r);
                value_ref(out, r) *= (1.0 + rng.uniform(-magnitudes.value_pct, magnitudes.value_pct));
                timestamp_ref(out, r) +=
                    rng.range(-magnitudes.timestamp_seconds, magnitudes.timestamp_seconds);
            });
            break;
        case kPhishing:
            // Fresh endpoints plus a small value adjustment.
            result.touched_features = {from_feature(schema), to_feature(schema), "value"};
            for_each_selected(result.touched_rows, exec, [&](std::size_t r) {
                Rng rng = Rng::for_row(seed, r);
                set_address(out, r, AddressField::From, unseen_address(rng, known));
                set_address(out, r, AddressField::To, unseen_address(rng, known));
                value_ref(out, r) *= (1.0 + rng.uniform(-magnitudes.value_pct, magnitudes.value_pct));
            });
            break;
        case kScamming:
            // Obscure transaction costs.
            result.touched_features = {"gas", "gas_price"};
            for_each_selected(result.touched_rows, exec, [&](std::size_t r) {
                Rng rng = Rng::for_row(seed, r);
                auto& rec = out.multi_rows[r];
                const double gas_factor = 1.0 + rng.uniform(-magnitudes.gas_pct, magnitudes.gas_pct);
                const double price_factor = 1.0 + rng.uniform(-magnitudes.gas_pct, magnitudes.gas_pct);
                rec.gas = static_cast<std::uint64_t>(
                    std::llround(static_cast<double>(rec.gas) * gas_factor));
                rec.gas_price = static_cast<std::uint64_t>(
                    std::llround(static_cast<double>(rec.gas_price) * price_factor));
            });
            break;
        default:
            throw ClassAbsentError("no rule-based plan for class " + std::to_string(target_class));
    }
    return result;
}

std::vector<std::string> default_fgsm_mask(Schema schema) {
    if (schema == Schema::Binary) return {"value", "timestamp"};
    return {"value", "gas", "gas_price", "block_timestamp"};
}

std::vector<std::size_t> resolve_feature_mask(const FeatureCodec& codec,
                                              const std::vector<std::string>& names) {
    if (names.empty()) throw EmptyMaskError("feature mask is empty");
    std::vector<std::size_t> cols;
    for (const auto& name : names) {
        const int idx = codec.feature_index(name);
        if (idx < 0) throw SchemaMismatchError("mask names unknown feature '" + name + "'");
        cols.push_back(static_cast<std::size_t>(idx));
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    return cols;
}

Matrix fgsm(const Matrix& rows, const std::vector<int>& labels, const SoftmaxSurrogate& surrogate,
            double epsilon, const std::vector<std::size_t>& mask_columns,
            const std::vector<double>& clip_min, const std::vector<double>& clip_max) {
    if (epsilon <= 0.0) throw PreconditionError("epsilon must be > 0");
    if (mask_columns.empty()) throw EmptyMaskError("feature mask is empty");
    if (rows.rows != labels.size())
        throw LengthMismatchError("rows and labels differ in length");
    if (rows.rows > 0 && rows.cols != surrogate.n_features())
        throw WidthMismatchError(surrogate.n_features(), rows.cols);
    if (clip_min.size() != rows.cols || clip_max.size() != rows.cols)
        throw WidthMismatchError(rows.cols, clip_min.size());
    for (std::size_t c : mask_columns) {
        if (c >= rows.cols) throw WidthMismatchError(rows.cols, c);
    }

    Matrix out = rows;
    for (std::size_t r = 0; r < rows.rows; ++r) {
        const auto grad = surrogate.input_gradient(rows.row(r), labels[r]);
        for (std::size_t c : mask_columns) {
            const double g = grad[c];
            const double sign = g > 0.0 ? 1.0 : (g < 0.0 ? -1.0 : 0.0);
            const double moved = rows.at(r, c) + epsilon * sign;
            out.at(r, c) = std::clamp(moved, clip_min[c], clip_max[c]);
        }
    }
    return out;
}

FgsmPlanResult apply_fgsm_plan(const Matrix& encoded, const std::vector<int>& labels,
                               const AttackPlan& plan, const FeatureCodec& codec,
                               const SoftmaxSurrogate& surrogate) {
    const auto mask_names =
        plan.feature_mask.empty() ? default_fgsm_mask(codec.schema) : plan.feature_mask;
    const auto mask = resolve_feature_mask(codec, mask_names);

    std::vector<double> clip_min(codec.n_features()), clip_max(codec.n_features());
    for (std::size_t f = 0; f < codec.n_features(); ++f) {
        clip_min[f] = codec.features[f].train_min;
        clip_max[f] = codec.features[f].train_max;
    }

    // Resolve the selection against the label vector.
    std::vector<std::size_t> rows;
    switch (plan.selection.kind) {
        case RowSelection::Kind::All:
            rows.resize(encoded.rows);
            for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
            break;
        case RowSelection::Kind::FirstN:
            rows.resize(std::min(plan.selection.n, encoded.rows));
            for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
            break;
        case RowSelection::Kind::ByClass:
            for (std::size_t i = 0; i < encoded.rows; ++i)
                if (labels[i] == plan.selection.label) rows.push_back(i);
            break;
    }

    Matrix selected = encoded.select_rows(rows);
    std::vector<int> selected_labels;
    selected_labels.reserve(rows.size());
    for (std::size_t r : rows) selected_labels.push_back(labels[r]);

    const Matrix perturbed = fgsm(selected, selected_labels, surrogate, plan.epsilon, mask,
                                  clip_min, clip_max);

    FgsmPlanResult result;
    result.rows = encoded;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < encoded.cols; ++c)
            result.rows.at(rows[i], c) = perturbed.at(i, c);
    }
    result.touched_rows = std::move(rows);
    for (std::size_t c : mask) result.touched_features.push_back(codec.features[c].name);
    return result;
}

PerturbationResult apply_plan(const DatasetHandle& dataset, const AttackPlan& plan,
                              const FeatureCodec* codec, const ExecPolicy& exec) {
    PerturbationResult result;
    switch (plan.family) {
        case AttackFamily::TimestampShift:
            result = timestamp_shift(dataset, plan.shift_seconds, plan.selection, exec);
            break;
        case AttackFamily::ValueUniform:
            result = value_manipulate(dataset, ValueMode::Uniform, plan.pct, plan.selection,
                                      plan.seed, exec);
            break;
        case AttackFamily::ValueProportional:
            result = value_manipulate(dataset, ValueMode::Proportional, plan.max_pct,
                                      plan.selection, plan.seed, exec);
            break;
        case AttackFamily::AddressSubstitute:
            result = address_substitute(dataset, plan.field, plan.n_rows, plan.mode, plan.seed, exec);
            break;
        case AttackFamily::UntargetedGroup:
            if (codec == nullptr)
                throw PreconditionError("untargeted_group needs a fitted codec for noise scales");
            result = untargeted_group(dataset, plan.group, plan.noise_scale, *codec, plan.seed,
                                      plan.selection, exec);
            break;
        case AttackFamily::RuleBasedTargeted:
            result = rule_based_targeted(dataset, plan.target_class, plan.magnitudes, plan.seed,
                                         plan.selection, exec);
            break;
        case AttackFamily::Fgsm:
            throw PreconditionError("fgsm operates on encoded rows; use apply_fgsm_plan");
    }
    result.plan = plan;
    return result;
}

std::string AttackPlan::name() const {
    std::string slug = family_name(family);
    switch (family) {
        case AttackFamily::TimestampShift:
            slug += (shift_seconds >= 0 ? "_+" : "_") + std::to_string(shift_seconds);
            break;
        case AttackFamily::ValueUniform:
            slug += "_" + format_double(pct);
            break;
        case AttackFamily::ValueProportional:
            slug += "_" + format_double(max_pct);
            break;
        case AttackFamily::AddressSubstitute:
            slug += std::string("_") + (field == AddressField::From ? "from" : "to") +
                    (mode == AddressMode::UnseenRandomHex ? "_unseen_" : "_shuffle_") +
                    std::to_string(n_rows);
            break;
        case AttackFamily::UntargetedGroup:
            slug += "_" + group_name(group) + "_" + format_double(noise_scale);
            break;
        case AttackFamily::RuleBasedTargeted:
            slug += "_class" + std::to_string(target_class);
            break;
        case AttackFamily::Fgsm:
            slug += "_eps" + format_double(epsilon);
            break;
    }
    if (selection.kind == RowSelection::Kind::FirstN)
        slug += "_first" + std::to_string(selection.n);
    else if (selection.kind == RowSelection::Kind::ByClass)
        slug += "_label" + std::to_string(selection.label);
    return slug;
}

std::string perturbation_sidecar_json(const PerturbationResult& result, Schema schema) {
    json j;
    j["plan"] = json::parse(plan_to_json(result.plan, schema));
    j["touched_rows"] = result.touched_rows;
    j["touched_features"] = result.touched_features;
    return j.dump(2);
}

}  // namespace txadv
