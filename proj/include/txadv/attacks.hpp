#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "txadv/dataset.hpp"
#include "txadv/matrix.hpp"
#include "txadv/models.hpp"
#include "txadv/preprocess.hpp"

namespace txadv {

enum class AttackFamily {
    TimestampShift,
    ValueUniform,
    ValueProportional,
    AddressSubstitute,
    UntargetedGroup,
    RuleBasedTargeted,
    Fgsm,
};

std::string family_name(AttackFamily f);
AttackFamily family_from_name(const std::string& name);

enum class AddressField { From, To };
enum class AddressMode { ShuffleWithin, UnseenRandomHex };
enum class FeatureGroup { All, Address, Financial, Temporal };

FeatureGroup group_from_name(const std::string& name);
std::string group_name(FeatureGroup g);

struct RowSelection {
    enum class Kind { All, FirstN, ByClass };
    Kind kind = Kind::All;
    std::size_t n = 0;
    int label = 0;
};

// Predefined shift intervals: +24 h, +1 h, +30 min, +15 min, +5 min.
inline constexpr std::array<std::int64_t, 5> kAllowedTimestampShifts = {86400, 3600, 1800, 900, 300};

struct RuleMagnitudes {
    double value_pct = 0.01;
    double gas_pct = 0.01;
    std::int64_t timestamp_seconds = 300;
};

// A plan fully determines the perturbed dataset given the input dataset
// and codec.
struct AttackPlan {
    AttackFamily family = AttackFamily::TimestampShift;
    RowSelection selection;
    std::uint64_t seed = 0;

    // timestamp_shift
    std::int64_t shift_seconds = 86400;
    bool custom_shift = false;
    // value manipulation
    double pct = 0.01;      // uniform
    double max_pct = 0.01;  // proportional
    // address substitution
    AddressField field = AddressField::To;
    std::size_t n_rows = 0;
    AddressMode mode = AddressMode::ShuffleWithin;
    // untargeted group
    FeatureGroup group = FeatureGroup::All;
    double noise_scale = 0.5;
    // rule-based targeted
    int target_class = 0;
    RuleMagnitudes magnitudes;
    // fgsm
    double epsilon = 0.1;
    std::vector<std::string> feature_mask;  // empty selects the schema default

    std::string name() const;  // stable slug used for artifact file names
};

std::string plan_to_json(const AttackPlan& plan, Schema schema);
AttackPlan plan_from_json(const std::string& text, Schema schema);

struct ExecPolicy {
    int threads = 1;  // > 1 shards selected rows across std::thread
};

struct PerturbationResult {
    DatasetHandle perturbed;
    std::vector<std::size_t> touched_rows;        // ascending
    std::vector<std::string> touched_features;    // canonical field names
    AttackPlan plan;
};

// Raw-record attack families. Rows outside the selection are copied
// bit-identically; only the listed features change within touched rows.
PerturbationResult timestamp_shift(const DatasetHandle& dataset, std::int64_t shift_seconds,
                                   const RowSelection& selection, const ExecPolicy& exec = {});

enum class ValueMode { Uniform, Proportional };
PerturbationResult value_manipulate(const DatasetHandle& dataset, ValueMode mode, double pct,
                                    const RowSelection& selection, std::uint64_t seed,
                                    const ExecPolicy& exec = {});

PerturbationResult address_substitute(const DatasetHandle& dataset, AddressField field,
                                      std::size_t n_rows, AddressMode mode, std::uint64_t seed,
                                      const ExecPolicy& exec = {});

// Additive Gaussian noise (sigma = noise_scale x train std) on the group's
// numeric features; address features in the group become unseen hex.
PerturbationResult untargeted_group(const DatasetHandle& dataset, FeatureGroup group,
                                    double noise_scale, const FeatureCodec& codec,
                                    std::uint64_t seed, const RowSelection& selection = {},
                                    const ExecPolicy& exec = {});

PerturbationResult rule_based_targeted(const DatasetHandle& dataset, int target_class,
                                       const RuleMagnitudes& magnitudes, std::uint64_t seed,
                                       const RowSelection& selection = {},
                                       const ExecPolicy& exec = {});

// x' = clip(x + epsilon * sign(dJ/dx)) on masked columns; sign(0)
// contributes 0 and clipping uses the per-feature train range.
Matrix fgsm(const Matrix& rows, const std::vector<int>& labels, const SoftmaxSurrogate& surrogate,
            double epsilon, const std::vector<std::size_t>& mask_columns,
            const std::vector<double>& clip_min, const std::vector<double>& clip_max);

std::vector<std::string> default_fgsm_mask(Schema schema);
std::vector<std::size_t> resolve_feature_mask(const FeatureCodec& codec,
                                              const std::vector<std::string>& names);

struct FgsmPlanResult {
    Matrix rows;  // full matrix; unselected rows identical to the input
    std::vector<std::size_t> touched_rows;
    std::vector<std::string> touched_features;
};

FgsmPlanResult apply_fgsm_plan(const Matrix& encoded, const std::vector<int>& labels,
                               const AttackPlan& plan, const FeatureCodec& codec,
                               const SoftmaxSurrogate& surrogate);

// Dispatches a raw-record plan. The codec is required by untargeted_group.
PerturbationResult apply_plan(const DatasetHandle& dataset, const AttackPlan& plan,
                              const FeatureCodec* codec, const ExecPolicy& exec = {});

std::vector<std::size_t> resolve_selection(const DatasetHandle& dataset,
                                           const RowSelection& selection);

// Sidecar describing a perturbation, written next to exported CSVs.
std::string perturbation_sidecar_json(const PerturbationResult& result, Schema schema);

}  // namespace txadv
