#pragma once

#include <filesystem>

#include <json.hpp>

#include "jk/kernels.hpp"

// JSON forms of kernels and models. Doubles are written in shortest
// round-trip form, so save followed by load is bit-exact.
//
// KernelSpec: {"n": int, "kind": string, "layers": [{"p": int, "beta": [..]}]}.
// A layer's beta is given on the canonical layer (n - p + 1 entries when
// p > n/2); p + 1 entries are also accepted and converted.
//
// TrainedModel: {"spec": KernelSpec, "support": [bitstrings], "alphas": [..]}.

namespace jk {

using Json = nlohmann::json;

Json to_json(const KernelSpec& spec);
KernelSpec kernel_spec_from_json(const Json& j);

Json to_json(const TrainedModel& model);
TrainedModel trained_model_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const Json& j, const std::filesystem::path& path);

}  // namespace jk
