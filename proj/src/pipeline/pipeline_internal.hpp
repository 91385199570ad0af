#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "srs/pipeline.hpp"

namespace srs::detail {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);
double uniform_in(Rng& rng, const std::array<double, 2>& range);

/// Temperature constants with velocity_unit resolved to the thermal velocity.
TemperatureSpec resolved_spec(const ExperimentConfig& cfg);

Family family_for(ExperimentKind k);

/// max |learned - truth| over the model parameters; NaN without a comparable truth.
double parameter_error(const ModelDescriptor& learned, const std::optional<ModelDescriptor>& truth);

}  // namespace srs::detail
