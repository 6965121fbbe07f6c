#pragma once

#include <array>
#include <string_view>

namespace mazenet {

// Auxiliary external-input method.
enum class Method { None, Cluster, ClusterDuringEpochs, Submaze, Euclidean };

inline constexpr std::array<Method, 5> kMethods = {Method::None, Method::Cluster,
                                                   Method::ClusterDuringEpochs, Method::Submaze,
                                                   Method::Euclidean};

std::string_view to_string(Method m) noexcept;

// Accepts the names printed by to_string; throws ArgumentError otherwise.
Method parse_method(std::string_view name);

// Whether the method feeds a third per-cell input into the network.
constexpr bool uses_aux_input(Method m) noexcept {
  return m == Method::Cluster || m == Method::ClusterDuringEpochs || m == Method::Euclidean;
}

constexpr int external_inputs_for(Method m) noexcept { return uses_aux_input(m) ? 3 : 2; }

}  // namespace mazenet
