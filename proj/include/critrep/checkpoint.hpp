#pragma once

#include <filesystem>
#include <variant>

#include "critrep/mlp.hpp"
#include "critrep/rbm.hpp"

namespace critrep {

// Checkpoint byte layout (all integers uint32 little-endian, all reals
// IEEE-754 binary64 little-endian):
//
//   offset 0   magic "CRCK"
//          4   version (1)
//          8   kind: 1 = MLP, 2 = RBM
//         12   activation: 0 = sigmoid, 1 = relu (RBM: 0)
//         16   head: 0 = softmax classifier, 1 = reconstruction (RBM: 0)
//         20   n_dims
//         24   dims[n_dims]
//   then, MLP: for each layer l, weights dims[l] x dims[l+1] row-major,
//              followed by bias[dims[l+1]]
//         RBM: dims = [n_visible, n_hidden]; weights n_visible x n_hidden
//              row-major, visible_bias, hidden_bias

inline constexpr std::uint32_t kCheckpointVersion = 1;

using AnyModel = std::variant<MlpModel, RbmModel>;

void write_checkpoint(const std::filesystem::path& path, const MlpModel& m);
void write_checkpoint(const std::filesystem::path& path, const RbmModel& r);
AnyModel read_checkpoint(const std::filesystem::path& path);

}  // namespace critrep
