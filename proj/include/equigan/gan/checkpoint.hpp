#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "equigan/gan/generate.hpp"

namespace equigan::gan {

/// Everything needed to resume or generate from one trained stage.
struct Checkpoint {
  StageConfig config;
  ModelParams params;
  std::vector<AtomDescriptor> vocab;
  /// Node counts of the training graphs, for stage-1 skeleton sampling.
  std::vector<int> node_counts;
};

/// Layout, all integers little-endian:
///   "EQGANCK\0", u32 version, u8 stage, u64 config digest,
///   u32-length-prefixed config text, vocab, node counts,
///   then named blocks: u32 name length, name, u64 rows, u64 cols, rows*cols f64 row-major.
/// Generator blocks are named "g/<param>", critic blocks "d/<param>".
void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
/// Throws BadCheckpoint on a bad header, a digest that does not match the
/// stored config, or truncated data.
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

inline constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace equigan::gan
