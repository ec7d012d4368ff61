#pragma once

#include <array>
#include <string>
#include <vector>

#include "bestofn/abm/types.hpp"

namespace bestofn::codec {

/// One agent as the one-hot relation row: quality, seven state indicator
/// bits in the order R, A, T_HR, T_S, O, E, T_HO, and the agent id (the id
/// is dropped at canonicalization).
struct OneHotRecord {
  double quality = 0.0;
  std::array<int, 7> indicators{};
  int agent_id = 0;
};

/// One agent as the float tuple [q, S, x_s, y_s]: state code on the k/6
/// grid and the favored site's coordinates normalized by max_distance
/// (zeros when no site is favored).
struct FloatRecord {
  double quality = 0.0;
  double state_code = 0.0;
  double site_x = 0.0;
  double site_y = 0.0;
};

constexpr int kOneHotWidth = 8;  // after id removal
constexpr int kFloatWidth = 4;
constexpr int kMaxAgents = 10;
constexpr std::array<double, 4> kPaddingRecord{0.0, 1.0, 1.0, 1.0};

enum class Encoding { OneHot, Float };

const char* to_string(Encoding e);

/// Canonical anonymized collective state: sorted id-free records,
/// concatenated into one flat value vector.
struct StateTensor {
  Encoding encoding = Encoding::Float;
  int record_width = kFloatWidth;
  std::vector<double> values;

  int record_count() const { return static_cast<int>(values.size()) / record_width; }
  bool operator==(const StateTensor& o) const = default;
};

/// Float code for a state: R=0/6, A=1/6, T_HR=2/6, T_S=3/6, O=4/6, E=5/6,
/// T_HO=6/6.
double state_to_float(abm::AgentState state);

std::vector<OneHotRecord> encode_onehot(const abm::Snapshot& colony, const abm::WorldConfig& world);

std::vector<FloatRecord> encode_float_records(const abm::Snapshot& colony,
                                              const abm::WorldConfig& world);

/// Sorts records ascending lexicographically, drops ids, concatenates.
StateTensor canonicalize(std::vector<OneHotRecord> records);
StateTensor canonicalize(std::vector<FloatRecord> records);

/// Full float encoding: canonicalized real records followed by
/// (max_agents - K) copies of the [0, 1, 1, 1] padding record. Always
/// max_agents * 4 values. Throws when K exceeds max_agents.
StateTensor encode_float(const abm::Snapshot& colony, const abm::WorldConfig& world,
                         int max_agents = kMaxAgents);

/// Convenience: canonical one-hot tensor of a snapshot.
StateTensor encode_onehot_tensor(const abm::Snapshot& colony, const abm::WorldConfig& world);

/// Stable 64-bit content hash over the exact bit patterns, hex encoded.
/// Throws std::invalid_argument when the tensor is not canonical (records
/// out of order, malformed padding, or a broken one-hot row).
std::string tensor_key(const StateTensor& tensor);

}  // namespace bestofn::codec
