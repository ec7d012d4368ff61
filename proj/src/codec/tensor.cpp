#include "bestofn/codec/tensor.hpp"

#include <algorithm>
#include <stdexcept>

#include "bestofn/core/hash.hpp"

namespace bestofn::codec {

const char* to_string(Encoding e) { return e == Encoding::OneHot ? "onehot" : "float"; }

double state_to_float(abm::AgentState state) {
  using abm::AgentState;
  switch (state) {
    case AgentState::Recruit: return 0.0 / 6.0;
    case AgentState::Assess: return 1.0 / 6.0;
    case AgentState::TravelHubRecruit: return 2.0 / 6.0;
    case AgentState::TravelSite: return 3.0 / 6.0;
    case AgentState::Observe: return 4.0 / 6.0;
    case AgentState::Explore: return 5.0 / 6.0;
    case AgentState::TravelHubObserve: return 6.0 / 6.0;
  }
  throw std::logic_error("unreachable agent state");
}

namespace {

// Indicator column for a state in the Q,R,A,T_HR,T_S,O,E,T_HO relation order.
int indicator_index(abm::AgentState state) {
  using abm::AgentState;
  switch (state) {
    case AgentState::Recruit: return 0;
    case AgentState::Assess: return 1;
    case AgentState::TravelHubRecruit: return 2;
    case AgentState::TravelSite: return 3;
    case AgentState::Observe: return 4;
    case AgentState::Explore: return 5;
    case AgentState::TravelHubObserve: return 6;
  }
  throw std::logic_error("unreachable agent state");
}

double favored_quality(const abm::Agent& agent, const abm::WorldConfig& world) {
  if (!agent.favored_site) return 0.0;
  return world.site(*agent.favored_site).quality;
}

}  // namespace

std::vector<OneHotRecord> encode_onehot(const abm::Snapshot& colony,
                                        const abm::WorldConfig& world) {
  std::vector<OneHotRecord> records;
  records.reserve(colony.size());
  for (const auto& agent : colony) {
    OneHotRecord rec;
    rec.quality = favored_quality(agent, world);
    rec.indicators[static_cast<std::size_t>(indicator_index(agent.state))] = 1;
    rec.agent_id = agent.id;
    records.push_back(rec);
  }
  return records;
}

std::vector<FloatRecord> encode_float_records(const abm::Snapshot& colony,
                                              const abm::WorldConfig& world) {
  std::vector<FloatRecord> records;
  records.reserve(colony.size());
  for (const auto& agent : colony) {
    FloatRecord rec;
    rec.quality = favored_quality(agent, world);
    rec.state_code = state_to_float(agent.state);
    if (agent.favored_site) {
      const auto& site = world.site(*agent.favored_site);
      rec.site_x = site.position.x / world.max_distance;
      rec.site_y = site.position.y / world.max_distance;
    }
    records.push_back(rec);
  }
  return records;
}

StateTensor canonicalize(std::vector<OneHotRecord> records) {
  std::vector<std::array<double, kOneHotWidth>> rows;
  rows.reserve(records.size());
  for (const auto& rec : records) {
    std::array<double, kOneHotWidth> row;
    row[0] = rec.quality;
    for (int i = 0; i < 7; ++i) row[static_cast<std::size_t>(1 + i)] = rec.indicators[static_cast<std::size_t>(i)];
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end());
  StateTensor tensor;
  tensor.encoding = Encoding::OneHot;
  tensor.record_width = kOneHotWidth;
  tensor.values.reserve(rows.size() * kOneHotWidth);
  for (const auto& row : rows) tensor.values.insert(tensor.values.end(), row.begin(), row.end());
  return tensor;
}

StateTensor canonicalize(std::vector<FloatRecord> records) {
  std::vector<std::array<double, kFloatWidth>> rows;
  rows.reserve(records.size());
  for (const auto& rec : records) {
    rows.push_back({rec.quality, rec.state_code, rec.site_x, rec.site_y});
  }
  std::sort(rows.begin(), rows.end());
  StateTensor tensor;
  tensor.encoding = Encoding::Float;
  tensor.record_width = kFloatWidth;
  tensor.values.reserve(rows.size() * kFloatWidth);
  for (const auto& row : rows) tensor.values.insert(tensor.values.end(), row.begin(), row.end());
  return tensor;
}

StateTensor encode_float(const abm::Snapshot& colony, const abm::WorldConfig& world,
                         int max_agents) {
  if (static_cast<int>(colony.size()) > max_agents) {
    throw std::length_error("colony of " + std::to_string(colony.size()) +
                            " agents exceeds the encoder capacity of " +
                            std::to_string(max_agents));
  }
  StateTensor tensor = canonicalize(encode_float_records(colony, world));
  // Padding goes after the sorted real records, never interleaved.
  for (int i = static_cast<int>(colony.size()); i < max_agents; ++i) {
    tensor.values.insert(tensor.values.end(), kPaddingRecord.begin(), kPaddingRecord.end());
  }
  return tensor;
}

StateTensor encode_onehot_tensor(const abm::Snapshot& colony, const abm::WorldConfig& world) {
  return canonicalize(encode_onehot(colony, world));
}

namespace {

bool is_padding_row(const double* row) {
  for (int i = 0; i < kFloatWidth; ++i) {
    if (row[i] != kPaddingRecord[static_cast<std::size_t>(i)]) return false;
  }
  return true;
}

void validate_canonical(const StateTensor& tensor) {
  if (tensor.record_width <= 0 ||
      static_cast<int>(tensor.values.size()) % tensor.record_width != 0) {
    throw std::invalid_argument("tensor length is not a multiple of the record width");
  }
  const int width = tensor.record_width;
  const int count = tensor.record_count();

  if (tensor.encoding == Encoding::OneHot) {
    if (width != kOneHotWidth) throw std::invalid_argument("one-hot records must be 8 wide");
    for (int r = 0; r < count; ++r) {
      const double* row = tensor.values.data() + static_cast<std::size_t>(r) * width;
      int ones = 0;
      for (int i = 1; i < width; ++i) {
        if (row[i] != 0.0 && row[i] != 1.0) throw std::invalid_argument("indicator must be 0 or 1");
        ones += row[i] == 1.0;
      }
      if (ones != 1) throw std::invalid_argument("exactly one state indicator must be set");
      if (row[0] < 0.0 || row[0] > 1.0) throw std::invalid_argument("quality out of [0,1]");
    }
    for (int r = 1; r < count; ++r) {
      const double* prev = tensor.values.data() + static_cast<std::size_t>(r - 1) * width;
      const double* row = tensor.values.data() + static_cast<std::size_t>(r) * width;
      if (std::lexicographical_compare(row, row + width, prev, prev + width)) {
        throw std::invalid_argument("records are not sorted; tensor is not canonical");
      }
    }
    return;
  }

  if (width != kFloatWidth) throw std::invalid_argument("float records must be 4 wide");
  int first_padding = count;
  for (int r = 0; r < count; ++r) {
    const double* row = tensor.values.data() + static_cast<std::size_t>(r) * width;
    if (is_padding_row(row)) {
      first_padding = r;
      break;
    }
  }
  for (int r = first_padding; r < count; ++r) {
    const double* row = tensor.values.data() + static_cast<std::size_t>(r) * width;
    if (!is_padding_row(row)) {
      throw std::invalid_argument("real record after padding; tensor is not canonical");
    }
  }
  for (int r = 1; r < first_padding; ++r) {
    const double* prev = tensor.values.data() + static_cast<std::size_t>(r - 1) * width;
    const double* row = tensor.values.data() + static_cast<std::size_t>(r) * width;
    if (std::lexicographical_compare(row, row + width, prev, prev + width)) {
      throw std::invalid_argument("records are not sorted; tensor is not canonical");
    }
  }
}

}  // namespace

std::string tensor_key(const StateTensor& tensor) {
  validate_canonical(tensor);
  Fnv1a64 hash;
  hash.update_u8(tensor.encoding == Encoding::OneHot ? 0 : 1);
  hash.update_u8(static_cast<std::uint8_t>(tensor.record_width));
  hash.update_u32(static_cast<std::uint32_t>(tensor.values.size()));
  for (double v : tensor.values) hash.update_double(v);
  return hash.hex();
}

}  // namespace bestofn::codec
