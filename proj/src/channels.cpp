#include "metaglyph/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace metaglyph {

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::SizeArea: return "size_area";
    case Channel::SizeLength: return "size_length";
    case Channel::SizeHeight: return "size_height";
    case Channel::ColorHue: return "color_hue";
    case Channel::ColorLightness: return "color_lightness";
    case Channel::Angle: return "angle";
    case Channel::Rotation: return "rotation";
    case Channel::PositionOffset: return "position_offset";
  }
  return "size_area";
}

std::optional<Channel> channel_from_string(std::string_view s) {
  for (auto c : {Channel::SizeArea, Channel::SizeLength, Channel::SizeHeight, Channel::ColorHue,
                 Channel::ColorLightness, Channel::Angle, Channel::Rotation, Channel::PositionOffset})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

const ChannelTable& ChannelTable::defaults() {
  static const ChannelTable t;
  return t;
}

bool is_size_channel(Channel c) {
  return c == Channel::SizeArea || c == Channel::SizeLength || c == Channel::SizeHeight;
}

Channel primary_size_channel(const StructureInfo& s) {
  if (s.structure == Structure::Radial) return Channel::SizeArea;
  return std::abs(s.slope) <= 1.0 ? Channel::SizeLength : Channel::SizeHeight;
}

std::optional<Channel> secondary_size_channel(const StructureInfo& s) {
  if (s.structure == Structure::Radial) return std::nullopt;
  return primary_size_channel(s) == Channel::SizeLength ? Channel::SizeHeight : Channel::SizeLength;
}

bool uses_numerical_channels(DataType t) { return t == DataType::Numerical || t == DataType::Temporal; }

std::optional<std::vector<Channel>> allocate_channels(const ChannelTable& table, const StructureInfo& structure,
                                                      std::span<const ChannelRequest> requests) {
  std::vector<std::size_t> order(requests.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return requests[a].priority > requests[b].priority; });

  auto resolve = [&](ChannelSlot slot) -> std::optional<Channel> {
    switch (slot) {
      case ChannelSlot::Size: return primary_size_channel(structure);
      case ChannelSlot::SecondarySize: return secondary_size_channel(structure);
      case ChannelSlot::Angle: return Channel::Angle;
      case ChannelSlot::ColorLightness: return Channel::ColorLightness;
      case ChannelSlot::ColorHue: return Channel::ColorHue;
      case ChannelSlot::Rotation: return Channel::Rotation;
      case ChannelSlot::PositionOffset: return Channel::PositionOffset;
    }
    return std::nullopt;
  };

  std::vector<Channel> used;
  auto is_free = [&](Channel c) {
    for (Channel u : used) {
      if (u == c) return false;
      const bool turn_u = u == Channel::Angle || u == Channel::Rotation;
      const bool turn_c = c == Channel::Angle || c == Channel::Rotation;
      if (turn_u && turn_c) return false;
      if (u == Channel::SizeArea && is_size_channel(c)) return false;
      if (c == Channel::SizeArea && is_size_channel(u)) return false;
    }
    return true;
  };

  std::vector<Channel> out(requests.size(), Channel::SizeArea);
  for (std::size_t i : order) {
    const auto& slots = uses_numerical_channels(requests[i].type) ? table.numerical : table.categorical;
    std::optional<Channel> pick;
    for (auto slot : slots) {
      auto c = resolve(slot);
      if (c && is_free(*c)) {
        pick = c;
        break;
      }
    }
    if (!pick) return std::nullopt;
    used.push_back(*pick);
    out[i] = *pick;
  }
  return out;
}

}  // namespace metaglyph
