#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "metaglyph/dataset.hpp"
#include "metaglyph/metaphor.hpp"

namespace metaglyph {

enum class Channel { SizeArea, SizeLength, SizeHeight, ColorHue, ColorLightness, Angle, Rotation, PositionOffset };

std::string_view to_string(Channel c);
std::optional<Channel> channel_from_string(std::string_view s);

/// Abstract channel slots, in corpus frequency order per data kind. `Size`
/// and `SecondarySize` are specialized by image structure.
enum class ChannelSlot { Size, SecondarySize, Angle, ColorLightness, ColorHue, Rotation, PositionOffset };

struct ChannelTable {
  std::vector<ChannelSlot> numerical{ChannelSlot::Size, ChannelSlot::SecondarySize, ChannelSlot::Angle,
                                     ChannelSlot::ColorLightness};
  std::vector<ChannelSlot> categorical{ChannelSlot::ColorHue, ChannelSlot::Rotation, ChannelSlot::PositionOffset};

  static const ChannelTable& defaults();
};

bool is_size_channel(Channel c);

/// radial → area; non-radial with |k| <= 1 → length; otherwise height.
Channel primary_size_channel(const StructureInfo& s);
/// The other extent for non-radial images; none for radial ones (area already uses both).
std::optional<Channel> secondary_size_channel(const StructureInfo& s);

/// Numerical and temporal data use the numerical list; categorical and
/// geospatial data use the categorical list.
bool uses_numerical_channels(DataType t);

struct ChannelRequest {
  DataType type{DataType::Numerical};
  double priority{0};  // I·S; higher picks first
};

/// Greedy assignment of channels for several dimensions sharing one element:
/// in descending priority (stable on ties), each takes the first free channel
/// of its kind. Angle and Rotation both turn the element, so they exclude each
/// other. Returns channels in request order, or nullopt when a request finds
/// no free channel.
std::optional<std::vector<Channel>> allocate_channels(const ChannelTable& table, const StructureInfo& structure,
                                                      std::span<const ChannelRequest> requests);

}  // namespace metaglyph
