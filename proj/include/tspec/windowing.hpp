#pragma once

#include "tspec/ingest.hpp"
#include "tspec/matrix.hpp"

#include <cstdint>
#include <vector>

namespace tspec {

// One sliding-window position: W packet rows and their W label bits.
struct TrafficWindow {
    std::size_t start_index = 0;
    Matrix traffic;  // W x F, rows in packet order
    std::vector<std::uint8_t> labels;
    std::vector<int> attacks;  // per-row attack index, -1 for normal

    std::size_t size() const { return labels.size(); }
    // Attack that contributes most label-1 packets (lowest index on ties),
    // or -1 when the window holds no attack packet.
    int dominant_attack() const;
};

// Windows start at 0, stride, 2*stride, ... over the records in order.
// Trailing positions that would not fit a full window are dropped.
std::vector<TrafficWindow> make_windows(const PacketTimeline& timeline, std::size_t window_size,
                                        std::size_t stride = 1);

inline std::size_t window_count(std::size_t length, std::size_t window_size, std::size_t stride)
{
    return length < window_size ? 0 : (length - window_size) / stride + 1;
}

// Row-major concatenation: element p*F + j is feature j of packet p.
std::vector<double> flatten(const TrafficWindow& window);

// Inverse of flatten for a known row width.
Matrix unflatten(std::span<const double> values, std::size_t feature_count);

}  // namespace tspec
