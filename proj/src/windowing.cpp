#include "tspec/windowing.hpp"

#include "tspec/error.hpp"

#include <map>
#include <string>

namespace tspec {

int TrafficWindow::dominant_attack() const
{
    std::map<int, std::size_t> counts;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] && attacks[i] >= 0)
            ++counts[attacks[i]];
    int best = -1;
    std::size_t best_count = 0;
    for (const auto& [attack, n] : counts) {
        if (n > best_count) {
            best = attack;
            best_count = n;
        }
    }
    return best;
}

std::vector<TrafficWindow> make_windows(const PacketTimeline& timeline, std::size_t window_size, std::size_t stride)
{
    if (window_size < 1)
        throw ConfigError("make_windows: window size must be >= 1");
    if (stride < 1)
        throw ConfigError("make_windows: stride must be >= 1");
    const std::size_t n = timeline.size();
    if (n < window_size)
        throw DataError("make_windows: timeline has " + std::to_string(n) + " records, fewer than window size " +
                        std::to_string(window_size));

    const std::size_t f = timeline.feature_count();
    const std::size_t count = window_count(n, window_size, stride);
    std::vector<TrafficWindow> windows;
    windows.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        TrafficWindow win;
        win.start_index = w * stride;
        win.traffic = Matrix(window_size, f);
        win.labels.resize(window_size);
        win.attacks.resize(window_size);
        for (std::size_t p = 0; p < window_size; ++p) {
            const auto& rec = timeline.records[win.start_index + p];
            std::copy(rec.features.begin(), rec.features.end(), win.traffic.row(p).begin());
            win.labels[p] = rec.label;
            win.attacks[p] = rec.label ? rec.attack : -1;
        }
        windows.push_back(std::move(win));
    }
    return windows;
}

std::vector<double> flatten(const TrafficWindow& window)
{
    return window.traffic.data();
}

Matrix unflatten(std::span<const double> values, std::size_t feature_count)
{
    if (feature_count == 0 || values.size() % feature_count != 0)
        throw ConfigError("unflatten: length " + std::to_string(values.size()) + " is not a multiple of " +
                          std::to_string(feature_count));
    return Matrix(values.size() / feature_count, feature_count, std::vector<double>(values.begin(), values.end()));
}

}  // namespace tspec
