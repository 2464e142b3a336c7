#pragma once

#include "eegcs/types.hpp"

#include <cstdint>
#include <optional>

namespace eegcs {

enum class NormKind : std::uint8_t {
    None = 0,
    L2PerColumn = 1,
    Frobenius = 2,
};

/// An N x R window of samples (R = 1 for single-channel segments).
struct SignalSegment {
    Matrix data;
    /// First sample of the window within its recording.
    std::int64_t source_offset = 0;
    /// Source channel for single-channel windows; empty when all channels
    /// are present.
    std::optional<std::uint32_t> channel;
    NormKind norm = NormKind::None;

    [[nodiscard]] Index length() const { return data.rows(); }
    [[nodiscard]] Index channels() const { return data.cols(); }

    friend bool operator==(const SignalSegment& a, const SignalSegment& b) {
        return a.source_offset == b.source_offset && a.channel == b.channel &&
               a.norm == b.norm && a.data.rows() == b.data.rows() &&
               a.data.cols() == b.data.cols() && a.data == b.data;
    }
};

} // namespace eegcs
