#pragma once

#include "eegcs/edf.hpp"
#include "eegcs/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace eegcs {

enum class SegmentMode { SingleChannel, MultiChannel };

/// Raised when a window has zero energy and cannot be normalized.
class DegenerateSegmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SegmentationResult {
    std::vector<SignalSegment> segments;
    /// All-zero windows that were passed over.
    std::size_t skipped = 0;
};

/// Scales a segment to unit l2 norm per column (single-channel) or unit
/// Frobenius norm (multi-channel). Throws DegenerateSegmentError when the
/// norm is zero.
SignalSegment normalize_segment(SignalSegment segment, SegmentMode mode);

/// Cuts L non-overlapping windows of length N from the start of the
/// recording (plus a seed-derived offset when seed != 0).
///
/// Single-channel windows cycle through the channels in order before
/// advancing in time: window w reads channel w mod C at time block w / C.
/// Multi-channel windows take the first `channels` channels (all when 0) of
/// consecutive N-sample blocks. All-zero windows are skipped and replaced by
/// the next window.
SegmentationResult segment(const Recording& rec, Index n, SegmentMode mode, std::size_t count,
                           std::uint64_t seed, Index channels = 0);

// Segment container (little-endian):
//   bytes 0..7    magic "EEGCSSEG"
//   bytes 8..11   u32 version (= 1)
//   bytes 12..15  u32 reserved (= 0)
//   bytes 16..23  u64 segment count
//   per segment:
//     u64 rows N, u64 cols R, i64 source offset,
//     u32 channel (0xFFFFFFFF when all channels), u8 norm kind, 3 zero bytes,
//     N*R binary64 values, row-major.
// A file holding S segments of N x R is exactly 24 + S * (32 + 8 N R) bytes.
inline constexpr std::uint32_t kSegmentContainerVersion = 1;

std::uintmax_t segment_container_size(const std::vector<SignalSegment>& segments);

void write_segments(std::ostream& out, const std::vector<SignalSegment>& segments);
std::vector<SignalSegment> read_segments(std::istream& in);
void export_segments(const std::vector<SignalSegment>& segments, const std::filesystem::path& path);
std::vector<SignalSegment> import_segments(const std::filesystem::path& path);

std::string to_string(SegmentMode mode);
SegmentMode parse_segment_mode(const std::string& text);

} // namespace eegcs
