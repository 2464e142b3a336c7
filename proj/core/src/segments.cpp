#include "eegcs/segments.hpp"

#include "eegcs/matrix_io.hpp"
#include "eegcs/rng.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>

namespace eegcs {
namespace {

constexpr std::array<char, 8> kMagic = {'E', 'E', 'G', 'C', 'S', 'S', 'E', 'G'};
constexpr std::uint32_t kAllChannels = 0xFFFFFFFFu;

} // namespace

SignalSegment normalize_segment(SignalSegment segment, SegmentMode mode) {
    if (mode == SegmentMode::SingleChannel) {
        for (Index c = 0; c < segment.data.cols(); ++c) {
            const double norm = segment.data.col(c).norm();
            if (!(norm > 0.0)) {
                throw DegenerateSegmentError("segment at offset " +
                                             std::to_string(segment.source_offset) +
                                             " has a zero-energy column");
            }
            segment.data.col(c) /= norm;
        }
        segment.norm = NormKind::L2PerColumn;
    } else {
        const double norm = segment.data.norm();
        if (!(norm > 0.0)) {
            throw DegenerateSegmentError("segment at offset " +
                                         std::to_string(segment.source_offset) +
                                         " has zero energy");
        }
        segment.data /= norm;
        segment.norm = NormKind::Frobenius;
    }
    return segment;
}

SegmentationResult segment(const Recording& rec, Index n, SegmentMode mode, std::size_t count,
                           std::uint64_t seed, Index channels) {
    if (n < 1) {
        throw DimensionError("segment length must be positive");
    }
    const Index total = rec.sample_count();
    const Index available = rec.channel_count();
    const Index used = channels == 0 ? available : channels;
    if (used < 1 || used > available) {
        throw DimensionError("requested " + std::to_string(used) + " channels, recording has " +
                             std::to_string(available));
    }
    if (n > total) {
        throw DimensionError("segment length " + std::to_string(n) + " exceeds recording length " +
                             std::to_string(total));
    }

    const auto blocks_needed = [&](std::size_t windows) -> Index {
        if (mode == SegmentMode::SingleChannel) {
            return static_cast<Index>((windows + static_cast<std::size_t>(used) - 1) /
                                      static_cast<std::size_t>(used));
        }
        return static_cast<Index>(windows);
    };
    const Index needed = blocks_needed(count) * n;
    if (needed > total) {
        throw DimensionError("recording too short: " + std::to_string(count) +
                             " windows need " + std::to_string(needed) + " samples, have " +
                             std::to_string(total));
    }
    Index offset = 0;
    if (seed != 0) {
        Rng rng(seed);
        offset = static_cast<Index>(rng.below(static_cast<std::uint64_t>(total - needed) + 1));
    }

    SegmentationResult out;
    out.segments.reserve(count);
    for (std::size_t w = 0; out.segments.size() < count; ++w) {
        SignalSegment seg;
        if (mode == SegmentMode::SingleChannel) {
            const auto ch = static_cast<Index>(w % static_cast<std::size_t>(used));
            const Index start = offset + static_cast<Index>(w / static_cast<std::size_t>(used)) * n;
            if (start + n > total) {
                throw DimensionError("recording too short after skipping " +
                                     std::to_string(out.skipped) + " degenerate windows");
            }
            seg.data = rec.samples.row(ch).segment(start, n).transpose();
            seg.source_offset = start;
            seg.channel = static_cast<std::uint32_t>(ch);
        } else {
            const Index start = offset + static_cast<Index>(w) * n;
            if (start + n > total) {
                throw DimensionError("recording too short after skipping " +
                                     std::to_string(out.skipped) + " degenerate windows");
            }
            seg.data = rec.samples.block(0, start, used, n).transpose();
            seg.source_offset = start;
        }
        try {
            out.segments.push_back(normalize_segment(std::move(seg), mode));
        } catch (const DegenerateSegmentError&) {
            ++out.skipped;
        }
    }
    return out;
}

std::uintmax_t segment_container_size(const std::vector<SignalSegment>& segments) {
    std::uintmax_t size = 24;
    for (const auto& s : segments) {
        size += 32 + 8 * static_cast<std::uintmax_t>(s.data.size());
    }
    return size;
}

void write_segments(std::ostream& out, const std::vector<SignalSegment>& segments) {
    out.write(kMagic.data(), kMagic.size());
    binary::put_u32(out, kSegmentContainerVersion);
    binary::put_u32(out, 0);
    binary::put_u64(out, segments.size());
    for (const auto& s : segments) {
        binary::put_u64(out, static_cast<std::uint64_t>(s.data.rows()));
        binary::put_u64(out, static_cast<std::uint64_t>(s.data.cols()));
        binary::put_u64(out, static_cast<std::uint64_t>(s.source_offset));
        binary::put_u32(out, s.channel.value_or(kAllChannels));
        const std::array<char, 4> tail = {static_cast<char>(s.norm), 0, 0, 0};
        out.write(tail.data(), tail.size());
        for (Index i = 0; i < s.data.rows(); ++i) {
            for (Index j = 0; j < s.data.cols(); ++j) {
                binary::put_f64(out, s.data(i, j));
            }
        }
    }
    if (!out) {
        throw FormatError("failed writing segment container");
    }
}

std::vector<SignalSegment> read_segments(std::istream& in) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != 8 || magic != kMagic) {
        throw FormatError("not a segment container (bad magic)");
    }
    const auto version = binary::get_u32(in);
    if (version != kSegmentContainerVersion) {
        throw FormatError("unsupported segment container version " + std::to_string(version));
    }
    binary::get_u32(in);
    const auto count = binary::get_u64(in);
    std::vector<SignalSegment> out;
    for (std::uint64_t k = 0; k < count; ++k) {
        const auto rows = binary::get_u64(in);
        const auto cols = binary::get_u64(in);
        if (rows > (1ULL << 24) || cols > (1ULL << 16)) {
            throw FormatError("segment dimensions out of range");
        }
        SignalSegment s;
        s.source_offset = static_cast<std::int64_t>(binary::get_u64(in));
        const auto channel = binary::get_u32(in);
        if (channel != kAllChannels) {
            s.channel = channel;
        }
        std::array<char, 4> tail{};
        in.read(tail.data(), tail.size());
        if (in.gcount() != 4 || tail[0] < 0 || tail[0] > 2) {
            throw FormatError("malformed segment record header");
        }
        s.norm = static_cast<NormKind>(tail[0]);
        s.data.resize(static_cast<Index>(rows), static_cast<Index>(cols));
        for (Index i = 0; i < s.data.rows(); ++i) {
            for (Index j = 0; j < s.data.cols(); ++j) {
                s.data(i, j) = binary::get_f64(in);
            }
        }
        out.push_back(std::move(s));
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError("trailing bytes after segment container");
    }
    return out;
}

void export_segments(const std::vector<SignalSegment>& segments, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot open " + path.string() + " for writing");
    }
    write_segments(out, segments);
}

std::vector<SignalSegment> import_segments(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    return read_segments(in);
}

std::string to_string(SegmentMode mode) {
    return mode == SegmentMode::SingleChannel ? "single-channel" : "multi-channel";
}

SegmentMode parse_segment_mode(const std::string& text) {
    if (text == "single-channel" || text == "single") {
        return SegmentMode::SingleChannel;
    }
    if (text == "multi-channel" || text == "multi") {
        return SegmentMode::MultiChannel;
    }
    throw std::invalid_argument("unknown segment mode '" + text + "'");
}

} // namespace eegcs
