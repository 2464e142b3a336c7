#pragma once

#include "eegcs/signal.hpp"
#include "eegcs/types.hpp"

#include <cstdint>
#include <string_view>

namespace eegcs {

/// M x N measurement operator. Immutable once built.
class SensingMatrix {
public:
    SensingMatrix(Matrix entries, std::uint64_t seed);

    [[nodiscard]] const Matrix& entries() const { return entries_; }
    [[nodiscard]] Index measurements() const { return entries_.rows(); }
    [[nodiscard]] Index length() const { return entries_.cols(); }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }

private:
    Matrix entries_;
    std::uint64_t seed_;
};

enum class AnalysisKind { SecondOrderDifference, Custom };

/// Q x N analysis operator.
class AnalysisDictionary {
public:
    AnalysisDictionary(Matrix entries, AnalysisKind kind);

    [[nodiscard]] const Matrix& entries() const { return entries_; }
    [[nodiscard]] Index rows() const { return entries_.rows(); }
    [[nodiscard]] Index length() const { return entries_.cols(); }
    [[nodiscard]] AnalysisKind kind() const { return kind_; }

    /// Omega * X, column by column.
    [[nodiscard]] Matrix apply(const Matrix& x) const;
    /// Omega^T * Z.
    [[nodiscard]] Matrix apply_adjoint(const Matrix& z) const;

private:
    Matrix entries_;
    AnalysisKind kind_;
};

enum class WaveletFamily { Daubechies4, Identity };

/// N x P synthesis dictionary; the signal is Psi * theta.
class SynthesisDictionary {
public:
    SynthesisDictionary(Matrix entries, WaveletFamily family);

    [[nodiscard]] const Matrix& entries() const { return entries_; }
    [[nodiscard]] Index length() const { return entries_.rows(); }
    [[nodiscard]] Index atoms() const { return entries_.cols(); }
    [[nodiscard]] WaveletFamily family() const { return family_; }

private:
    Matrix entries_;
    WaveletFamily family_;
};

/// Y = Phi X together with the shape of its source.
struct CompressedMeasurement {
    Matrix entries;
    Index source_length = 0;
    Index channels = 0;
    std::uint64_t sensing_seed = 0;
};

/// I.i.d. standard normal entries, then every column scaled to unit l2
/// norm. Column-major fill order from a single Rng stream.
SensingMatrix make_gaussian_sensing(Index m, Index n, std::uint64_t seed);

/// (1, -2, 1) stencil with Q = N - 2 rows.
AnalysisDictionary make_second_order_difference(Index n);

/// Orthonormal periodic Daubechies-4 synthesis matrix at full depth.
/// Column j is the inverse transform of e_j.
SynthesisDictionary make_wavelet_synthesis(Index n);

SynthesisDictionary make_identity_synthesis(Index n);

CompressedMeasurement compress(const Matrix& x, const SensingMatrix& phi);
CompressedMeasurement compress(const SignalSegment& x, const SensingMatrix& phi);

namespace wavelet {

/// Forward periodic D4 transform to full depth. Output layout is
/// [approximation, coarsest detail, ..., finest detail].
Vector forward(const Vector& x);
/// Inverse of forward().
Vector inverse(const Vector& coeffs);

} // namespace wavelet

std::string_view to_string(AnalysisKind kind);
std::string_view to_string(WaveletFamily family);

} // namespace eegcs
