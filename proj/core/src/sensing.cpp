#include "eegcs/sensing.hpp"

#include "eegcs/rng.hpp"

#include <array>
#include <cmath>
#include <string>

namespace eegcs {
namespace {

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

// Daubechies 4-tap scaling filter.
const std::array<double, 4>& d4_lowpass() {
    static const std::array<double, 4> h = [] {
        const double s3 = std::sqrt(3.0);
        const double d = 4.0 * std::sqrt(2.0);
        return std::array<double, 4>{(1.0 + s3) / d, (3.0 + s3) / d,
                                     (3.0 - s3) / d, (1.0 - s3) / d};
    }();
    return h;
}

// Quadrature mirror: g_k = (-1)^k h_{3-k}.
const std::array<double, 4>& d4_highpass() {
    static const std::array<double, 4> g = [] {
        const auto& h = d4_lowpass();
        return std::array<double, 4>{h[3], -h[2], h[1], -h[0]};
    }();
    return g;
}

} // namespace

SensingMatrix::SensingMatrix(Matrix entries, std::uint64_t seed)
    : entries_(std::move(entries)), seed_(seed) {
    if (entries_.rows() < 1 || entries_.cols() < 1) {
        throw DimensionError("sensing matrix must be non-empty");
    }
    if (entries_.rows() > entries_.cols()) {
        throw DimensionError("sensing matrix must have M <= N, got " +
                             std::to_string(entries_.rows()) + "x" +
                             std::to_string(entries_.cols()));
    }
}

AnalysisDictionary::AnalysisDictionary(Matrix entries, AnalysisKind kind)
    : entries_(std::move(entries)), kind_(kind) {
    if (entries_.rows() < 1 || entries_.cols() < 1) {
        throw DimensionError("analysis dictionary must be non-empty");
    }
}

Matrix AnalysisDictionary::apply(const Matrix& x) const {
    if (x.rows() != length()) {
        throw DimensionError("analysis operator expects " + std::to_string(length()) +
                             " rows, got " + std::to_string(x.rows()));
    }
    if (kind_ != AnalysisKind::SecondOrderDifference) {
        return entries_ * x;
    }
    const Index q = rows();
    Matrix out(q, x.cols());
    for (Index c = 0; c < x.cols(); ++c) {
        for (Index i = 0; i < q; ++i) {
            out(i, c) = (x(i, c) + x(i + 2, c)) - 2.0 * x(i + 1, c);
        }
    }
    return out;
}

Matrix AnalysisDictionary::apply_adjoint(const Matrix& z) const {
    if (z.rows() != rows()) {
        throw DimensionError("analysis adjoint expects " + std::to_string(rows()) +
                             " rows, got " + std::to_string(z.rows()));
    }
    if (kind_ != AnalysisKind::SecondOrderDifference) {
        return entries_.transpose() * z;
    }
    Matrix out = Matrix::Zero(length(), z.cols());
    for (Index c = 0; c < z.cols(); ++c) {
        for (Index i = 0; i < rows(); ++i) {
            const double v = z(i, c);
            out(i, c) += v;
            out(i + 1, c) -= 2.0 * v;
            out(i + 2, c) += v;
        }
    }
    return out;
}

SynthesisDictionary::SynthesisDictionary(Matrix entries, WaveletFamily family)
    : entries_(std::move(entries)), family_(family) {
    if (entries_.rows() < 1 || entries_.rows() > entries_.cols()) {
        throw DimensionError("synthesis dictionary must satisfy 1 <= N <= P");
    }
}

SensingMatrix make_gaussian_sensing(Index m, Index n, std::uint64_t seed) {
    if (m < 1 || n < 1 || m > n) {
        throw DimensionError("gaussian sensing requires 1 <= M <= N, got M=" +
                             std::to_string(m) + " N=" + std::to_string(n));
    }
    Rng rng(seed);
    Matrix phi(m, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < m; ++i) {
            phi(i, j) = rng.normal();
        }
        phi.col(j) /= phi.col(j).norm();
    }
    return SensingMatrix(std::move(phi), seed);
}

AnalysisDictionary make_second_order_difference(Index n) {
    if (n < 3) {
        throw DimensionError("second-order difference needs N >= 3, got " +
                             std::to_string(n));
    }
    Matrix omega = Matrix::Zero(n - 2, n);
    for (Index q = 0; q < n - 2; ++q) {
        omega(q, q) = 1.0;
        omega(q, q + 1) = -2.0;
        omega(q, q + 2) = 1.0;
    }
    return AnalysisDictionary(std::move(omega), AnalysisKind::SecondOrderDifference);
}

SynthesisDictionary make_wavelet_synthesis(Index n) {
    if (n < 8 || !is_power_of_two(n)) {
        throw DimensionError("wavelet dictionary needs N a power of two >= 8, got " +
                             std::to_string(n));
    }
    Matrix psi(n, n);
    Vector e = Vector::Zero(n);
    for (Index j = 0; j < n; ++j) {
        e(j) = 1.0;
        psi.col(j) = wavelet::inverse(e);
        e(j) = 0.0;
    }
    return SynthesisDictionary(std::move(psi), WaveletFamily::Daubechies4);
}

SynthesisDictionary make_identity_synthesis(Index n) {
    if (n < 1) {
        throw DimensionError("identity dictionary needs N >= 1");
    }
    return SynthesisDictionary(Matrix::Identity(n, n), WaveletFamily::Identity);
}

CompressedMeasurement compress(const Matrix& x, const SensingMatrix& phi) {
    if (x.rows() != phi.length()) {
        throw DimensionError("compress: sensing matrix has N=" +
                             std::to_string(phi.length()) + " but signal has " +
                             std::to_string(x.rows()) + " rows");
    }
    CompressedMeasurement y;
    y.entries = phi.entries() * x;
    y.source_length = x.rows();
    y.channels = x.cols();
    y.sensing_seed = phi.seed();
    return y;
}

CompressedMeasurement compress(const SignalSegment& x, const SensingMatrix& phi) {
    return compress(x.data, phi);
}

namespace wavelet {

Vector forward(const Vector& x) {
    const Index n = x.size();
    if (n < 2 || !is_power_of_two(n)) {
        throw DimensionError("wavelet transform needs a power-of-two length");
    }
    const auto& h = d4_lowpass();
    const auto& g = d4_highpass();
    Vector out = x;
    Vector tmp(n);
    for (Index len = n; len >= 2; len /= 2) {
        const Index half = len / 2;
        for (Index i = 0; i < half; ++i) {
            double a = 0.0;
            double d = 0.0;
            for (Index k = 0; k < 4; ++k) {
                const double v = out((2 * i + k) % len);
                a += h[k] * v;
                d += g[k] * v;
            }
            tmp(i) = a;
            tmp(half + i) = d;
        }
        out.head(len) = tmp.head(len);
    }
    return out;
}

Vector inverse(const Vector& coeffs) {
    const Index n = coeffs.size();
    if (n < 2 || !is_power_of_two(n)) {
        throw DimensionError("wavelet transform needs a power-of-two length");
    }
    const auto& h = d4_lowpass();
    const auto& g = d4_highpass();
    Vector out = coeffs;
    Vector tmp(n);
    for (Index len = 2; len <= n; len *= 2) {
        const Index half = len / 2;
        tmp.head(len).setZero();
        for (Index i = 0; i < half; ++i) {
            const double a = out(i);
            const double d = out(half + i);
            for (Index k = 0; k < 4; ++k) {
                tmp((2 * i + k) % len) += h[k] * a + g[k] * d;
            }
        }
        out.head(len) = tmp.head(len);
    }
    return out;
}

} // namespace wavelet

std::string_view to_string(AnalysisKind kind) {
    return kind == AnalysisKind::SecondOrderDifference ? "second-order-difference"
                                                       : "custom";
}

std::string_view to_string(WaveletFamily family) {
    return family == WaveletFamily::Daubechies4 ? "daubechies-4" : "identity";
}

} // namespace eegcs
