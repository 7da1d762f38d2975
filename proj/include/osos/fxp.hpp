#ifndef OSOS_FXP_HPP
#define OSOS_FXP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "osos/elm.hpp"
#include "osos/signal.hpp"

namespace osos {

enum class FxpOverflow : std::uint8_t { Saturate = 0 };
enum class FxpRounding : std::uint8_t { NearestEven = 0 };

// Signed fixed-point format: 1 sign bit + int_bits + frac_bits. Stored
// integers span [-2^(int_bits+frac_bits), 2^(int_bits+frac_bits) - 1].
struct FxpFormat {
    int int_bits = 16;
    int frac_bits = 16;
    FxpOverflow overflow = FxpOverflow::Saturate;
    FxpRounding rounding = FxpRounding::NearestEven;
};

// Quantization scratchpad: counts silent saturations so a sweep can
// report them.
struct FxpStats {
    std::uint64_t saturation_events = 0;
};

// Round v*2^frac to the nearest integer (ties to even), saturate to the
// representable range, return the represented real value.
double quantize(double v, const FxpFormat& fmt, FxpStats* stats = nullptr);

// Matrix held as raw scaled integers.
struct FxpMatrix {
    FxpFormat fmt;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::int64_t> raw;  // value * 2^frac_bits

    static FxpMatrix from_matrix(const Matrix& m, const FxpFormat& fmt,
                                 FxpStats* stats = nullptr);
    Matrix to_matrix() const;
};

// obt_update with every multiply/add requantized to fmt: operands are
// quantized on entry and each accumulate step goes through quantize().
// The reciprocal of the gain denominator is computed in double and
// quantized once. Inputs' state is quantized in place.
void fxp_obt_update(OnlineState& state, const ElmModel& model,
                    std::span<const double> x, std::span<const double> y,
                    const FxpFormat& fmt, FxpStats* stats = nullptr);

// Forward pass under the same quantization discipline.
Matrix fxp_infer(const ElmModel& model, const Matrix& x, const Matrix& eta,
                 const FxpFormat& fmt, FxpStats* stats = nullptr);

struct FxpSweepRow {
    int frac_bits = 0;  // -1 marks the float64 reference rows
    int output_index = 0;
    std::string metric;
    double value = 0.0;
    std::uint64_t saturation_events = 0;
};

struct FxpSweepConfig {
    std::size_t n_init = 250;
    std::size_t n_hidden = 150;
    std::uint64_t model_seed = 1;
    std::size_t n_test = 0;  // 0: use 1/5 of the dataset
    FxpFormat base;          // int_bits/modes; frac_bits comes from the list
    std::vector<int> frac_bits;
    PinvConfig pinv;
    bool classification = false;
};

// For each fractional width: real-64 initial training on the first
// n_init rows, fixed-point sequential training over the remaining
// training rows, fixed-point inference on the held-out tail, plus a
// float64 reference row set (frac_bits = -1). Regression emits mae/mse
// per output; classification adds accuracy and the match rate against
// the float64 predictions.
std::vector<FxpSweepRow> sweep_frac_bits(const LabeledDataset& ds, const FxpSweepConfig& cfg);

void write_fxp_sweep_csv(const std::filesystem::path& path,
                         const std::vector<FxpSweepRow>& rows);

}  // namespace osos

#endif
