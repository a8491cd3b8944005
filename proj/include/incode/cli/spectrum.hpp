#pragma once

#include <span>

#include "incode/common.hpp"

namespace incode::cli {

/// |DFT| of a real signal at bins 0 .. n/2.
Vector amplitude_spectrum(std::span<const double> signal);

/// Amplitude spectrum of every column (after removing its mean), averaged
/// over columns. Rows are samples of one unit's response.
Vector mean_unit_spectrum(const Matrix& responses);

/// Share of spectral energy (squared amplitude, DC excluded) at bins
/// >= cutoff * nyquist_bin.
double energy_fraction_above(const Vector& spectrum, double cutoff);

}  // namespace incode::cli
