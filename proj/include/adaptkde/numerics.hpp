#pragma once

#include "grid.hpp"

#include <complex>
#include <vector>

namespace adaptkde::numerics {

//! Riemann-sum L_p norm over the grid box, p >= 1.
double lp_norm(const GriddedFunction& f, double p);

//! FFT convolution of two functions on grids with identical spacing,
//! scaled by the cell volume. The output grid covers the Minkowski sum
//! of the input boxes (full zero-padded convolution, no wraparound).
GriddedFunction convolve(const GriddedFunction& f, const GriddedFunction& g);

//! Direct O(N^2) convolution; oracle for `convolve` on small grids.
GriddedFunction convolve_direct(const GriddedFunction& f,
                                const GriddedFunction& g);

//! k-th order forward difference with step u (a multiple of spacing[axis])
//! along `axis`; the output grid shrinks to where the stencil fits.
GriddedFunction finite_difference(const GriddedFunction& f, double u, int axis,
                                  int order);

//! Restrict f to the sub-box of `target` node positions; every node of
//! `target` must coincide with a node of f.grid.
GriddedFunction restrict_to(const GriddedFunction& f,
                            const UniformGrid& target);

//! In-place n-dimensional FFT of row-major data (power-of-two dims only).
void fft_nd(std::vector<std::complex<double>>& data,
            const std::vector<Eigen::Index>& dims, bool inverse);

Eigen::Index next_pow2(Eigen::Index n);

} // namespace adaptkde::numerics
