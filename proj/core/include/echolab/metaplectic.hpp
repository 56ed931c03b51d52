#pragma once

#include <vector>

#include "echolab/symplectic.hpp"
#include "echolab/types.hpp"

namespace echolab {

/// Squeezed coherent state in hbar = 1 scaled units:
///   psi(x) = prefactor * exp( (i/2) width (x-q).(x-q) + i p.(x - q/2) )
/// with Im(width) positive definite. The reference Gaussian g has
/// center 0, width iI and prefactor pi^{-d/4}.
struct GaussianState {
  int dim = 1;
  PhaseVector center;  // (q, p), zero for metaplectic images of g
  CMat width;          // complex symmetric d x d
  Complex prefactor{1.0, 0.0};
};

GaussianState reference_gaussian(int d);

/// R(F) g: width (C+iD)(A+iB)^{-1}, prefactor pi^{-d/4} det(A+iB)^{-1/2}.
/// The square root is branch-continued along `path` (a sequence of
/// symplectic matrices from I to F, last entry F); principal branch when
/// the path is empty.
GaussianState metaplectic_on_gaussian(const Mat& F, const std::vector<Mat>& path = {});

/// Width Moebius transport of a general Gaussian under F. The prefactor is
/// renormalised in modulus; the metaplectic cocycle phase is not tracked.
GaussianState apply_symplectic(const GaussianState& s, const Mat& F);

/// <g_X, g_Y> = exp(-|X-Y|^2/4 + (i/2) sigma(X,Y)), inner product antilinear
/// in the first slot.
Complex gaussian_overlap(const PhaseVector& X, const PhaseVector& Y);

/// <g_{Y+X/2}, R(F) g_{Y-X/2}> in closed form. The printed constants of the
/// source formula are calibrated once against the F = I overlap (and locked
/// by quadrature tests): the prefactor is det(V_F)^{-1/2} and the symplectic
/// cross term enters with the sign that reproduces gaussian_overlap at F = I.
Complex matrix_element(const Mat& F, const PhaseVector& X, const PhaseVector& Y);

/// Same with a caller-supplied branch of det(V_F)^{-1/2} (from continuation
/// along a flow path).
Complex matrix_element_with_root(const Mat& F, const PhaseVector& X, const PhaseVector& Y,
                                 Complex det_v_root);

/// Weyl symbol of R(F) at phase-space point X (Mehlig-Wilkinson form),
/// normalised so the identity operator has symbol 1:
///   det((I+F)/2)^{-1/2} exp(-i J(I-F)(I+F)^{-1} X . X).
/// Principal branch of the root; see mw_weyl_symbol_with_root for
/// continuation along a path.
Complex mw_weyl_symbol(const Mat& F, const PhaseVector& X);

Complex mw_weyl_symbol_with_root(const Mat& F, const PhaseVector& X, Complex half_det_root);

/// Path of matrices (I + F_s)/2 for continuing the Weyl-symbol prefactor.
std::vector<CMat> mw_root_path(const std::vector<Mat>& f_path);

/// Path of matrices (A_s + i B_s) for continuing the metaplectic prefactor.
std::vector<CMat> metaplectic_root_path(const std::vector<Mat>& f_path);

/// Straight Lie-algebra interpolation path s -> exp(s log-ish) is not well
/// defined for general F; tests build paths from the generating flow
/// instead. This helper produces the path {exp(s JS)} for F = exp(JS).
std::vector<Mat> generator_path(const Mat& JS, int n_steps);

}  // namespace echolab
