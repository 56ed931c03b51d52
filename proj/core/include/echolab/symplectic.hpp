#pragma once

#include <cstdint>
#include <vector>

#include "echolab/types.hpp"

namespace echolab {

// Tolerance split: algebraic constructions are held to 1e-10, anything that
// went through an ODE integrator to 1e-8.
inline constexpr double kTolAlgebra = 1e-10;
inline constexpr double kTolFlow = 1e-8;

/// The standard symplectic matrix J = [[0, I_d], [-I_d, 0]].
Mat standard_J(int d);

/// Max-norm of F~ J F - J (zero for exactly symplectic F).
double symplectic_defect(const Mat& F);

bool is_symplectic(const Mat& F, double tol);

/// A real 2d x 2d matrix validated (or trusted) to be symplectic.
struct SympMatrix {
  int dim = 0;  // d; the matrix is 2d x 2d
  Mat m;

  static SympMatrix checked(Mat F, double tol = kTolAlgebra);
  /// No validation; for matrices produced by constructions that are
  /// symplectic by design (flows, exponentials of Hamiltonian matrices).
  static SympMatrix trusted(Mat F);
};

/// exp(J S) with S symmetric, entries uniform in [-scale, scale] from a
/// seeded generator. scale = 0 gives the identity; larger scales produce
/// increasingly hyperbolic maps.
SympMatrix random_symplectic(int d, std::uint64_t seed, double scale);

/// A random element of the orthogonal-symplectic subgroup (image of U(d)).
SympMatrix random_orthosymplectic(int d, std::uint64_t seed);

/// V_F = (1/2) (I + F + i J (I - F)).
CMat build_VF(const Mat& F);

/// det V_F computed from the block identity det V_F = det (A+D+i(B-C))/2,
/// F = [[A,B],[C,D]]. Agrees with the direct 2d x 2d determinant.
Complex det_VF_block(const Mat& F);

/// K_F = (I + F) (2 V_F)^{-1}. Equals (I + iJ(I-F)(I+F)^{-1})^{-1} whenever
/// det(I+F) != 0 and extends continuously otherwise.
CMat build_KF(const Mat& F);

/// Gamma_F = (I + iJ)(I + F)(2 V_F)^{-1}(I - iJ) - I; complex symmetric.
CMat build_GammaF(const Mat& F);

/// Largest eigenvalue of F~ F (squared operator norm of F).
double largest_stretch(const Mat& F);

/// A determinant inverse square root continued along a path, with the
/// accumulated phase recorded in half-turns.
struct BranchedRoot {
  Complex value{1.0, 0.0};  // det^{-1/2} at this step
  int winding = 0;          // nearest integer to (accumulated phase)/pi
};

/// Continue det(M)^{-1/2} along a path of complex matrices starting at a
/// matrix with det = 1 (root fixed to +1 there). Consecutive determinants
/// must differ by a relative step < 0.5, else a refinement_required error;
/// a vanishing determinant raises a caustic error carrying the path index.
std::vector<BranchedRoot> branch_sqrt_det(const std::vector<CMat>& path);

/// Same continuation, starting from precomputed determinants.
std::vector<BranchedRoot> branch_sqrt_from_dets(const std::vector<Complex>& dets);

}  // namespace echolab
