#pragma once

// First-order constant-coefficient operators A = Σ_j A_j ∂_j acting on
// R^N-valued functions of n variables, their complex symbols, polynomial
// kernels on cubes and L^2 projections onto them.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tracelab/grid.hpp"

namespace tracelab {

struct DiffOperator {
    std::string name;
    int n = 0;  // variables
    int N = 0;  // input components
    int M = 0;  // output components
    std::vector<std::vector<double>> A;  // A[j] is M x N, row-major

    double coeff(int j, int row, int col) const { return A[j][static_cast<std::size_t>(row) * N + col]; }
    /// Throws DomainError on inconsistent shapes.
    void validate() const;

    /// ∇ on scalars (N = 1, M = n).
    static DiffOperator gradient(int n);
    /// (∂_1 u_1, (∂_2 u_1 + ∂_1 u_2)/2, ∂_2 u_2) for n = 2.
    static DiffOperator symmetric_gradient_2d();
    /// (∂_1 u_1 - ∂_2 u_2, ∂_2 u_1 + ∂_1 u_2): elliptic but not C-elliptic.
    static DiffOperator cauchy_riemann();
    /// Looks up one of the three shipped operators by name.
    static DiffOperator by_name(const std::string& name, int n);
};

using Complex = std::complex<double>;

/// Smallest singular value of Σ_j A_j xi_j (0 when M < N).
double symbol_min_singular(const DiffOperator& op, std::span<const Complex> xi);

struct EllipticityVerdict {
    bool likely_elliptic = false;
    double min_singular = 0.0;
    std::vector<Complex> witness;      // xi attaining the minimum
    std::vector<Complex> null_vector;  // right singular vector at the witness
    std::size_t samples = 0;
};

inline constexpr double ellipticity_threshold = 1e-8;

/// Random complex unit vectors from the seed, plus structured probes
/// e_k, (e_k ± i e_l)/√2, (e_k ± e_l)/√2.
EllipticityVerdict is_c_elliptic(const DiffOperator& op, std::size_t sample_count = 10000,
                                 std::uint64_t seed = 20240601);

/// Exponent tuples with |alpha| <= d in graded order (padded to 3 entries).
std::vector<std::array<int, 3>> monomials(int n, int d);

/// Dimension of {π polynomial of degree <= d : Aπ = 0} for d = 0..max_degree.
std::vector<int> kernel_dimensions(const DiffOperator& op, int max_degree);

struct Cube {
    int n = 0;
    std::array<double, 3> center{};
    double side = 0.0;

    double lo(int axis) const noexcept { return center[axis] - 0.5 * side; }
    double hi(int axis) const noexcept { return center[axis] + 0.5 * side; }
    double volume() const;
    bool contains(const double* x, double slack = 0.0) const noexcept;
    /// Same center, side scaled.
    Cube dilate(double factor) const { return Cube{n, center, side * factor}; }
};

/// Orthonormal basis of ker(A) ∩ polynomials of degree <= degree, in L^2(cube).
/// Coefficients refer to local coordinates y = (x - center) / (side / 2); the
/// tables are the same for every cube and only the normalization changes.
struct PolyKernelBasis {
    DiffOperator op;
    Cube cube;
    int degree = 0;
    std::vector<int> dimensions;               // kernel dimension by degree tried
    std::vector<std::array<int, 3>> monomials;
    std::vector<std::vector<double>> elements; // element i: component-major, N x monomials.size()

    std::size_t size() const noexcept { return elements.size(); }
    /// (side/2)^{-n/2}: maps the reference normalization to L^2(cube).
    double scale() const;
    /// Values π_i,c(x) for all i, c into out[i * N + c].
    void evaluate_all(const double* x, double* out) const;
    /// Same polynomial space, normalized on another cube.
    PolyKernelBasis on_cube(const Cube& q) const;
    /// max |coefficient of A π_i| over i (exact polynomial arithmetic).
    double operator_residual() const;
};

/// Increases the degree until the kernel dimension agrees for two consecutive
/// degrees; the basis uses the first of the two. Throws ConvergenceError
/// listing the dimensions when degree_cap is reached without stabilization.
PolyKernelBasis kernel_basis(const DiffOperator& op, const Cube& cube, int degree_cap = 4);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

/// Weights on the given sorted nodes of [a, b] that integrate polynomials of
/// degree <= exact_degree exactly: trapezoid weights plus the minimal-norm
/// moment correction. Throws DomainError with fewer than exact_degree + 1 nodes.
std::vector<double> moment_corrected_weights(std::span<const double> nodes, double a, double b, int exact_degree);

/// Vector field with N components sampled on one grid and level set.
using FieldComponents = std::vector<HalfSpaceField>;

/// Nodes of the field inside a cube with tensor quadrature weights exact to
/// degree 2m.
struct CubeQuadrature {
    std::array<std::vector<int>, 3> index;      // per axis: node indices (tangential) or level indices (last)
    std::array<std::vector<double>, 3> coord;
    std::array<std::vector<double>, 3> weight;
    int n = 0;

    std::size_t count() const;
};

/// Throws ResourceError naming the cube when an axis has fewer than
/// 2 * degree + 1 nodes.
CubeQuadrature cube_quadrature(const BoundaryGrid& grid, std::span<const double> levels, const Cube& cube,
                               int degree);

/// Coefficients ⟨u, π_i⟩_{L^2(Q)} by grid quadrature.
std::vector<double> project_coefficients(const FieldComponents& u, const PolyKernelBasis& basis,
                                         const CubeQuadrature& quad);
std::vector<double> project_coefficients(const FieldComponents& u, const PolyKernelBasis& basis);

/// Σ_i c_i π_i(x), N values.
void evaluate_projection(const PolyKernelBasis& basis, std::span<const double> coeffs, const double* x, double* out);

/// Samples Σ_i c_i π_i on a grid and level set.
FieldComponents sample_polynomial(const PolyKernelBasis& basis, std::span<const double> coeffs,
                                  const BoundaryGrid& grid, const std::vector<double>& levels);

}  // namespace tracelab
